#pragma once

#include <minmaxdelay/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mmd {

// Directed edge with an integer capacity and an integer delay. Parallel
// edges between the same node pair are allowed, so edges carry their own
// ids and paths are sequences of edge ids rather than node sequences.
struct Edge {
  std::string id;
  std::string tail;
  std::string head;
  std::int64_t capacity = 0;
  std::int64_t delay = 0;

  bool operator==(const Edge&) const = default;
};

struct GraphInstance {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::string source;
  std::string sink;
  Rational rate;  // required throughput R

  std::int64_t max_edge_delay() const {
    std::int64_t d = 0;
    for (const auto& e : edges) d = std::max(d, e.delay);
    return d;
  }

  // Upper bound on the delay of any simple path: |E| * max edge delay.
  std::int64_t delay_horizon() const {
    return static_cast<std::int64_t>(edges.size()) * max_edge_delay();
  }

  bool operator==(const GraphInstance&) const = default;
};

// One unit of structure in a path-decomposed flow: a simple source-sink
// path given as edge ids, with the rate routed along it.
struct FlowPath {
  std::vector<std::string> edges;
  Rational rate;

  bool operator==(const FlowPath&) const = default;
};

struct PathFlow {
  std::vector<FlowPath> paths;

  Rational total_rate() const {
    Rational r;
    for (const auto& p : paths) r += p.rate;
    return r;
  }

  bool operator==(const PathFlow&) const = default;
};

namespace detail {

// Index-based view of an instance used by the algorithms. Construction
// assumes the instance already passed validation.
struct IndexedGraph {
  const GraphInstance* inst = nullptr;
  std::unordered_map<std::string, int> node_index;
  std::unordered_map<std::string, int> edge_index;
  std::vector<int> edge_tail, edge_head;
  std::vector<std::vector<int>> out_edges, in_edges;  // per node, edge indices
  int source = -1, sink = -1;

  int node_count() const { return static_cast<int>(inst->nodes.size()); }
  int edge_count() const { return static_cast<int>(inst->edges.size()); }

  static IndexedGraph build(const GraphInstance& g) {
    IndexedGraph ix;
    ix.inst = &g;
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i)
      ix.node_index.emplace(g.nodes[i], i);
    ix.out_edges.resize(g.nodes.size());
    ix.in_edges.resize(g.nodes.size());
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
      ix.edge_index.emplace(g.edges[e].id, e);
      int u = ix.node_index.at(g.edges[e].tail);
      int v = ix.node_index.at(g.edges[e].head);
      ix.edge_tail.push_back(u);
      ix.edge_head.push_back(v);
      ix.out_edges[u].push_back(e);
      ix.in_edges[v].push_back(e);
    }
    ix.source = ix.node_index.at(g.source);
    ix.sink = ix.node_index.at(g.sink);
    return ix;
  }
};

// True if the subgraph of zero-delay edges contains a directed cycle.
inline bool has_zero_delay_cycle(const IndexedGraph& ix) {
  int n = ix.node_count();
  std::vector<int> indeg(n, 0);
  for (int e = 0; e < ix.edge_count(); ++e)
    if (ix.inst->edges[e].delay == 0) ++indeg[ix.edge_head[e]];
  std::queue<int> q;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) q.push(v);
  int seen = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    ++seen;
    for (int e : ix.out_edges[v])
      if (ix.inst->edges[e].delay == 0 && --indeg[ix.edge_head[e]] == 0)
        q.push(ix.edge_head[e]);
  }
  return seen != n;
}

}  // namespace detail

// Checks an instance against the model's ground rules and returns one
// message per violation; an empty result means the instance is usable.
inline std::vector<std::string> validate(const GraphInstance& g) {
  std::vector<std::string> out;
  std::set<std::string> node_ids;
  for (const auto& v : g.nodes) {
    if (v.empty()) out.push_back("empty node id");
    if (!node_ids.insert(v).second) out.push_back("duplicate node id '" + v + "'");
  }
  std::set<std::string> edge_ids;
  for (const auto& e : g.edges) {
    if (e.id.empty()) out.push_back("empty edge id");
    if (!edge_ids.insert(e.id).second) out.push_back("duplicate edge id '" + e.id + "'");
    if (!node_ids.count(e.tail)) out.push_back("edge '" + e.id + "' has unknown tail '" + e.tail + "'");
    if (!node_ids.count(e.head)) out.push_back("edge '" + e.id + "' has unknown head '" + e.head + "'");
    if (e.tail == e.head) out.push_back("edge '" + e.id + "' is a self-loop");
    if (e.capacity < 0) out.push_back("edge '" + e.id + "' has negative capacity");
    if (e.delay < 0) out.push_back("edge '" + e.id + "' has negative delay");
  }
  if (!node_ids.count(g.source)) out.push_back("unknown source '" + g.source + "'");
  if (!node_ids.count(g.sink)) out.push_back("unknown sink '" + g.sink + "'");
  if (node_ids.count(g.source) && g.source == g.sink) out.push_back("source equals sink");
  if (!g.rate.is_positive()) out.push_back("rate must be positive");
  if (out.empty()) {
    // Zero-delay cycles would let flow loop without spending delay, which
    // the time-expanded model cannot represent; they are rejected up front.
    auto ix = detail::IndexedGraph::build(g);
    if (detail::has_zero_delay_cycle(ix)) out.push_back("graph contains a zero-delay cycle");
  }
  return out;
}

inline bool is_valid(const GraphInstance& g) { return validate(g).empty(); }

inline void require_valid(const GraphInstance& g) {
  auto problems = validate(g);
  if (problems.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw std::invalid_argument(msg);
}

// Checks that `edge_ids` names a simple source-sink path; returns an error
// message, or empty string if the path is well formed.
inline std::string check_path(const GraphInstance& g, const std::vector<std::string>& edge_ids) {
  if (edge_ids.empty()) return "path has no edges";
  std::unordered_map<std::string, const Edge*> by_id;
  for (const auto& e : g.edges) by_id.emplace(e.id, &e);
  std::set<std::string> visited;
  std::string at = g.source;
  visited.insert(at);
  for (const auto& id : edge_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) return "unknown edge '" + id + "'";
    if (it->second->tail != at)
      return "edge '" + id + "' starts at '" + it->second->tail + "', expected '" + at + "'";
    at = it->second->head;
    if (!visited.insert(at).second) return "path revisits node '" + at + "'";
  }
  if (at != g.sink) return "path ends at '" + at + "', not at the sink";
  return "";
}

// Sum of edge delays along a path. The path must be a simple source-sink
// path of this instance.
inline std::int64_t path_delay(const GraphInstance& g, const std::vector<std::string>& edge_ids) {
  if (auto err = check_path(g, edge_ids); !err.empty())
    throw std::invalid_argument("bad path: " + err);
  std::unordered_map<std::string, std::int64_t> delay;
  for (const auto& e : g.edges) delay.emplace(e.id, e.delay);
  std::int64_t total = 0;
  for (const auto& id : edge_ids) total += delay.at(id);
  return total;
}

// Largest delay among paths that actually carry flow (positive rate).
// The flow must have at least one carrying path.
inline std::int64_t max_delay(const GraphInstance& g, const PathFlow& flow) {
  bool any = false;
  std::int64_t worst = 0;
  for (const auto& p : flow.paths) {
    if (!p.rate.is_positive()) continue;
    worst = std::max(worst, path_delay(g, p.edges));
    any = true;
  }
  if (!any) throw std::invalid_argument("flow carries no positive rate");
  return worst;
}

// Per-edge totals induced by a path flow, keyed by edge id. Every edge of
// the instance appears, including edges carrying zero.
inline std::map<std::string, Rational> aggregate_edge_flow(const GraphInstance& g, const PathFlow& flow) {
  std::map<std::string, Rational> total;
  for (const auto& e : g.edges) total[e.id];
  for (const auto& p : flow.paths) {
    if (auto err = check_path(g, p.edges); !err.empty())
      throw std::invalid_argument("bad path: " + err);
    for (const auto& id : p.edges) total[id] += p.rate;
  }
  return total;
}

// Violations of the path-flow ground rules against an instance: paths must
// be simple source-sink paths, rates positive, and per-edge totals within
// capacity. Empty result means the flow is well formed.
inline std::vector<std::string> validate_flow(const GraphInstance& g, const PathFlow& flow) {
  std::vector<std::string> out;
  std::map<std::string, Rational> total;
  for (std::size_t i = 0; i < flow.paths.size(); ++i) {
    const auto& p = flow.paths[i];
    if (auto err = check_path(g, p.edges); !err.empty()) {
      out.push_back("path " + std::to_string(i) + ": " + err);
      continue;
    }
    if (!p.rate.is_positive())
      out.push_back("path " + std::to_string(i) + ": rate " + p.rate.str() + " is not positive");
    for (const auto& id : p.edges) total[id] += p.rate;
  }
  for (const auto& e : g.edges) {
    auto it = total.find(e.id);
    if (it != total.end() && it->second > Rational(e.capacity))
      out.push_back("edge '" + e.id + "' carries " + it->second.str() + " over capacity " +
                    std::to_string(e.capacity));
  }
  return out;
}

// Total delay incurred by the flow, path view: sum of rate * path delay.
inline Rational total_delay_by_paths(const GraphInstance& g, const PathFlow& flow) {
  Rational total;
  for (const auto& p : flow.paths) total += p.rate * Rational(path_delay(g, p.edges));
  return total;
}

// Same quantity computed from per-edge totals: sum of edge flow * edge
// delay. Always equal to the path view for well-formed flows.
inline Rational total_delay_by_edges(const GraphInstance& g, const PathFlow& flow) {
  auto agg = aggregate_edge_flow(g, flow);
  Rational total;
  for (const auto& e : g.edges) total += agg.at(e.id) * Rational(e.delay);
  return total;
}

}  // namespace mmd
