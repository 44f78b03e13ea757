#pragma once

#include <minmaxdelay/instance.hpp>
#include <minmaxdelay/lp.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace mmd {

// One LP variable of the expanded program: the rate leaving `edge` having
// accumulated exactly `level` total delay at the edge's head.
struct ExpandedVariable {
  int edge = 0;
  std::int64_t level = 0;

  bool operator==(const ExpandedVariable&) const = default;
};

namespace detail {

struct ArrivalInfo {
  std::vector<std::set<std::int64_t>> arrival;  // per node, reachable delay levels
  std::vector<std::int64_t> to_sink;            // cheapest continuation, -1 if none
};

// Walk-reachable delay levels per node, bounded by `limit`, on the graph
// without edges into the source or out of the sink. Those edges can only
// appear on walks that revisit a terminal, which no simple path does, and
// keeping them would let the program route rate that never truly left the
// source. Levels that cannot be extended to reach the sink within the
// limit are dropped as well.
inline ArrivalInfo reachable_levels(const IndexedGraph& ix, std::int64_t limit) {
  int n = ix.node_count();
  auto usable = [&](int e) {
    return ix.edge_head[e] != ix.source && ix.edge_tail[e] != ix.sink;
  };

  ArrivalInfo info;
  info.to_sink.assign(n, -1);
  info.to_sink[ix.sink] = 0;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int e = 0; e < ix.edge_count(); ++e) {
      if (!usable(e)) continue;
      std::int64_t head = info.to_sink[ix.edge_head[e]];
      if (head < 0) continue;
      std::int64_t cand = head + ix.inst->edges[e].delay;
      std::int64_t& cur = info.to_sink[ix.edge_tail[e]];
      if (cur < 0 || cand < cur) {
        cur = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }

  info.arrival.resize(n);
  std::vector<std::pair<int, std::int64_t>> frontier;
  if (info.to_sink[ix.source] >= 0 && info.to_sink[ix.source] <= limit) {
    info.arrival[ix.source].insert(0);
    frontier.emplace_back(ix.source, 0);
  }
  while (!frontier.empty()) {
    auto [u, at] = frontier.back();
    frontier.pop_back();
    for (int e : ix.out_edges[u]) {
      if (!usable(e)) continue;
      int v = ix.edge_head[e];
      std::int64_t level = at + ix.inst->edges[e].delay;
      if (info.to_sink[v] < 0 || level + info.to_sink[v] > limit) continue;
      if (info.arrival[v].insert(level).second) frontier.emplace_back(v, level);
    }
  }
  return info;
}

}  // namespace detail

// The delay-bounded throughput LP on the time-expanded graph. Variables
// track how much rate crosses each edge at each accumulated delay level;
// conservation couples them per node and level, and one bundle row per
// edge enforces the shared capacity across all its levels.
class ExpandedProblem {
 public:
  const GraphInstance& instance() const { return instance_; }
  const LinearProgram& lp() const { return lp_; }
  std::int64_t delay_bound() const { return bound_; }

  // Largest delay level at which anything can still reach the sink; -1
  // when the sink is unreachable within the bound. Bounds above this value
  // all produce the same program.
  std::int64_t effective_bound() const { return effective_; }

  const std::vector<ExpandedVariable>& variables() const { return vars_; }

  std::optional<int> variable_index(const std::string& edge_id, std::int64_t level) const {
    auto it = index_.find({edge_id, level});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  friend ExpandedProblem expand(const GraphInstance&, std::int64_t);

  GraphInstance instance_;
  LinearProgram lp_;
  std::int64_t bound_ = 0;
  std::int64_t effective_ = -1;
  std::vector<ExpandedVariable> vars_;
  std::map<std::pair<std::string, std::int64_t>, int> index_;
};

inline ExpandedProblem expand(const GraphInstance& g, std::int64_t delay_bound) {
  if (delay_bound < 0) throw std::invalid_argument("delay bound must be non-negative");
  require_valid(g);

  ExpandedProblem out;
  out.instance_ = g;
  out.bound_ = delay_bound;

  auto ix = detail::IndexedGraph::build(g);
  auto info = detail::reachable_levels(ix, delay_bound);
  if (!info.arrival[ix.sink].empty()) out.effective_ = *info.arrival[ix.sink].rbegin();

  // Variables, in edge declaration order and by level within an edge.
  for (int e = 0; e < ix.edge_count(); ++e) {
    if (ix.edge_head[e] == ix.source || ix.edge_tail[e] == ix.sink) continue;
    for (std::int64_t at : info.arrival[ix.edge_tail[e]]) {
      std::int64_t level = at + g.edges[e].delay;
      if (info.to_sink[ix.edge_head[e]] < 0) continue;
      if (level + info.to_sink[ix.edge_head[e]] > delay_bound) continue;
      int var = out.lp_.add_variable("f[" + g.edges[e].id + "," + std::to_string(level) + "]");
      out.vars_.push_back({e, level});
      out.index_.emplace(std::make_pair(g.edges[e].id, level), var);
    }
  }

  // Throughput objective: everything that arrives at the sink.
  for (int v = 0; v < static_cast<int>(out.vars_.size()); ++v)
    if (ix.edge_head[out.vars_[v].edge] == ix.sink) out.lp_.set_objective(v, Rational(1));

  // Source-sink balance: rate leaving the source equals rate arriving at
  // the sink. A direct source-sink edge sits on both sides and cancels.
  {
    std::map<int, Rational> coeff;
    for (int v = 0; v < static_cast<int>(out.vars_.size()); ++v) {
      const auto& ev = out.vars_[v];
      if (ix.edge_tail[ev.edge] == ix.source && ev.level == g.edges[ev.edge].delay)
        coeff[v] += Rational(1);
      if (ix.edge_head[ev.edge] == ix.sink) coeff[v] -= Rational(1);
    }
    std::vector<LinearTerm> terms;
    for (const auto& [v, c] : coeff)
      if (!c.is_zero()) terms.push_back({v, c});
    if (!terms.empty())
      out.lp_.add_constraint("balance", std::move(terms), Relation::Equal, Rational(0));
  }

  // Conservation at every interior node and level: what arrives with a
  // given accumulated delay leaves with that delay plus the next edge's.
  for (int node = 0; node < ix.node_count(); ++node) {
    if (node == ix.source || node == ix.sink) continue;
    for (std::int64_t at : info.arrival[node]) {
      std::vector<LinearTerm> terms;
      for (int e : ix.in_edges[node])
        if (auto v = out.variable_index(g.edges[e].id, at)) terms.push_back({*v, Rational(1)});
      for (int e : ix.out_edges[node])
        if (auto v = out.variable_index(g.edges[e].id, at + g.edges[e].delay))
          terms.push_back({*v, Rational(-1)});
      if (!terms.empty())
        out.lp_.add_constraint("conserve[" + g.nodes[node] + "," + std::to_string(at) + "]",
                               std::move(terms), Relation::Equal, Rational(0));
    }
  }

  // One capacity bundle per edge across all its levels.
  for (int e = 0; e < ix.edge_count(); ++e) {
    std::vector<LinearTerm> terms;
    for (int v = 0; v < static_cast<int>(out.vars_.size()); ++v)
      if (out.vars_[v].edge == e) terms.push_back({v, Rational(1)});
    if (!terms.empty())
      out.lp_.add_constraint("cap[" + g.edges[e].id + "]", std::move(terms), Relation::LessEqual,
                             Rational(g.edges[e].capacity));
  }

  return out;
}

// All delay levels at which flow can arrive at the sink, within the
// horizon that bounds every simple path. The min-max search only ever
// needs to distinguish bounds at these values.
inline std::vector<std::int64_t> achievable_sink_levels(const GraphInstance& g) {
  require_valid(g);
  auto ix = detail::IndexedGraph::build(g);
  auto info = detail::reachable_levels(ix, g.delay_horizon());
  return {info.arrival[ix.sink].begin(), info.arrival[ix.sink].end()};
}

// Per-variable values of a solved expanded program, keyed by edge id and
// delay level. Zero-valued variables are included.
using EdgeLevelFlow = std::map<std::pair<std::string, std::int64_t>, Rational>;

inline EdgeLevelFlow extract_edge_flow(const ExpandedProblem& problem, const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal)
    throw std::invalid_argument("expanded program has no solution to extract");
  EdgeLevelFlow out;
  const auto& g = problem.instance();
  for (int v = 0; v < static_cast<int>(problem.variables().size()); ++v) {
    const auto& ev = problem.variables()[v];
    out[{g.edges[ev.edge].id, ev.level}] = sol.values[v];
  }
  return out;
}

}  // namespace mmd
