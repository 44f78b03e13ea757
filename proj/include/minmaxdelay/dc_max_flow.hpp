#pragma once

#include <minmaxdelay/expansion.hpp>
#include <minmaxdelay/instance.hpp>
#include <minmaxdelay/lp.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mmd {

namespace detail {

// State in the expanded graph: a node together with accumulated delay.
using NodeLevel = std::pair<int, std::int64_t>;

struct Arc {
  int edge;
  std::int64_t level;  // accumulated delay at the edge's head
};

}  // namespace detail

// Turns a conserved edge-level flow back into source-sink paths. Greedy
// tracing follows the largest remaining value (ties to the first declared
// edge). A trace that revisits a node went around a positive-delay cycle;
// the cycle is cancelled and the tail of the trace shifted down to the
// first visit's level, which preserves conservation, capacities and the
// arriving rate, and strictly reduces the flow's total delay. Tracing
// restarts until every projection is a simple path.
inline PathFlow decompose(const GraphInstance& g, const EdgeLevelFlow& flow) {
  require_valid(g);
  auto ix = detail::IndexedGraph::build(g);

  std::map<std::pair<int, std::int64_t>, Rational> live;  // (edge, level) -> value
  for (const auto& [key, value] : flow) {
    if (value.is_negative()) throw std::invalid_argument("negative flow on edge '" + key.first + "'");
    if (value.is_zero()) continue;
    auto it = ix.edge_index.find(key.first);
    if (it == ix.edge_index.end()) throw std::invalid_argument("unknown edge '" + key.first + "'");
    int e = it->second;
    if (ix.edge_head[e] == ix.source)
      throw std::invalid_argument("flow enters the source on edge '" + key.first + "'");
    if (ix.edge_tail[e] == ix.sink)
      throw std::invalid_argument("flow leaves the sink on edge '" + key.first + "'");
    if (key.second < g.edges[e].delay)
      throw std::invalid_argument("level below the edge's own delay on '" + key.first + "'");
    live[{e, key.second}] += value;
  }

  // Conservation per interior state; the source may only emit at level 0.
  {
    std::map<detail::NodeLevel, Rational> net;
    for (const auto& [key, value] : live) {
      auto [e, level] = key;
      net[{ix.edge_head[e], level}] += value;
      net[{ix.edge_tail[e], level - g.edges[e].delay}] -= value;
    }
    for (const auto& [state, balance] : net) {
      auto [node, level] = state;
      if (node == ix.sink) continue;
      if (node == ix.source) {
        if (level != 0 && !balance.is_zero())
          throw std::invalid_argument("flow leaves the source at delay level " +
                                      std::to_string(level));
        continue;
      }
      if (!balance.is_zero())
        throw std::invalid_argument("conservation fails at node '" + g.nodes[node] +
                                    "' level " + std::to_string(level));
    }
  }

  // Out-arcs per state, in declaration order for deterministic tracing.
  auto out_arcs = [&](const detail::NodeLevel& state) {
    std::vector<detail::Arc> arcs;
    for (int e : ix.out_edges[state.first]) {
      std::int64_t level = state.second + g.edges[e].delay;
      auto it = live.find({e, level});
      if (it != live.end() && it->second.is_positive()) arcs.push_back({e, level});
    }
    return arcs;
  };

  PathFlow out;
  std::map<std::vector<std::string>, std::size_t> seen;

  auto source_arc = [&]() -> std::vector<detail::Arc> {
    return out_arcs({ix.source, 0});
  };

  long guard = 0;
  while (true) {
    if (++guard > 1'000'000)
      throw std::logic_error("path tracing failed to terminate");
    auto starts = source_arc();
    if (starts.empty()) break;

    std::vector<detail::Arc> walk;
    std::vector<int> nodes = {ix.source};
    detail::NodeLevel at = {ix.source, 0};
    while (at.first != ix.sink) {
      auto arcs = out_arcs(at);
      if (arcs.empty())
        throw std::logic_error("trace stuck despite conservation");
      const detail::Arc* pick = &arcs.front();
      for (const auto& a : arcs)
        if (live.at({a.edge, a.level}) > live.at({pick->edge, pick->level})) pick = &a;
      walk.push_back(*pick);
      at = {ix.edge_head[pick->edge], pick->level};
      nodes.push_back(at.first);
    }

    // First revisited node, if any.
    int rep_i = -1, rep_j = -1;
    {
      std::map<int, int> first_at;
      for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        auto [it, fresh] = first_at.emplace(nodes[i], i);
        if (!fresh) {
          rep_i = it->second;
          rep_j = i;
          break;
        }
      }
    }

    // For a repair only the detour and what follows it move, so the
    // bottleneck is taken over that part of the walk alone.
    int bn_from = rep_i == -1 ? 0 : rep_i;
    Rational bottleneck = live.at({walk[bn_from].edge, walk[bn_from].level});
    for (int k = bn_from; k < static_cast<int>(walk.size()); ++k)
      bottleneck = rational_min(bottleneck, live.at({walk[k].edge, walk[k].level}));

    auto deduct = [&](const detail::Arc& a, const Rational& amount) {
      auto it = live.find({a.edge, a.level});
      it->second -= amount;
      if (it->second.is_zero()) live.erase(it);
    };

    if (rep_i == -1) {
      std::vector<std::string> ids;
      for (const auto& a : walk) ids.push_back(g.edges[a.edge].id);
      for (const auto& a : walk) deduct(a, bottleneck);
      auto [it, fresh] = seen.emplace(ids, out.paths.size());
      if (fresh)
        out.paths.push_back({std::move(ids), bottleneck});
      else
        out.paths[it->second].rate += bottleneck;
      continue;
    }

    // Cancel the detour between the two visits and replay the rest of the
    // walk at the earlier delay level.
    std::int64_t level_i = rep_i == 0 ? 0 : walk[rep_i - 1].level;
    std::int64_t shift = walk[rep_j - 1].level - level_i;
    for (int k = rep_i; k < rep_j; ++k) deduct(walk[k], bottleneck);
    for (int k = rep_j; k < static_cast<int>(walk.size()); ++k) {
      deduct(walk[k], bottleneck);
      live[{walk[k].edge, walk[k].level - shift}] += bottleneck;
    }
  }

  if (!live.empty())
    throw std::logic_error("flow left over after tracing");
  return out;
}

struct DcMaxFlowResult {
  std::int64_t delay_bound = 0;
  Rational value;                // best achievable rate within the bound
  PathFlow path_flow;            // decomposition carrying exactly `value`
  EdgeLevelFlow edge_level_flow; // per-variable values consistent with path_flow
};

// Best rate subject to every carrying path finishing within `delay_bound`,
// via the time-expanded program.
inline DcMaxFlowResult dc_max_flow(const GraphInstance& g, std::int64_t delay_bound) {
  auto problem = expand(g, delay_bound);
  auto sol = solve_lp(problem.lp());
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("expanded program must have an optimum");

  DcMaxFlowResult out;
  out.delay_bound = delay_bound;
  out.value = sol.objective;
  out.path_flow = decompose(g, extract_edge_flow(problem, sol));
  if (out.path_flow.total_rate() != out.value)
    throw std::logic_error("decomposition changed the flow value");

  // Rebuild the per-level view from the decomposition so the two stay
  // consistent even when tracing had to cancel a cycle.
  for (const auto& v : problem.variables())
    out.edge_level_flow[{g.edges[v.edge].id, v.level}] = Rational(0);
  std::map<std::string, const Edge*> by_id;
  for (const auto& e : g.edges) by_id.emplace(e.id, &e);
  for (const auto& p : out.path_flow.paths) {
    std::int64_t level = 0;
    for (const auto& id : p.edges) {
      level += by_id.at(id)->delay;
      out.edge_level_flow[{id, level}] += p.rate;
    }
  }
  return out;
}

}  // namespace mmd
