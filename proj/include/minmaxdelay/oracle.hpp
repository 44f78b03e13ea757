#pragma once

#include <minmaxdelay/budget.hpp>
#include <minmaxdelay/instance.hpp>
#include <minmaxdelay/lp.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace mmd {

// Reference implementations that sidestep the production pipeline: they
// work on explicit path lists and small exhaustive searches, so their
// answers are easy to trust and to compare against.

struct PathRecord {
  std::vector<std::string> edges;  // edge ids along the path
  std::int64_t delay = 0;

  bool operator==(const PathRecord&) const = default;
};

// Every simple source-sink path, sorted by delay and then by edge ids.
// Throws BudgetExceededError when there are more than budget.max_paths.
inline std::vector<PathRecord> enumerate_paths(const GraphInstance& g,
                                               const SearchBudget& budget = {}) {
  require_valid(g);
  auto ix = detail::IndexedGraph::build(g);
  detail::NodeCounter steps{0, budget.max_nodes};
  std::vector<PathRecord> out;
  std::vector<char> visited(ix.node_count(), 0);
  std::vector<int> stack;

  auto rec = [&](auto&& self, int v, std::int64_t delay) -> void {
    steps.tick("search node");
    if (v == ix.sink) {
      if (static_cast<std::int64_t>(out.size()) >= budget.max_paths)
        throw BudgetExceededError("path budget of " + std::to_string(budget.max_paths) +
                                  " exhausted");
      PathRecord rec_out;
      for (int e : stack) rec_out.edges.push_back(g.edges[e].id);
      rec_out.delay = delay;
      out.push_back(std::move(rec_out));
      return;
    }
    visited[v] = 1;
    for (int e : ix.out_edges[v]) {
      int w = ix.edge_head[e];
      if (visited[w]) continue;
      stack.push_back(e);
      self(self, w, delay + g.edges[e].delay);
      stack.pop_back();
    }
    visited[v] = 0;
  };
  rec(rec, ix.source, 0);

  std::sort(out.begin(), out.end(), [](const PathRecord& a, const PathRecord& b) {
    if (a.delay != b.delay) return a.delay < b.delay;
    return a.edges < b.edges;
  });
  return out;
}

// Largest rate routable along the given paths within edge capacities,
// ignoring paths slower than the bound. Solved as a path-variable LP.
inline Rational oracle_path_rate(const GraphInstance& g, const std::vector<PathRecord>& paths,
                                 std::int64_t delay_bound) {
  LinearProgram lp;
  std::vector<int> vars;
  std::vector<const PathRecord*> used;
  for (const auto& p : paths) {
    if (p.delay > delay_bound) continue;
    int v = lp.add_variable("p" + std::to_string(vars.size()));
    lp.set_objective(v, Rational(1));
    vars.push_back(v);
    used.push_back(&p);
  }
  for (const auto& e : g.edges) {
    std::vector<LinearTerm> terms;
    for (std::size_t i = 0; i < used.size(); ++i)
      for (const auto& id : used[i]->edges)
        if (id == e.id) terms.push_back({vars[i], Rational(1)});
    if (!terms.empty())
      lp.add_constraint("cap[" + e.id + "]", std::move(terms), Relation::LessEqual,
                        Rational(e.capacity));
  }
  auto sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("path rate program must have an optimum");
  return sol.objective;
}

// Best achievable rate with every used path at most `delay_bound` slow.
inline Rational oracle_dc_max_flow(const GraphInstance& g, std::int64_t delay_bound,
                                   const SearchBudget& budget = {}) {
  if (delay_bound < 0) throw std::invalid_argument("delay bound must be non-negative");
  return oracle_path_rate(g, enumerate_paths(g, budget), delay_bound);
}

struct OracleAnswer {
  bool feasible = false;
  std::int64_t value = 0;  // smallest achievable max delay when feasible
};

// Scans the distinct path delays from below and reports the first bound
// whose best rate reaches the instance's demand.
inline OracleAnswer oracle_min_max_delay(const GraphInstance& g, const SearchBudget& budget = {}) {
  auto paths = enumerate_paths(g, budget);
  std::set<std::int64_t> delays;
  for (const auto& p : paths) delays.insert(p.delay);
  for (std::int64_t d : delays)
    if (oracle_path_rate(g, paths, d) >= g.rate) return {true, d};
  return {false, 0};
}

// Exhaustive integer variant: tries every assignment of whole units to
// paths within capacities. Only meant for tiny instances; enforces hard
// caps of 64 paths and a demand of 8.
inline OracleAnswer oracle_int_min_max_delay(const GraphInstance& g,
                                             const SearchBudget& budget = {}) {
  require_valid(g);
  if (!g.rate.is_integer()) return {false, 0};  // whole units cannot sum to a fraction
  std::int64_t demand = g.rate.to_int64();
  if (demand > 8) throw BudgetExceededError("demand above the exhaustive limit of 8");
  auto paths = enumerate_paths(g, budget);
  if (paths.size() > 64) throw BudgetExceededError("more than 64 paths for exhaustive search");

  std::map<std::string, std::int64_t> residual;
  for (const auto& e : g.edges) residual[e.id] = e.capacity;
  detail::NodeCounter steps{0, budget.max_nodes};
  std::optional<std::int64_t> best;

  auto bottleneck = [&](const PathRecord& p) {
    std::int64_t b = std::numeric_limits<std::int64_t>::max();
    for (const auto& id : p.edges) b = std::min(b, residual.at(id));
    return b;
  };
  // Paths are sorted by delay, so the delay of the last path carrying
  // anything is the max delay of the assignment.
  auto rec = [&](auto&& self, std::size_t i, std::int64_t remaining, std::int64_t worst) -> void {
    steps.tick("search node");
    if (remaining == 0) {
      if (!best || worst < *best) best = worst;
      return;
    }
    if (i == paths.size()) return;
    if (best && paths[i].delay >= *best) return;  // cannot strictly improve
    std::int64_t cap = std::min(bottleneck(paths[i]), remaining);
    for (std::int64_t q = cap; q >= 0; --q) {
      for (const auto& id : paths[i].edges) residual[id] -= q;
      self(self, i + 1, remaining - q, q > 0 ? paths[i].delay : worst);
      for (const auto& id : paths[i].edges) residual[id] += q;
    }
  };
  rec(rec, 0, demand, 0);
  if (!best) return {false, 0};
  return {true, *best};
}

}  // namespace mmd
