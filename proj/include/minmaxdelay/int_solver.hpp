#pragma once

#include <minmaxdelay/budget.hpp>
#include <minmaxdelay/minmax.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmd {

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntSolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::int64_t optimal_value = 0;
  PathFlow flow;  // positive integer rates summing to the requirement, when solved
};

namespace detail {

inline std::int64_t floor_int64(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.numerator().get_mpz_t(), r.denominator().get_mpz_t());
  if (!q.fits_slong_p()) throw std::overflow_error("value out of 64-bit range");
  return q.get_si();
}

// The interior nodes split into groups nothing connects, so flow routed
// through one group never competes with another. Each group becomes a
// stand-alone instance sharing the original endpoints; edges running
// directly between the endpoints become one-edge instances of their own.
inline std::vector<GraphInstance> split_components(const GraphInstance& g) {
  IndexedGraph ix = IndexedGraph::build(g);
  int n = static_cast<int>(g.nodes.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  auto interior = [&](int v) { return v != ix.source && v != ix.sink; };
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    int u = ix.edge_tail[e], v = ix.edge_head[e];
    if (interior(u) && interior(v)) parent[find(u)] = find(v);
  }

  // Group edges by the interior side they touch, keyed so that groups come
  // out ordered by their first edge.
  std::map<int, std::vector<std::size_t>> groups;  // root -> edge indices
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> ordered;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    int u = ix.edge_tail[e], v = ix.edge_head[e];
    if (!interior(u) && !interior(v)) {
      ordered.push_back({e, {e}});
      continue;
    }
    int root = find(interior(u) ? u : v);
    auto [it, fresh] = groups.emplace(root, std::vector<std::size_t>{});
    it->second.push_back(e);
    if (fresh) ordered.push_back({e, {}});
  }
  for (auto& [first_edge, edges] : ordered) {
    if (!edges.empty()) continue;  // filled below from the group map
    int root = find(interior(ix.edge_tail[first_edge]) ? ix.edge_tail[first_edge]
                                                       : ix.edge_head[first_edge]);
    edges = groups.at(root);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<GraphInstance> out;
  for (const auto& [first_edge, edges] : ordered) {
    GraphInstance sub;
    sub.source = g.source;
    sub.sink = g.sink;
    sub.rate = g.rate;
    std::vector<char> keep_node(n, 0);
    keep_node[ix.source] = keep_node[ix.sink] = 1;
    for (std::size_t e : edges) keep_node[ix.edge_tail[e]] = keep_node[ix.edge_head[e]] = 1;
    for (int v = 0; v < n; ++v)
      if (keep_node[v]) sub.nodes.push_back(g.nodes[v]);
    for (std::size_t e : edges) sub.edges.push_back(g.edges[e]);
    out.push_back(std::move(sub));
  }
  return out;
}

// Depth-first search for the largest number of unit-rate paths that fit in
// one piece of the graph under a shared delay ceiling. Units are committed
// one after another with their edge sequences kept lexicographically
// nondecreasing, so each multiset of paths is visited once.
class UnitRouter {
 public:
  explicit UnitRouter(const GraphInstance& sub) : sub_(sub), ix_(IndexedGraph::build(sub)) {
    int n = static_cast<int>(sub.nodes.size());
    to_sink_.assign(n, -1);
    to_sink_[ix_.sink] = 0;
    for (int pass = 0; pass < n; ++pass) {
      bool moved = false;
      for (std::size_t e = 0; e < sub.edges.size(); ++e) {
        std::int64_t head = to_sink_[ix_.edge_head[e]];
        if (head < 0) continue;
        std::int64_t via = sub.edges[e].delay + head;
        auto& best = to_sink_[ix_.edge_tail[e]];
        if (best < 0 || via < best) {
          best = via;
          moved = true;
        }
      }
      if (!moved) break;
    }
  }

  // Largest unit count achievable, capped at `limit`. When `witness` is
  // given, it receives one edge-index sequence per routed unit.
  std::int64_t max_units(std::int64_t delay_bound, std::int64_t limit, NodeCounter& counter,
                         std::vector<std::vector<int>>* witness = nullptr) {
    if (limit <= 0 || to_sink_[ix_.source] < 0 || to_sink_[ix_.source] > delay_bound) return 0;
    bound_ = delay_bound;
    limit_ = limit;
    counter_ = &counter;
    best_ = 0;
    best_paths_.clear();
    committed_.clear();
    cur_.clear();
    residual_.clear();
    for (const auto& e : sub_.edges) residual_.push_back(e.capacity);
    visited_.assign(sub_.nodes.size(), 0);
    visited_[ix_.source] = 1;
    static const std::vector<int> no_prev;
    extend(no_prev, false, 0, ix_.source, 0);
    if (witness) *witness = best_paths_;
    return best_;
  }

 private:
  // Grows the current unit edge by edge. `prev` is the previous unit's
  // sequence; while `tied` the current one matches it so far and may not
  // pick a smaller edge. Returns true once the cap is reached.
  bool extend(const std::vector<int>& prev, bool tied, std::size_t pos, int node,
              std::int64_t used) {
    counter_->tick("search node");
    if (node == ix_.sink) {
      committed_.push_back(cur_);
      if (static_cast<std::int64_t>(committed_.size()) > best_) {
        best_ = static_cast<std::int64_t>(committed_.size());
        best_paths_ = committed_;
      }
      bool done = best_ >= limit_;
      if (!done) {
        std::vector<int> next_prev = cur_;
        std::vector<char> saved = std::exchange(visited_, std::vector<char>(sub_.nodes.size(), 0));
        std::vector<int> saved_cur = std::exchange(cur_, {});
        visited_[ix_.source] = 1;
        done = extend(next_prev, true, 0, ix_.source, 0);
        cur_ = std::move(saved_cur);
        visited_ = std::move(saved);
      }
      committed_.pop_back();
      return done;
    }
    if (tied && pos >= prev.size()) tied = false;  // already strictly larger
    for (int e : ix_.out_edges[node]) {
      if (tied && e < prev[pos]) continue;
      if (residual_[e] == 0) continue;
      int head = ix_.edge_head[e];
      if (visited_[head]) continue;
      std::int64_t reach = used + sub_.edges[e].delay;
      if (to_sink_[head] < 0 || reach + to_sink_[head] > bound_) continue;
      --residual_[e];
      visited_[head] = 1;
      cur_.push_back(e);
      bool done = extend(prev, tied && e == prev[pos], pos + 1, head, reach);
      cur_.pop_back();
      visited_[head] = 0;
      ++residual_[e];
      if (done) return true;
    }
    return false;
  }

  const GraphInstance& sub_;
  IndexedGraph ix_;
  std::vector<std::int64_t> to_sink_;
  std::int64_t bound_ = 0, limit_ = 0, best_ = 0;
  NodeCounter* counter_ = nullptr;
  std::vector<std::int64_t> residual_;
  std::vector<char> visited_;
  std::vector<int> cur_;
  std::vector<std::vector<int>> committed_, best_paths_;
};

}  // namespace detail

// Exact minimum over integer path flows of the worst flow-carrying path
// delay. Candidate answers are the sink arrival levels; for each probe the
// graph pieces are searched independently and their unit counts added,
// with the fractional optimum of each piece capping its search.
inline IntSolveResult int_min_max_delay(const GraphInstance& g, const SearchBudget& budget = {}) {
  require_valid(g);
  if (!g.rate.is_integer())
    throw std::invalid_argument("integer rate required, got " + g.rate.str());
  const std::int64_t required = g.rate.to_int64();

  IntSolveResult result;
  const std::vector<std::int64_t> levels = achievable_sink_levels(g);
  if (levels.empty()) return result;

  const std::vector<GraphInstance> subs = detail::split_components(g);
  std::vector<detail::UnitRouter> routers;
  routers.reserve(subs.size());
  for (const auto& sub : subs) routers.emplace_back(sub);

  detail::NodeCounter counter{0, budget.max_nodes};
  std::map<std::pair<std::size_t, std::int64_t>, std::int64_t> units_memo;
  auto component_units = [&](std::size_t ci, std::int64_t bound) {
    auto key = std::make_pair(ci, bound);
    auto it = units_memo.find(key);
    if (it != units_memo.end()) return it->second;
    auto prob = expand(subs[ci], bound);
    auto relax = solve_lp(prob.lp());
    if (relax.status != LpStatus::Optimal) throw std::logic_error("relaxation must be solvable");
    std::int64_t cap = std::min(required, detail::floor_int64(relax.objective));
    std::int64_t got = routers[ci].max_units(bound, cap, counter);
    units_memo.emplace(key, got);
    return got;
  };
  auto feasible = [&](std::int64_t bound) {
    std::int64_t have = 0;
    for (std::size_t ci = 0; ci < subs.size(); ++ci) {
      have += std::min(component_units(ci, bound), required - have);
      if (have >= required) return true;
    }
    return false;
  };

  if (!feasible(levels.back())) return result;
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(levels[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  const std::int64_t answer = levels[lo];

  // Re-route at the answer to collect the witness, taking from each piece
  // only what is still needed.
  result.status = SolveStatus::Solved;
  result.optimal_value = answer;
  std::int64_t have = 0;
  for (std::size_t ci = 0; ci < subs.size() && have < required; ++ci) {
    std::int64_t want = std::min(component_units(ci, answer), required - have);
    if (want <= 0) continue;
    std::vector<std::vector<int>> units;
    std::int64_t got = routers[ci].max_units(answer, want, counter, &units);
    if (got != want) throw std::logic_error("witness re-route lost flow");
    have += got;
    for (const auto& unit : units) {
      std::vector<std::string> ids;
      for (int e : unit) ids.push_back(subs[ci].edges[e].id);
      if (!result.flow.paths.empty() && result.flow.paths.back().edges == ids)
        result.flow.paths.back().rate += Rational(1);
      else
        result.flow.paths.push_back({std::move(ids), Rational(1)});
    }
  }
  return result;
}

struct IntGapResult {
  Rational ratio;  // meaningful unless `infinite` is set
  bool infinite = false;
  std::int64_t int_optimum = 0;
  std::int64_t frac_optimum = 0;
};

// Ratio of the integer optimum to the fractional one. A zero fractional
// optimum with a positive integer optimum is reported through the
// `infinite` flag rather than a value.
inline IntGapResult int_gap(const GraphInstance& g, const SearchBudget& budget = {}) {
  auto frac = min_max_delay(g);
  if (frac.status != SolveStatus::Solved)
    throw InfeasibleError("required rate exceeds the maximum flow");
  auto whole = int_min_max_delay(g, budget);
  if (whole.status != SolveStatus::Solved)
    throw InfeasibleError("no integer flow meets the required rate");

  IntGapResult out;
  out.int_optimum = whole.optimal_value;
  out.frac_optimum = frac.optimal_value;
  if (frac.optimal_value == 0) {
    if (whole.optimal_value == 0)
      out.ratio = Rational(1);
    else
      out.infinite = true;
  } else {
    out.ratio = Rational(whole.optimal_value) / Rational(frac.optimal_value);
  }
  return out;
}

}  // namespace mmd
