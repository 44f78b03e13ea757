#pragma once

#include <minmaxdelay/dc_max_flow.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mmd {

enum class SolveStatus { Solved, Infeasible };
enum class Branch { Accept, Reject };

// One probe of the search: the bound that was tried, the best rate that
// fits under it, and which way the interval moved.
struct IterationRecord {
  std::int64_t delay_bound;
  Rational rate;
  Branch branch;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  std::int64_t optimal_value = 0;  // smallest feasible max delay, when solved
  PathFlow flow;                   // carries exactly the required rate, when solved
  Rational max_flow_value;         // delay-unconstrained maximum rate
  std::vector<IterationRecord> iterations;
};

// Reduces a flow to total rate exactly R by shaving rate off paths in
// order of decreasing delay, breaking delay ties toward the
// lexicographically smallest edge-id sequence. Surviving paths keep
// their relative order.
inline PathFlow trim_to_rate(const GraphInstance& g, const PathFlow& flow, const Rational& target) {
  Rational total = flow.total_rate();
  if (total < target)
    throw std::invalid_argument("flow carries " + total.str() + " but " + target.str() +
                                " is required");

  std::vector<std::size_t> order(flow.paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::int64_t> delays(flow.paths.size());
  for (std::size_t i = 0; i < flow.paths.size(); ++i) delays[i] = path_delay(g, flow.paths[i].edges);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (delays[a] != delays[b]) return delays[a] > delays[b];
    return flow.paths[a].edges < flow.paths[b].edges;
  });

  std::vector<Rational> kept;
  for (const auto& p : flow.paths) kept.push_back(p.rate);
  Rational excess = total - target;
  for (std::size_t i : order) {
    if (excess.is_zero()) break;
    Rational cut = rational_min(kept[i], excess);
    kept[i] -= cut;
    excess -= cut;
  }

  PathFlow out;
  for (std::size_t i = 0; i < flow.paths.size(); ++i)
    if (kept[i].is_positive()) out.paths.push_back({flow.paths[i].edges, kept[i]});
  return out;
}

// Smallest T with r*(T) >= R, found by bisection on integer delay bounds.
// One unconstrained solve up front settles feasibility and doubles as the
// cached flow when every later probe rejects. Each probe is solved at the
// largest achievable sink arrival <= T, since bounds between consecutive
// arrivals all induce the same program; the memo is keyed the same way.
inline SolveReport min_max_delay(const GraphInstance& g) {
  require_valid(g);
  SolveReport report;

  const std::int64_t horizon = g.delay_horizon();
  const std::vector<std::int64_t> levels = achievable_sink_levels(g);
  auto clamp = [&](std::int64_t t) -> std::int64_t {
    auto it = std::upper_bound(levels.begin(), levels.end(), t);
    return it == levels.begin() ? -1 : *(it - 1);
  };

  std::map<std::int64_t, DcMaxFlowResult> memo;
  auto probe = [&](std::int64_t t) -> const DcMaxFlowResult& {
    std::int64_t key = clamp(t);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, dc_max_flow(g, std::max<std::int64_t>(key, 0))).first;
    return it->second;
  };

  const DcMaxFlowResult& unconstrained = probe(horizon);
  report.max_flow_value = unconstrained.value;
  bool feasible = unconstrained.value >= g.rate;
  report.iterations.push_back({horizon, unconstrained.value, feasible ? Branch::Accept : Branch::Reject});
  if (!feasible) return report;

  std::int64_t lo = 0;
  std::int64_t hi = horizon;
  const DcMaxFlowResult* accepted = &unconstrained;
  while (lo < hi) {
    std::int64_t t = lo + (hi - lo) / 2;
    const DcMaxFlowResult& res = probe(t);
    if (res.value >= g.rate) {
      report.iterations.push_back({t, res.value, Branch::Accept});
      hi = t;
      accepted = &res;
    } else {
      report.iterations.push_back({t, res.value, Branch::Reject});
      lo = t + 1;
    }
  }

  report.status = SolveStatus::Solved;
  report.optimal_value = lo;
  report.flow = trim_to_rate(g, accepted->path_flow, g.rate);
  return report;
}

}  // namespace mmd
