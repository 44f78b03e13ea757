#pragma once

#include <minmaxdelay/instance.hpp>

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmd {

// Chain with a zero-delay bypass around every link. Routing rate 2 through
// it forces two unit paths that split the links between them, so the best
// achievable max delay is the best achievable subset balance of A.
struct PartitionGadget {
  GraphInstance instance;
  Rational threshold;  // half the sum of A
};

inline PartitionGadget partition_gadget(const std::vector<std::int64_t>& a) {
  if (a.empty()) throw std::invalid_argument("element list is empty");
  std::int64_t sum = 0;
  for (std::int64_t x : a) {
    if (x <= 0) throw std::invalid_argument("elements must be positive integers");
    sum += x;
  }
  PartitionGadget out;
  GraphInstance& g = out.instance;
  int n = static_cast<int>(a.size());
  g.nodes.push_back("w0");
  for (int i = 1; i <= n; ++i) {
    g.nodes.push_back("v" + std::to_string(i));
    g.nodes.push_back("w" + std::to_string(i));
  }
  for (int i = 1; i <= n; ++i) {
    std::string wp = "w" + std::to_string(i - 1);
    std::string wi = "w" + std::to_string(i);
    std::string vi = "v" + std::to_string(i);
    g.edges.push_back({"dash_" + std::to_string(i), wp, wi, 1, a[i - 1]});
    g.edges.push_back({"bypass_in_" + std::to_string(i), wp, vi, 1, 0});
    g.edges.push_back({"bypass_out_" + std::to_string(i), vi, wi, 1, 0});
  }
  g.source = "w0";
  g.sink = "w" + std::to_string(n);
  g.rate = Rational(2);
  out.threshold = Rational(sum, 2);
  return out;
}

// Variant with k-1 parallel bypass branches per link and rate k. With
// |A| = 3k elements summing to k*b and every element strictly between b/4
// and b/2, a max delay of b is achievable exactly when A splits into k
// triples of sum b.
struct ThreePartitionGadget {
  GraphInstance instance;
  std::int64_t b = 0;
  std::int64_t k = 0;
};

inline ThreePartitionGadget three_partition_gadget(const std::vector<std::int64_t>& a) {
  if (a.size() % 3 != 0 || a.empty())
    throw std::invalid_argument("element count must be a positive multiple of 3");
  std::int64_t k = static_cast<std::int64_t>(a.size()) / 3;
  std::int64_t sum = 0;
  for (std::int64_t x : a) {
    if (x <= 0) throw std::invalid_argument("elements must be positive integers");
    sum += x;
  }
  if (sum % k != 0)
    throw std::invalid_argument("element sum must be divisible by the group count " + std::to_string(k));
  std::int64_t b = sum / k;
  for (std::int64_t x : a) {
    // Strict b/4 < x < b/2, kept in integers.
    if (!(4 * x > b && 2 * x < b))
      throw std::invalid_argument("element " + std::to_string(x) + " is not strictly between " +
                                  std::to_string(b) + "/4 and " + std::to_string(b) + "/2");
  }
  ThreePartitionGadget out;
  out.b = b;
  out.k = k;
  GraphInstance& g = out.instance;
  int n = static_cast<int>(a.size());
  g.nodes.push_back("w0");
  for (int i = 1; i <= n; ++i) {
    for (std::int64_t m = 1; m < k; ++m)
      g.nodes.push_back("v" + std::to_string(i) + "_" + std::to_string(m));
    g.nodes.push_back("w" + std::to_string(i));
  }
  for (int i = 1; i <= n; ++i) {
    std::string wp = "w" + std::to_string(i - 1);
    std::string wi = "w" + std::to_string(i);
    g.edges.push_back({"dash_" + std::to_string(i), wp, wi, 1, a[i - 1]});
    for (std::int64_t m = 1; m < k; ++m) {
      std::string vi = "v" + std::to_string(i) + "_" + std::to_string(m);
      std::string suffix = std::to_string(i) + "_" + std::to_string(m);
      g.edges.push_back({"bypass_in_" + suffix, wp, vi, 1, 0});
      g.edges.push_back({"bypass_out_" + suffix, vi, wi, 1, 0});
    }
  }
  g.source = "w0";
  g.sink = "w" + std::to_string(n);
  g.rate = Rational(k);
  return out;
}

// Ladder of n nodes where consecutive nodes are joined by a unit-capacity
// delay-1 edge (dash_i) and a parallel unit-capacity delay-0 edge
// (solid_i). The caller chooses the rate to demand from it.
inline GraphInstance building_block(int n, const Rational& rate = Rational(2)) {
  if (n < 3) throw std::invalid_argument("block needs at least 3 nodes");
  GraphInstance g;
  for (int i = 1; i <= n; ++i) g.nodes.push_back("a" + std::to_string(i));
  for (int i = 1; i < n; ++i) {
    std::string u = "a" + std::to_string(i);
    std::string v = "a" + std::to_string(i + 1);
    g.edges.push_back({"dash_" + std::to_string(i), u, v, 1, 1});
    g.edges.push_back({"solid_" + std::to_string(i), u, v, 1, 0});
  }
  g.source = "a1";
  g.sink = "a" + std::to_string(n);
  g.rate = rate;
  return g;
}

// n-2 disjoint ladders strung between a fresh source and sink, with
// capacity-2 zero-delay connectors, at rate n-1. Fractionally the rate
// spreads so every carrying path has delay 1, while any integer routing
// must push 2 whole units through some ladder and pay ceil((n-1)/2).
inline GraphInstance gap_composite(int n) {
  if (n < 3) throw std::invalid_argument("composite needs at least 3 nodes per ladder");
  GraphInstance g;
  g.nodes.push_back("s");
  int blocks = n - 2;
  for (int j = 1; j <= blocks; ++j) {
    std::string p = "b" + std::to_string(j) + "_";
    for (int i = 1; i <= n; ++i) g.nodes.push_back(p + "a" + std::to_string(i));
    for (int i = 1; i < n; ++i) {
      std::string u = p + "a" + std::to_string(i);
      std::string v = p + "a" + std::to_string(i + 1);
      g.edges.push_back({p + "dash_" + std::to_string(i), u, v, 1, 1});
      g.edges.push_back({p + "solid_" + std::to_string(i), u, v, 1, 0});
    }
    g.edges.push_back({"src_" + std::to_string(j), "s", p + "a1", 2, 0});
    g.edges.push_back({"snk_" + std::to_string(j), p + "a" + std::to_string(n), "t", 2, 0});
  }
  g.nodes.push_back("t");
  g.source = "s";
  g.sink = "t";
  g.rate = Rational(n - 1);
  return g;
}

namespace detail {

// Uniform draw from [0, n). std::uniform_int_distribution is not pinned
// down across standard libraries, so outputs would differ by platform;
// rejection sampling over the raw engine is reproducible everywhere.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline std::int64_t draw_range(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(draw(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace detail

// Seeded random instance: `nodes` nodes, `edges` edges with capacities in
// [1, max_capacity] and delays in [0, max_delay], rate in [1, 3]. The
// first node is the source and the last the sink; draws are retried until
// the sink is reachable and no zero-delay cycle remains.
inline GraphInstance random_instance(std::uint64_t seed, int nodes, int edges,
                                     std::int64_t max_capacity, std::int64_t max_delay) {
  if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
  if (edges < 1) throw std::invalid_argument("need at least 1 edge");
  if (max_capacity < 1) throw std::invalid_argument("max capacity must be at least 1");
  if (max_delay < 0) throw std::invalid_argument("max delay must be non-negative");
  std::mt19937_64 rng(seed);
  GraphInstance g;
  for (int i = 0; i < nodes; ++i) g.nodes.push_back("n" + std::to_string(i));
  g.source = g.nodes.front();
  g.sink = g.nodes.back();
  g.rate = Rational(detail::draw_range(rng, 1, 3));

  for (int attempt = 0; attempt < 64; ++attempt) {
    g.edges.clear();
    for (int e = 0; e < edges; ++e) {
      int u = static_cast<int>(detail::draw(rng, nodes));
      int v;
      do {
        v = static_cast<int>(detail::draw(rng, nodes));
      } while (v == u);
      g.edges.push_back({"e" + std::to_string(e), g.nodes[u], g.nodes[v],
                         detail::draw_range(rng, 1, max_capacity),
                         detail::draw_range(rng, 0, max_delay)});
    }
    auto ix = detail::IndexedGraph::build(g);
    // Break zero-delay cycles by giving one of their edges real delay.
    while (max_delay > 0 && detail::has_zero_delay_cycle(ix)) {
      for (auto& e : g.edges)
        if (e.delay == 0) {
          e.delay = detail::draw_range(rng, 1, max_delay);
          break;
        }
      ix = detail::IndexedGraph::build(g);
    }
    if (detail::has_zero_delay_cycle(ix)) continue;

    std::vector<char> reach(nodes, 0);
    std::vector<int> stack = {ix.source};
    reach[ix.source] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int e : ix.out_edges[v])
        if (!reach[ix.edge_head[e]]) {
          reach[ix.edge_head[e]] = 1;
          stack.push_back(ix.edge_head[e]);
        }
    }
    if (reach[ix.sink]) return g;
  }
  throw std::runtime_error("could not draw a usable instance for this seed");
}

}  // namespace mmd
