#include <catch2/catch_amalgamated.hpp>

#include <minmaxdelay/gadgets.hpp>
#include <minmaxdelay/int_solver.hpp>
#include <minmaxdelay/oracle.hpp>

using namespace mmd;

namespace {

GraphInstance single_edge(std::int64_t cap, std::int64_t delay, Rational rate) {
  GraphInstance g;
  g.nodes = {"s", "t"};
  g.edges = {{"st", "s", "t", cap, delay}};
  g.source = "s";
  g.sink = "t";
  g.rate = std::move(rate);
  return g;
}

void check_witness(const GraphInstance& g, const IntSolveResult& r) {
  CHECK(validate_flow(g, r.flow).empty());
  CHECK(r.flow.total_rate() == g.rate);
  CHECK(max_delay(g, r.flow) == r.optimal_value);
  for (const auto& p : r.flow.paths) {
    CHECK(p.rate.is_integer());
    CHECK(p.rate.is_positive());
  }
}

}  // namespace

TEST_CASE("whole units must take turns on a ladder") {
  auto g3 = building_block(3);
  auto r3 = int_min_max_delay(g3);
  REQUIRE(r3.status == SolveStatus::Solved);
  CHECK(r3.optimal_value == 1);
  check_witness(g3, r3);

  auto g5 = building_block(5);
  auto r5 = int_min_max_delay(g5);
  REQUIRE(r5.status == SolveStatus::Solved);
  CHECK(r5.optimal_value == 2);
  check_witness(g5, r5);
}

TEST_CASE("single edge carries everything at its own delay") {
  auto g = single_edge(5, 7, Rational(3));
  auto r = int_min_max_delay(g);
  REQUIRE(r.status == SolveStatus::Solved);
  CHECK(r.optimal_value == 7);
  REQUIRE(r.flow.paths.size() == 1);
  CHECK(r.flow.paths[0].rate == Rational(3));

  auto gap = int_gap(g);
  CHECK_FALSE(gap.infinite);
  CHECK(gap.ratio == Rational(1));
}

TEST_CASE("element chains answer subset questions with whole flow") {
  auto even = partition_gadget({3, 1, 2});
  auto r = int_min_max_delay(even.instance);
  REQUIRE(r.status == SolveStatus::Solved);
  CHECK(r.optimal_value == 3);
  check_witness(even.instance, r);

  auto odd = partition_gadget({1, 1, 4});
  auto r2 = int_min_max_delay(odd.instance);
  REQUIRE(r2.status == SolveStatus::Solved);
  CHECK(r2.optimal_value == 4);
}

TEST_CASE("grouped chains split when a three-way division exists") {
  auto gadget = three_partition_gadget({5, 5, 6, 6, 7, 7});
  REQUIRE(gadget.b == 18);
  REQUIRE(gadget.instance.rate == Rational(2));
  auto r = int_min_max_delay(gadget.instance);
  REQUIRE(r.status == SolveStatus::Solved);
  CHECK(r.optimal_value == 18);
  check_witness(gadget.instance, r);
}

TEST_CASE("side-by-side ladders push whole units onto slow routes") {
  auto g3 = gap_composite(3);
  auto gap3 = int_gap(g3);
  CHECK(gap3.int_optimum == 1);
  CHECK(gap3.frac_optimum == 1);
  CHECK(gap3.ratio == Rational(1));

  auto g5 = gap_composite(5);
  auto r5 = int_min_max_delay(g5);
  REQUIRE(r5.status == SolveStatus::Solved);
  CHECK(r5.optimal_value == 2);
  check_witness(g5, r5);
  auto gap5 = int_gap(g5);
  CHECK(gap5.frac_optimum == 1);
  CHECK(gap5.ratio == Rational(2));
}

TEST_CASE("fractional rates are refused") {
  auto g = building_block(3);
  g.rate = Rational(3, 2);
  CHECK_THROWS_AS(int_min_max_delay(g), std::invalid_argument);
}

TEST_CASE("impossible rates come back infeasible") {
  auto g = single_edge(1, 4, Rational(2));
  auto r = int_min_max_delay(g);
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK(r.flow.paths.empty());
  CHECK_THROWS_AS(int_gap(g), InfeasibleError);
}

TEST_CASE("a starved budget raises instead of guessing") {
  SearchBudget tiny;
  tiny.max_nodes = 10;
  CHECK_THROWS_AS(int_min_max_delay(gap_composite(5), tiny), BudgetExceededError);
}

TEST_CASE("all-zero delays give a unit ratio") {
  GraphInstance g;
  g.nodes = {"s", "m", "t"};
  g.edges = {
      {"sm", "s", "m", 2, 0},
      {"mt", "m", "t", 2, 0},
  };
  g.source = "s";
  g.sink = "t";
  g.rate = Rational(2);
  auto gap = int_gap(g);
  CHECK_FALSE(gap.infinite);
  CHECK(gap.ratio == Rational(1));
  CHECK(gap.int_optimum == 0);
}

TEST_CASE("whole-flow search matches brute force on random instances") {
  int compared = 0;
  for (std::uint64_t seed = 500; seed < 530; ++seed) {
    auto g = random_instance(seed, 7, 11, 3, 4);
    if (!g.rate.is_integer()) continue;
    OracleAnswer expected;
    try {
      expected = oracle_int_min_max_delay(g);
    } catch (const BudgetExceededError&) {
      continue;
    }
    INFO("seed " << seed);
    auto got = int_min_max_delay(g);
    if (!expected.feasible) {
      CHECK(got.status == SolveStatus::Infeasible);
      continue;
    }
    REQUIRE(got.status == SolveStatus::Solved);
    CHECK(Rational(got.optimal_value) == expected.value);
    check_witness(g, got);
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("whole flow never beats the divisible optimum") {
  for (std::uint64_t seed = 800; seed < 812; ++seed) {
    auto g = random_instance(seed, 7, 11, 3, 4);
    auto frac = min_max_delay(g);
    if (frac.status != SolveStatus::Solved) continue;
    auto whole = int_min_max_delay(g);
    REQUIRE(whole.status == SolveStatus::Solved);
    INFO("seed " << seed);
    CHECK(whole.optimal_value >= frac.optimal_value);
    auto gap = int_gap(g);
    if (!gap.infinite) CHECK(gap.ratio >= Rational(1));
  }
}
