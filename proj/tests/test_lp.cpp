#include <catch2/catch_amalgamated.hpp>

#include <minmaxdelay/lp.hpp>

#include <optional>
#include <random>
#include <vector>

using namespace mmd;

namespace {

// Solve a square rational system by Gaussian elimination; nullopt when
// singular. Used by the vertex-enumeration oracle below.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a,
                                                  std::vector<Rational> b) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv == -1) return std::nullopt;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      Rational f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Exhaustive optimum of a bounded LP: enumerate every basic point (each
// choice of n constraints made tight, including the x_j >= 0 bounds),
// keep the feasible ones, and take the best objective. Returns nullopt
// when no feasible point exists.
std::optional<Rational> brute_force_optimum(const LinearProgram& lp) {
  int n = lp.variable_count();
  struct Plane {
    std::vector<Rational> coeff;
    Rational rhs;
  };
  std::vector<Plane> planes;
  for (const auto& row : lp.rows()) {
    Plane p;
    p.coeff.assign(n, Rational(0));
    for (const auto& t : row.terms) p.coeff[t.var] += t.coeff;
    p.rhs = row.rhs;
    planes.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    Plane p;
    p.coeff.assign(n, Rational(0));
    p.coeff[j] = Rational(1);
    planes.push_back(std::move(p));
  }

  auto feasible = [&](const std::vector<Rational>& x) {
    for (const auto& v : x)
      if (v.is_negative()) return false;
    for (const auto& row : lp.rows()) {
      Rational lhs;
      for (const auto& t : row.terms) lhs += t.coeff * x[t.var];
      bool ok = row.relation == Relation::LessEqual  ? lhs <= row.rhs
                : row.relation == Relation::Equal    ? lhs == row.rhs
                                                     : lhs >= row.rhs;
      if (!ok) return false;
    }
    return true;
  };

  std::optional<Rational> best;
  int p = static_cast<int>(planes.size());
  std::vector<int> pick(n, 0);
  auto visit = [&](const std::vector<int>& idx) {
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (int i : idx) {
      a.push_back(planes[i].coeff);
      b.push_back(planes[i].rhs);
    }
    auto x = solve_square(std::move(a), std::move(b));
    if (!x || !feasible(*x)) return;
    Rational obj;
    for (int j = 0; j < n; ++j) obj += lp.objective()[j] * (*x)[j];
    bool better = lp.sense() == Sense::Maximize ? (!best || obj > *best) : (!best || obj < *best);
    if (better) best = obj;
  };
  // All size-n subsets of the planes.
  std::vector<int> idx(n);
  auto rec = [&](auto&& self, int pos, int from) -> void {
    if (pos == n) {
      visit(idx);
      return;
    }
    for (int i = from; i < p; ++i) {
      idx[pos] = i;
      self(self, pos + 1, i + 1);
    }
  };
  if (n > 0) rec(rec, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("two independent bounds") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  int y = lp.add_variable("y");
  lp.set_objective(x, Rational(1));
  lp.set_objective(y, Rational(1));
  lp.add_constraint({{x, Rational(1)}}, Relation::LessEqual, Rational(1));
  lp.add_constraint({{y, Rational(1)}}, Relation::LessEqual, Rational(2));
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(3));
  CHECK(sol.values[x] == Rational(1));
  CHECK(sol.values[y] == Rational(2));
  CHECK(check_solution(lp, sol).ok());
}

TEST_CASE("conflicting bounds are infeasible") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  lp.set_objective(x, Rational(1));
  lp.add_constraint({{x, Rational(1)}}, Relation::GreaterEqual, Rational(2));
  lp.add_constraint({{x, Rational(1)}}, Relation::LessEqual, Rational(1));
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("missing bound means unbounded") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  lp.set_objective(x, Rational(1));
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);

  lp.add_constraint({{x, Rational(-1)}}, Relation::LessEqual, Rational(5));
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("fractional vertex is found exactly") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  int y = lp.add_variable("y");
  lp.set_objective(x, Rational(3));
  lp.set_objective(y, Rational(2));
  lp.add_constraint({{x, Rational(1)}, {y, Rational(1)}}, Relation::LessEqual, Rational(4));
  lp.add_constraint({{x, Rational(1)}, {y, Rational(-1)}}, Relation::Equal, Rational(1));
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(21, 2));
  CHECK(sol.values[x] == Rational(5, 2));
  CHECK(sol.values[y] == Rational(3, 2));
}

TEST_CASE("minimization with lower bounds") {
  LinearProgram lp;
  lp.set_sense(Sense::Minimize);
  int x = lp.add_variable("x");
  int y = lp.add_variable("y");
  lp.set_objective(x, Rational(1));
  lp.set_objective(y, Rational(1));
  lp.add_constraint({{x, Rational(1)}, {y, Rational(2)}}, Relation::GreaterEqual, Rational(4));
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(2));
  CHECK(sol.values[y] == Rational(2));
}

TEST_CASE("negative right-hand sides are normalized") {
  LinearProgram lp;
  lp.set_sense(Sense::Minimize);
  int x = lp.add_variable("x");
  lp.set_objective(x, Rational(1));
  // -x <= -3 is x >= 3 in disguise.
  lp.add_constraint({{x, Rational(-1)}}, Relation::LessEqual, Rational(-3));
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(3));
}

TEST_CASE("duplicate terms in a constraint are merged") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  lp.set_objective(x, Rational(1));
  lp.add_constraint({{x, Rational(1)}, {x, Rational(1)}}, Relation::LessEqual, Rational(1));
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(1, 2));
}

TEST_CASE("empty programs and constant rows") {
  LinearProgram lp;
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(0));

  lp.add_constraint({}, Relation::LessEqual, Rational(1));
  CHECK(solve_lp(lp).status == LpStatus::Optimal);

  lp.add_constraint({}, Relation::LessEqual, Rational(-1));
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("degenerate program known to cycle under naive pivoting") {
  // Classic construction that loops forever with most-negative pivoting
  // and naive tie-breaks; the stall fallback must get through it.
  LinearProgram lp;
  int x1 = lp.add_variable("x1");
  int x2 = lp.add_variable("x2");
  int x3 = lp.add_variable("x3");
  int x4 = lp.add_variable("x4");
  lp.set_objective(x1, Rational(3, 4));
  lp.set_objective(x2, Rational(-150));
  lp.set_objective(x3, Rational(1, 50));
  lp.set_objective(x4, Rational(-6));
  lp.add_constraint({{x1, Rational(1, 4)}, {x2, Rational(-60)}, {x3, Rational(-1, 25)}, {x4, Rational(9)}},
                    Relation::LessEqual, Rational(0));
  lp.add_constraint({{x1, Rational(1, 2)}, {x2, Rational(-90)}, {x3, Rational(-1, 50)}, {x4, Rational(3)}},
                    Relation::LessEqual, Rational(0));
  lp.add_constraint({{x3, Rational(1)}}, Relation::LessEqual, Rational(1));
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == Rational(1, 20));
  CHECK(check_solution(lp, sol).ok());
}

TEST_CASE("check_solution flags violations and bad objectives") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  lp.set_objective(x, Rational(1));
  lp.add_constraint({{x, Rational(1)}}, Relation::LessEqual, Rational(2));
  LpSolution forged;
  forged.status = LpStatus::Optimal;
  forged.values = {Rational(3)};
  forged.objective = Rational(3);
  auto check = check_solution(lp, forged);
  CHECK_FALSE(check.ok());
  REQUIRE(check.violated_rows.size() == 1);
  CHECK(check.violated_rows[0] == 0);

  forged.values = {Rational(2)};
  forged.objective = Rational(5);  // wrong total
  CHECK_FALSE(check_solution(lp, forged).ok());

  forged.objective = Rational(2);
  CHECK(check_solution(lp, forged).ok());
}

TEST_CASE("dump lists objective and rows") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  int y = lp.add_variable("y");
  lp.set_objective(x, Rational(2));
  lp.set_objective(y, Rational(-1, 2));
  lp.add_constraint("cap", {{x, Rational(1)}, {y, Rational(1)}}, Relation::LessEqual, Rational(3));
  auto text = lp_dump(lp);
  CHECK(text.find("maximize 2 x - 1/2 y") != std::string::npos);
  CHECK(text.find("cap: x + y <= 3") != std::string::npos);
  CHECK(text.find("non-negative variables: 2") != std::string::npos);
}

TEST_CASE("random bounded programs match exhaustive vertex search") {
  std::mt19937_64 rng(2024);
  auto draw = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  for (int round = 0; round < 120; ++round) {
    int n = static_cast<int>(draw(1, 3));
    int m = static_cast<int>(draw(1, 4));
    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.add_variable("x" + std::to_string(j));
    for (int j = 0; j < n; ++j) lp.set_objective(j, Rational(draw(-3, 3), draw(1, 2)));
    for (int i = 0; i < m; ++i) {
      std::vector<LinearTerm> terms;
      for (int j = 0; j < n; ++j) {
        Rational c(draw(-3, 3), draw(1, 2));
        if (!c.is_zero()) terms.push_back({j, c});
      }
      Relation rel = static_cast<Relation>(draw(0, 2));
      lp.add_constraint(std::move(terms), rel, Rational(draw(-2, 6)));
    }
    // Box every variable so the program is never unbounded.
    for (int j = 0; j < n; ++j)
      lp.add_constraint({{j, Rational(1)}}, Relation::LessEqual, Rational(10));

    auto expected = brute_force_optimum(lp);
    auto sol = solve_lp(lp);
    if (!expected) {
      CHECK(sol.status == LpStatus::Infeasible);
    } else {
      REQUIRE(sol.status == LpStatus::Optimal);
      CHECK(sol.objective == *expected);
      CHECK(check_solution(lp, sol).ok());
    }
  }
}
