#pragma once

#include <minmaxdelay/rational.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mmd {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };

struct LinearTerm {
  int var;
  Rational coeff;
};

struct LpRow {
  std::string label;
  std::vector<LinearTerm> terms;
  Relation relation = Relation::LessEqual;
  Rational rhs;
};

// A linear program over named non-negative variables. Build it up with
// add_variable / set_objective / add_constraint, then hand it to solve_lp.
class LinearProgram {
 public:
  int add_variable(const std::string& name) {
    if (index_.count(name)) throw std::invalid_argument("duplicate variable '" + name + "'");
    int id = static_cast<int>(names_.size());
    index_.emplace(name, id);
    names_.push_back(name);
    objective_.push_back(Rational(0));
    return id;
  }

  int variable(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no variable '" + name + "'");
    return it->second;
  }

  int variable_count() const { return static_cast<int>(names_.size()); }
  const std::string& variable_name(int v) const { return names_.at(v); }

  void set_sense(Sense s) { sense_ = s; }
  Sense sense() const { return sense_; }

  void set_objective(int var, const Rational& coeff) { objective_.at(var) = coeff; }
  const std::vector<Rational>& objective() const { return objective_; }

  void add_constraint(std::string label, std::vector<LinearTerm> terms, Relation rel, Rational rhs) {
    for (const auto& t : terms)
      if (t.var < 0 || t.var >= variable_count())
        throw std::out_of_range("constraint references unknown variable");
    if (label.empty()) label = "r" + std::to_string(rows_.size());
    rows_.push_back({std::move(label), std::move(terms), rel, std::move(rhs)});
  }

  void add_constraint(std::vector<LinearTerm> terms, Relation rel, Rational rhs) {
    add_constraint("", std::move(terms), rel, std::move(rhs));
  }

  const std::vector<LpRow>& rows() const { return rows_; }

 private:
  Sense sense_ = Sense::Maximize;
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<Rational> objective_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> values;  // one per variable, empty unless Optimal
  Rational objective;
};

namespace detail {

// Two-phase primal simplex on a sparse exact-rational tableau. Rows are
// sorted (column, coefficient) vectors; a pivot touches only rows with a
// nonzero entry in the pivot column, which keeps the combinatorial LPs
// built elsewhere in this library cheap. Pivoting uses Dantzig's rule and
// falls back to Bland's rule during runs of degenerate pivots, so
// termination is guaranteed.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) {}

  LpSolution run() {
    build();
    if (!phase_one()) return {LpStatus::Infeasible, {}, Rational(0)};
    if (!phase_two()) return {LpStatus::Unbounded, {}, Rational(0)};
    return extract();
  }

 private:
  using Row = std::vector<std::pair<int, Rational>>;  // sorted by column

  static const Rational* find(const Row& row, int col) {
    auto it = std::lower_bound(row.begin(), row.end(), col,
                               [](const auto& e, int c) { return e.first < c; });
    if (it == row.end() || it->first != col) return nullptr;
    return &it->second;
  }

  // dst += scale * src, dropping entries that cancel to zero.
  static void axpy(Row& dst, const Rational& scale, const Row& src) {
    Row out;
    out.reserve(dst.size() + src.size());
    auto a = dst.begin();
    auto b = src.begin();
    while (a != dst.end() || b != src.end()) {
      if (b == src.end() || (a != dst.end() && a->first < b->first)) {
        out.push_back(std::move(*a++));
      } else if (a == dst.end() || b->first < a->first) {
        out.emplace_back(b->first, scale * b->second);
        ++b;
      } else {
        Rational v = a->second + scale * b->second;
        if (!v.is_zero()) out.emplace_back(a->first, std::move(v));
        ++a;
        ++b;
      }
    }
    dst = std::move(out);
  }

  void build() {
    int n = lp_.variable_count();
    int m = static_cast<int>(lp_.rows().size());
    // Column layout: structural, then slack/surplus, then artificial.
    int next_col = n;
    rows_.resize(m);
    rhs_.resize(m);
    basis_.resize(m);
    for (int i = 0; i < m; ++i) {
      const LpRow& src = lp_.rows()[i];
      std::map<int, Rational> acc;
      for (const auto& t : src.terms) {
        auto [it, fresh] = acc.emplace(t.var, t.coeff);
        if (!fresh) it->second += t.coeff;
      }
      Rational rhs = src.rhs;
      Relation rel = src.relation;
      bool flip = rhs.is_negative();
      if (flip) {
        rhs = -rhs;
        if (rel == Relation::LessEqual) rel = Relation::GreaterEqual;
        else if (rel == Relation::GreaterEqual) rel = Relation::LessEqual;
      }
      Row& row = rows_[i];
      for (auto& [col, c] : acc) {
        if (c.is_zero()) continue;
        row.emplace_back(col, flip ? -c : c);
      }
      rhs_[i] = rhs;
      if (rel == Relation::LessEqual) {
        row.emplace_back(next_col, Rational(1));
        basis_[i] = next_col++;
      } else if (rel == Relation::GreaterEqual) {
        row.emplace_back(next_col++, Rational(-1));
        basis_[i] = -1;  // artificial assigned below
      } else {
        basis_[i] = -1;
      }
    }
    art_begin_ = next_col;
    for (int i = 0; i < m; ++i)
      if (basis_[i] == -1) {
        rows_[i].emplace_back(next_col, Rational(1));
        basis_[i] = next_col++;
      }
    col_count_ = next_col;
    in_basis_.assign(col_count_, false);
    for (int b : basis_) in_basis_[b] = true;

    // Phase-2 reduced costs: -c per structural column (after adjusting the
    // sense so we always maximize internally).
    std::map<int, Rational> o2;
    for (int j = 0; j < n; ++j) {
      Rational c = lp_.objective()[j];
      if (lp_.sense() == Sense::Minimize) c = -c;
      if (!c.is_zero()) o2.emplace(j, -c);
    }
    obj2_.assign(o2.begin(), o2.end());
    rhs2_ = Rational(0);

    // Phase-1 reduced costs: minimize the artificial total, expressed as
    // maximizing its negation. Entries of artificial columns cancel to 0.
    std::map<int, Rational> o1;
    rhs1_ = Rational(0);
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < art_begin_) continue;
      for (const auto& [col, c] : rows_[i])
        if (col < art_begin_) {
          auto [it, fresh] = o1.emplace(col, -c);
          if (!fresh) {
            it->second -= c;
            if (it->second.is_zero()) o1.erase(it);
          }
        }
      rhs1_ -= rhs_[i];
    }
    obj1_.assign(o1.begin(), o1.end());
  }

  void pivot(int r, int c) {
    const Rational* p = find(rows_[r], c);
    Rational inv = Rational(1) / *p;
    for (auto& [col, v] : rows_[r]) v *= inv;
    rhs_[r] *= inv;
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      if (i == r) continue;
      const Rational* a = find(rows_[i], c);
      if (!a) continue;
      Rational scale = -*a;
      axpy(rows_[i], scale, rows_[r]);
      rhs_[i] += scale * rhs_[r];
    }
    for (Row* obj : {&obj1_, &obj2_}) {
      const Rational* a = find(*obj, c);
      if (!a) continue;
      Rational scale = -*a;
      Rational& rhs = obj == &obj1_ ? rhs1_ : rhs2_;
      axpy(*obj, scale, rows_[r]);
      rhs += scale * rhs_[r];
    }
    in_basis_[basis_[r]] = false;
    basis_[r] = c;
    in_basis_[c] = true;
  }

  // Most negative reduced cost (Dantzig) or first negative (Bland);
  // artificial columns never re-enter.
  int entering(const Row& obj) const {
    int best = -1;
    const Rational* best_val = nullptr;
    for (const auto& [col, v] : obj) {
      if (col >= art_begin_ || in_basis_[col] || !v.is_negative()) continue;
      if (bland_) return col;
      if (!best_val || v < *best_val) {
        best = col;
        best_val = &v;
      }
    }
    return best;
  }

  int leaving(int c) const {
    int best = -1;
    const Rational* best_num = nullptr;
    const Rational* best_den = nullptr;
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      const Rational* a = find(rows_[i], c);
      if (!a || !a->is_positive()) continue;
      if (best == -1) {
        best = i;
        best_num = &rhs_[i];
        best_den = a;
        continue;
      }
      // Compare rhs_i / a_i with the incumbent without dividing.
      Rational lhs = rhs_[i] * *best_den;
      Rational rhs = *best_num * *a;
      if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[best])) {
        best = i;
        best_num = &rhs_[i];
        best_den = a;
      }
    }
    return best;
  }

  // Bland's rule switches on after a run of degenerate pivots and off again
  // at the first strict improvement. Any non-terminating pivot sequence has
  // an all-degenerate suffix, so from some point on Bland stays engaged and
  // its termination guarantee applies.
  void note_pivot(int r) {
    if (rhs_[r].is_zero()) {
      if (++stalled_ >= kStallLimit) bland_ = true;
    } else {
      stalled_ = 0;
      bland_ = false;
    }
  }

  bool phase_one() {
    if (art_begin_ == col_count_) return true;
    while (true) {
      int c = entering(obj1_);
      if (c == -1) break;
      int r = leaving(c);
      if (r == -1) break;  // cannot happen: the artificial total is bounded
      note_pivot(r);
      pivot(r, c);
    }
    if (rhs1_.is_negative()) return false;
    // Pivot leftover artificials out on any live column. Rows that are
    // zero everywhere else are redundant and stay inert.
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      if (basis_[i] < art_begin_) continue;
      for (const auto& [col, v] : rows_[i]) {
        if (col >= art_begin_ || v.is_zero()) continue;
        pivot(i, col);
        break;
      }
    }
    // Artificial columns are done for good; drop their entries from live rows.
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      if (basis_[i] >= art_begin_) continue;
      auto& row = rows_[i];
      row.erase(std::remove_if(row.begin(), row.end(),
                               [&](const auto& e) { return e.first >= art_begin_; }),
                row.end());
    }
    for (Row* obj : {&obj1_, &obj2_})
      obj->erase(std::remove_if(obj->begin(), obj->end(),
                                [&](const auto& e) { return e.first >= art_begin_; }),
                 obj->end());
    bland_ = false;
    stalled_ = 0;
    return true;
  }

  bool phase_two() {
    while (true) {
      int c = entering(obj2_);
      if (c == -1) return true;
      int r = leaving(c);
      if (r == -1) return false;
      note_pivot(r);
      pivot(r, c);
    }
  }

  LpSolution extract() const {
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.values.assign(lp_.variable_count(), Rational(0));
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i)
      if (basis_[i] < lp_.variable_count()) sol.values[basis_[i]] = rhs_[i];
    for (int j = 0; j < lp_.variable_count(); ++j)
      sol.objective += lp_.objective()[j] * sol.values[j];
    return sol;
  }

  static constexpr int kStallLimit = 96;

  const LinearProgram& lp_;
  std::vector<Row> rows_;
  std::vector<Rational> rhs_;
  Row obj1_, obj2_;
  Rational rhs1_, rhs2_;
  std::vector<int> basis_;
  std::vector<bool> in_basis_;
  int art_begin_ = 0;
  int col_count_ = 0;
  bool bland_ = false;
  int stalled_ = 0;
};

namespace presolve {

// Union-find over variables carrying x_child = alpha * x_root. A fixed
// variable is represented as alpha = 0 (its value is forced to zero).
struct Substitution {
  std::vector<int> parent;
  std::vector<Rational> alpha;  // value relative to parent
  long revision = 0;            // bumped on every structural change

  explicit Substitution(int n) : parent(n), alpha(n, Rational(1)) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }

  std::pair<int, Rational> find(int v) {
    if (parent[v] == v) return {v, alpha[v]};
    auto [root, a] = find(parent[v]);
    parent[v] = root;
    alpha[v] = alpha[v] * a;
    return {root, alpha[v]};
  }

  void fix_zero(int v) {
    auto [root, a] = find(v);
    if (!alpha[root].is_zero()) {
      alpha[root] = Rational(0);  // children pick this up lazily through find()
      ++revision;
    }
  }

  // Record x_a * ca + x_b * cb = 0, i.e. x_b = -(ca/cb) x_a.
  void merge(int a, const Rational& ca, int b, const Rational& cb) {
    auto [ra, fa] = find(a);
    auto [rb, fb] = find(b);
    if (fa.is_zero() || fb.is_zero()) {
      // One side already zero forces the other to zero as well.
      fix_zero(a);
      fix_zero(b);
      return;
    }
    // In root terms: (ca*fa) x_ra + (cb*fb) x_rb = 0.
    Rational scale = -(ca * fa) / (cb * fb);
    if (ra == rb) {
      if (!(scale == Rational(1))) fix_zero(ra);
      return;
    }
    if (scale.is_positive()) {
      parent[rb] = ra;
      alpha[rb] = scale;
      ++revision;
    } else {
      // Non-negative variables with a negative ratio are both zero.
      fix_zero(ra);
      fix_zero(rb);
    }
  }
};

}  // namespace presolve

// Exact reduction pass before the simplex: homogeneous equalities with at
// most two surviving terms pin variables to zero or glue them together
// (conservation rows of series edges are the main customers). The reduced
// program has the same optimal value; solutions are mapped back through
// the substitution.
inline LpSolution solve_reduced(const LinearProgram& lp) {
  int n = lp.variable_count();
  presolve::Substitution subst(n);

  // Repeatedly sweep the homogeneous equalities; merging can shorten other
  // rows, so iterate until a sweep changes nothing.
  long seen = -1;
  while (seen != subst.revision) {
    seen = subst.revision;
    for (const auto& row : lp.rows()) {
      if (row.relation != Relation::Equal || !row.rhs.is_zero()) continue;
      std::map<int, Rational> acc;
      for (const auto& t : row.terms) {
        auto [root, a] = subst.find(t.var);
        if (a.is_zero()) continue;
        auto [it, fresh] = acc.emplace(root, t.coeff * a);
        if (!fresh) it->second += t.coeff * a;
      }
      std::erase_if(acc, [](const auto& e) { return e.second.is_zero(); });
      if (acc.size() == 1) {
        subst.fix_zero(acc.begin()->first);
      } else if (acc.size() == 2) {
        auto it = acc.begin();
        auto [va, ca] = *it++;
        auto [vb, cb] = *it;
        subst.merge(va, ca, vb, cb);
      }
    }
  }

  // Number the surviving roots.
  std::vector<int> root_var(n, -1);
  LinearProgram reduced;
  reduced.set_sense(lp.sense());
  for (int v = 0; v < n; ++v) {
    auto [root, a] = subst.find(v);
    if (a.is_zero() || root_var[root] != -1) continue;
    root_var[root] = reduced.add_variable(lp.variable_name(root));
  }

  auto reduce_terms = [&](const std::vector<LinearTerm>& terms) {
    std::map<int, Rational> acc;
    for (const auto& t : terms) {
      auto [root, a] = subst.find(t.var);
      if (a.is_zero()) continue;
      auto [it, fresh] = acc.emplace(root_var[root], t.coeff * a);
      if (!fresh) it->second += t.coeff * a;
    }
    std::vector<LinearTerm> out;
    for (const auto& [v, c] : acc)
      if (!c.is_zero()) out.push_back({v, c});
    return out;
  };

  for (int v = 0; v < n; ++v) {
    if (lp.objective()[v].is_zero()) continue;
    auto [root, a] = subst.find(v);
    if (a.is_zero()) continue;
    int rv = root_var[root];
    reduced.set_objective(rv, reduced.objective()[rv] + lp.objective()[v] * a);
  }

  bool infeasible_row = false;
  for (const auto& row : lp.rows()) {
    auto terms = reduce_terms(row.terms);
    if (terms.empty()) {
      bool ok = row.relation == Relation::LessEqual  ? !row.rhs.is_negative()
                : row.relation == Relation::Equal    ? row.rhs.is_zero()
                                                     : !row.rhs.is_positive();
      if (!ok) infeasible_row = true;
      continue;
    }
    reduced.add_constraint(row.label, std::move(terms), row.relation, row.rhs);
  }
  if (infeasible_row) return {LpStatus::Infeasible, {}, Rational(0)};

  auto sol = detail::Simplex(reduced).run();
  if (sol.status != LpStatus::Optimal) return sol;

  LpSolution out;
  out.status = LpStatus::Optimal;
  out.objective = sol.objective;
  out.values.assign(n, Rational(0));
  for (int v = 0; v < n; ++v) {
    auto [root, a] = subst.find(v);
    if (a.is_zero()) continue;
    out.values[v] = a * sol.values[root_var[root]];
  }
  return out;
}

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp) { return detail::solve_reduced(lp); }

struct SolutionCheck {
  std::vector<int> violated_rows;
  bool objective_matches = true;

  bool ok() const { return violated_rows.empty() && objective_matches; }
};

// Replays a claimed optimal solution against the constraints and the
// objective, entirely independently of the solver's tableau.
inline SolutionCheck check_solution(const LinearProgram& lp, const LpSolution& sol) {
  SolutionCheck out;
  if (sol.status != LpStatus::Optimal || static_cast<int>(sol.values.size()) != lp.variable_count()) {
    out.objective_matches = false;
    return out;
  }
  for (int i = 0; i < static_cast<int>(lp.rows().size()); ++i) {
    const LpRow& row = lp.rows()[i];
    Rational lhs;
    for (const auto& t : row.terms) lhs += t.coeff * sol.values[t.var];
    bool good = row.relation == Relation::LessEqual  ? lhs <= row.rhs
                : row.relation == Relation::Equal    ? lhs == row.rhs
                                                     : lhs >= row.rhs;
    if (!good) out.violated_rows.push_back(i);
  }
  for (const auto& v : sol.values)
    if (v.is_negative()) out.objective_matches = false;
  Rational obj;
  for (int j = 0; j < lp.variable_count(); ++j) obj += lp.objective()[j] * sol.values[j];
  if (obj != sol.objective) out.objective_matches = false;
  return out;
}

// Human-readable listing of the whole program, one constraint per line.
inline std::string lp_dump(const LinearProgram& lp) {
  auto term_string = [&](const std::vector<LinearTerm>& terms) {
    if (terms.empty()) return std::string("0");
    std::string out;
    bool first = true;
    for (const auto& t : terms) {
      Rational c = t.coeff;
      if (c.is_zero()) continue;
      std::string sign = c.is_negative() ? "-" : "+";
      if (c.is_negative()) c = -c;
      if (first) {
        if (sign == "-") out += "-";
        first = false;
      } else {
        out += " " + sign + " ";
      }
      if (!(c == Rational(1))) out += c.str() + " ";
      out += lp.variable_name(t.var);
    }
    if (out.empty()) return std::string("0");
    return out;
  };

  std::vector<LinearTerm> obj;
  for (int j = 0; j < lp.variable_count(); ++j)
    if (!lp.objective()[j].is_zero()) obj.push_back({j, lp.objective()[j]});
  std::string out = lp.sense() == Sense::Maximize ? "maximize " : "minimize ";
  out += term_string(obj) + "\nsubject to\n";
  for (const auto& row : lp.rows()) {
    const char* rel = row.relation == Relation::LessEqual  ? "<="
                      : row.relation == Relation::Equal    ? "="
                                                           : ">=";
    out += "  " + row.label + ": " + term_string(row.terms) + " " + rel + " " + row.rhs.str() + "\n";
  }
  out += "non-negative variables: " + std::to_string(lp.variable_count()) + "\n";
  return out;
}

}  // namespace mmd
