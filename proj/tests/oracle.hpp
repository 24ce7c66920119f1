#pragma once

// Brute-force reference implementations. They walk the expression terms in
// exact arithmetic and enumerate assignments directly, sharing no code with
// the evaluators and solvers under test.

#include "pcl/model.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using pcl::Configuration;
using pcl::ProblemModel;
using pcl::Rational;
using pcl::Value;

inline Rational eval_expr(const pcl::Expression& e, const std::vector<Value>& x) {
  Rational s = e.constant();
  for (const auto& t : e.indicators()) {
    bool all = true;
    for (const auto& l : t.literals) all = all && x[l.var] == l.value;
    if (all) s += t.coef;
  }
  for (const auto& t : e.linear()) s += t.coef * Rational(x[t.var]);
  return s;
}

inline Rational feature(const ProblemModel& m, std::size_t i, const std::vector<Value>& x) {
  const auto& f = m.features()[i];
  Rational e = eval_expr(f.expr, x);
  switch (f.transform.kind) {
    case pcl::TransformKind::identity:
      return e;
    case pcl::TransformKind::signed_indicator:
      return e > 0 ? Rational(1) : Rational(-1);
    case pcl::TransformKind::hinge:
      return e > f.transform.threshold ? Rational(e - f.transform.threshold) : Rational(0);
  }
  return e;
}

inline std::vector<Rational> features(const ProblemModel& m, const std::vector<Value>& x) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < m.num_features(); ++i) out.push_back(feature(m, i, x));
  return out;
}

inline bool satisfied(const pcl::Constraint& c, const std::vector<Value>& x) {
  for (const auto& l : c.guard)
    if (x[l.var] != l.value) return true;
  Rational e = eval_expr(c.expr, x);
  switch (c.sense) {
    case pcl::Sense::less_equal:
      return e <= c.rhs;
    case pcl::Sense::greater_equal:
      return e >= c.rhs;
    case pcl::Sense::equal:
      return e == c.rhs;
  }
  return false;
}

inline bool feasible(const ProblemModel& m, const std::vector<Value>& x) {
  for (const auto& c : m.constraints())
    if (!satisfied(c, x)) return false;
  return true;
}

inline double utility(const ProblemModel& m, const std::vector<double>& w, const std::vector<Value>& x,
                      const std::vector<std::size_t>* subset = nullptr) {
  double s = 0.0;
  if (subset) {
    for (auto i : *subset) s += w[i] * pcl::to_double(feature(m, i, x));
  } else {
    for (std::size_t i = 0; i < m.num_features(); ++i) s += w[i] * pcl::to_double(feature(m, i, x));
  }
  return s;
}

// Visits every assignment of `vars` (first variable most significant, values
// ascending), the rest of `base` held fixed.
inline void enumerate(const ProblemModel& m, const std::vector<std::size_t>& vars, std::vector<Value> base,
                      const std::function<void(const std::vector<Value>&)>& visit) {
  std::vector<std::size_t> idx(vars.size(), 0);
  for (std::size_t k = 0; k < vars.size(); ++k) base[vars[k]] = m.domains()[vars[k]][0];
  while (true) {
    visit(base);
    std::size_t k = vars.size();
    while (k > 0) {
      --k;
      if (++idx[k] < m.domains()[vars[k]].size()) {
        base[vars[k]] = m.domains()[vars[k]][idx[k]];
        break;
      }
      idx[k] = 0;
      base[vars[k]] = m.domains()[vars[k]][0];
      if (k == 0) return;
    }
    if (vars.empty()) return;
  }
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<Value> x;
  bool found = false;
};

// Lexicographically first maximiser among feasible completions.
inline Best best_over(const ProblemModel& m, const std::vector<double>& w, const std::vector<std::size_t>& vars,
                      const std::vector<Value>& base, const std::vector<std::size_t>* objective = nullptr) {
  Best best;
  enumerate(m, vars, base, [&](const std::vector<Value>& x) {
    if (!feasible(m, x)) return;
    double u = utility(m, w, x, objective);
    if (!best.found || u > best.value + pcl::kEpsilon) {
      best.value = u;
      best.x = x;
      best.found = true;
    }
  });
  return best;
}

inline std::vector<std::size_t> all_vars(const ProblemModel& m) {
  std::vector<std::size_t> v(m.num_variables());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = k;
  return v;
}

inline Best global_optimum(const ProblemModel& m, const std::vector<double>& w) {
  return best_over(m, w, all_vars(m), std::vector<Value>(m.num_variables(), 0));
}

// No single part can be reassigned to raise the full utility.
inline bool local_optimum(const ProblemModel& m, const std::vector<double>& w, const std::vector<Value>& x) {
  double here = utility(m, w, x);
  for (const auto& p : m.parts()) {
    bool better = false;
    enumerate(m, p.variables, x, [&](const std::vector<Value>& y) {
      if (!better && feasible(m, y) && utility(m, w, y) > here + pcl::kEpsilon) better = true;
    });
    if (better) return false;
  }
  return true;
}

}  // namespace oracle
