#pragma once

// Objective and constraints reduced to a set of free variables, with every
// other variable substituted by its fixed value. Shared by the exhaustive
// enumerator and branch-and-bound.

#include "pcl/inference.hpp"
#include "pcl/model.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace pcl::detail {

struct RLit {
  std::uint32_t slot;
  Value value;
};

struct RTerm {
  double coef;
  std::vector<RLit> lits;  // non-empty
  std::uint32_t last_slot;
};

struct RLin {
  double coef;
  std::uint32_t slot;
};

struct RExpr {
  double constant = 0.0;
  std::vector<RTerm> terms;
  std::vector<RLin> lin;

  double eval(const Value* vals) const;
  bool has_free() const { return !terms.empty() || !lin.empty(); }
};

struct RFactor {
  double weight;
  Transform transform;
  RExpr expr;
};

struct RConstraint {
  std::size_t id;
  std::vector<RLit> guard;
  RExpr expr;
  Sense sense;
  double rhs;
  std::uint32_t last_slot;

  bool holds(const Value* vals) const;
};

class ConditionalProblem {
 public:
  ConditionalProblem(const ProblemModel& model, std::span<const double> w,
                     std::span<const std::size_t> objective, std::vector<std::size_t> free_vars,
                     const Configuration& fixed);

  std::size_t size() const { return free_vars_.size(); }
  const std::vector<std::size_t>& free_vars() const { return free_vars_; }
  const std::vector<std::vector<Value>>& domains() const { return domains_; }

  double objective(const Value* vals) const;

  // Depth-first enumeration in lexicographic order. `on_leaf` receives every
  // feasible complete assignment; constraints are checked as soon as all of
  // their free variables are assigned. With `prune` set, subtrees whose
  // objective upper bound cannot beat `*incumbent` by more than kEpsilon are
  // skipped, as are subtrees a partially assigned constraint rules out.
  struct SearchResult {
    std::uint64_t nodes = 0;
    std::vector<std::size_t> violated;  // constraint ids that rejected a subtree
  };
  SearchResult search(const std::function<void(const Value*)>& on_leaf, bool prune,
                      const double* incumbent) const;

 private:
  void compile_bounds();
  double upper_bound(std::size_t depth, const Value* vals, const std::uint32_t* val_idx) const;
  bool constraint_possible(const RConstraint& c, std::size_t depth, const Value* vals) const;
  Interval expr_interval(const RExpr& e, std::size_t depth, const Value* vals) const;

  std::vector<std::size_t> free_vars_;
  std::vector<std::vector<Value>> domains_;
  double offset_ = 0.0;
  RExpr linear_;
  std::vector<RFactor> nonlinear_;
  std::vector<RConstraint> constraints_;
  std::vector<std::vector<std::size_t>> constraints_by_last_;  // slot -> constraint indices

  // Bound data for linear_: per-slot unary tables and multi-slot terms.
  std::vector<std::vector<double>> unary_;
  std::vector<double> unary_max_suffix_;  // sum of max unary over slots >= k
  std::vector<RTerm> multi_;

  mutable std::vector<double> scratch_;
  std::vector<std::size_t> scratch_offset_;
};

// Exact full inference by dynamic programming over the parts in declaration
// order. Throws InferenceTooLarge past `state_limit` states in one layer and
// InfeasibleError when no configuration is feasible.
FullInference solve_by_parts(const ProblemModel& model, std::span<const double> w,
                             std::span<const std::size_t> objective, std::size_t state_limit);

}  // namespace pcl::detail
