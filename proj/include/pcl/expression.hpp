#pragma once

#include "pcl/common.hpp"

#include <span>
#include <vector>

namespace pcl {

struct Literal {
  std::size_t var = 0;
  Value value = 0;

  bool operator==(const Literal&) const = default;
};

// coef * [l_1 and l_2 and ...]; an empty conjunction is always true.
struct IndicatorTerm {
  Rational coef;
  std::vector<Literal> literals;
  double coef_d = 0.0;
};

// coef * value(var)
struct LinearTerm {
  Rational coef;
  std::size_t var = 0;
  double coef_d = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sum of indicator conjunctions and linear terms over integer-coded
/// variables, plus a constant. This is the only expression form used by
/// features and hard constraints.
class Expression {
 public:
  Expression() = default;

  Expression& add_constant(const Rational& c);
  Expression& add_indicator(const Rational& coef, std::vector<Literal> literals);
  Expression& add_linear(const Rational& coef, std::size_t var);

  const Rational& constant() const { return constant_; }
  double constant_d() const { return constant_d_; }
  const std::vector<IndicatorTerm>& indicators() const { return indicators_; }
  const std::vector<LinearTerm>& linear() const { return linear_; }

  double evaluate(std::span<const Value> x) const;
  Rational evaluate_exact(std::span<const Value> x) const;

  // Sorted, de-duplicated variables the expression reads.
  std::vector<std::size_t> scope() const;

  // Sound interval over all completions of `partial` (kUnassigned marks
  // free variables). Single-free-variable pieces are grouped per variable,
  // so separable expressions get exact bounds.
  Interval bounds(std::span<const std::vector<Value>> domains,
                  std::span<const Value> partial) const;

 private:
  Rational constant_ = 0;
  double constant_d_ = 0.0;
  std::vector<IndicatorTerm> indicators_;
  std::vector<LinearTerm> linear_;
};

enum class TransformKind { identity, signed_indicator, hinge };

// signed_indicator: +1 when the expression is positive, -1 otherwise.
// hinge: max(0, expr - threshold).
struct Transform {
  TransformKind kind = TransformKind::identity;
  Rational threshold = 0;
  double threshold_d = 0.0;

  static Transform identity() { return {}; }
  static Transform signed_indicator() { return {TransformKind::signed_indicator, 0, 0.0}; }
  static Transform hinge(const Rational& threshold) {
    return {TransformKind::hinge, threshold, to_double(threshold)};
  }

  double apply(double e) const;
  Rational apply_exact(const Rational& e) const;
  Interval apply(Interval e) const;
};

const char* transform_name(TransformKind kind);
TransformKind parse_transform(const std::string& name);

}  // namespace pcl
