#pragma once

#include "pcl/common.hpp"
#include "pcl/expression.hpp"

#include "json.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcl {

struct Variable {
  std::string name;
  std::vector<Value> domain;  // sorted ascending, unique
};

struct FeatureDef {
  std::string name;
  Expression expr;
  Transform transform;
  std::vector<std::size_t> scope;  // derived
  bool global = false;             // derived unless forced in the problem file
};

enum class Sense { less_equal, greater_equal, equal };

/// guard => (expr sense rhs). An empty guard makes the constraint unconditional.
struct Constraint {
  std::string name;
  std::vector<Literal> guard;
  Expression expr;
  Sense sense = Sense::less_equal;
  Rational rhs = 0;
  double rhs_d = 0.0;
  std::vector<std::size_t> scope;  // derived: guard vars + expr vars

  bool holds(std::span<const Value> x) const;
};

struct BasicPart {
  std::string name;
  std::vector<std::size_t> variables;  // sorted
  std::vector<std::size_t> features;   // I_p, derived
};

/// Raw description of a problem, before validation.
struct ModelSpec {
  std::string name;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<FeatureDef> features;
  std::vector<BasicPart> parts;
  // Features flagged global explicitly by the source; others are derived.
  std::vector<std::optional<bool>> global_override;
  nlohmann::json metadata = nlohmann::json::object();
};

struct Configuration {
  std::vector<Value> values;

  bool operator==(const Configuration&) const = default;
};

/// Assignment restricted to the variables of a set of basic parts.
struct PartialConfiguration {
  std::vector<std::size_t> parts;      // sorted
  std::vector<std::size_t> variables;  // sorted
  std::vector<Value> values;           // parallel to variables

  bool operator==(const PartialConfiguration&) const = default;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::size_t> violated;
};

class ProblemModel {
 public:
  // Validates every structural invariant and derives scopes, I_p, D and S.
  // Throws ModelError with a path into the spec on the first violation.
  static ProblemModel build(ModelSpec spec);

  const std::string& name() const { return name_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<std::vector<Value>>& domains() const { return domains_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<FeatureDef>& features() const { return features_; }
  const std::vector<BasicPart>& parts() const { return parts_; }
  const nlohmann::json& metadata() const { return metadata_; }

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_features() const { return features_.size(); }
  std::size_t num_parts() const { return parts_.size(); }

  std::size_t part_of(std::size_t var) const { return var_part_[var]; }
  // Parts touched by feature i, sorted.
  const std::vector<std::size_t>& feature_parts(std::size_t i) const { return feature_parts_[i]; }
  const std::vector<std::size_t>& constraint_parts(std::size_t c) const { return constraint_parts_[c]; }

  double feature_bound() const { return feature_bound_; }  // D
  std::size_t part_feature_bound() const { return part_feature_bound_; }  // S

  std::optional<std::size_t> find_variable(const std::string& name) const;
  std::optional<std::size_t> find_part(const std::string& name) const;
  bool in_domain(std::size_t var, Value v) const;

 private:
  std::string name_;
  std::vector<Variable> variables_;
  std::vector<std::vector<Value>> domains_;
  std::vector<Constraint> constraints_;
  std::vector<FeatureDef> features_;
  std::vector<BasicPart> parts_;
  nlohmann::json metadata_;
  std::vector<std::size_t> var_part_;
  std::vector<std::vector<std::size_t>> feature_parts_;
  std::vector<std::vector<std::size_t>> constraint_parts_;
  double feature_bound_ = 0.0;
  std::size_t part_feature_bound_ = 0;
};

// Throws DomainError unless x is total and in-domain.
void check_domain(const ProblemModel& model, const Configuration& x);

std::vector<double> feature_vector(const ProblemModel& model, const Configuration& x);
std::vector<Rational> feature_vector_exact(const ProblemModel& model, const Configuration& x);

double feature_value(const ProblemModel& model, std::size_t i, std::span<const Value> x);

double evaluate_partial_utility(const ProblemModel& model, std::span<const double> w,
                                std::span<const std::size_t> indices, const Configuration& x);
Rational evaluate_partial_utility_exact(const ProblemModel& model, std::span<const Rational> w,
                                        std::span<const std::size_t> indices,
                                        const Configuration& x);
double utility(const ProblemModel& model, std::span<const double> w, const Configuration& x);

std::vector<std::size_t> all_features(const ProblemModel& model);

PartialConfiguration restrict_to(const ProblemModel& model, const Configuration& x,
                                 std::span<const std::size_t> parts);
PartialConfiguration restrict_to_part(const ProblemModel& model, const Configuration& x,
                                      std::size_t part);
PartialConfiguration complement_of(const ProblemModel& model, const Configuration& x,
                                   std::size_t part);

// x_P o x_Q. Shared variables must agree, otherwise ConflictError.
PartialConfiguration combine(const PartialConfiguration& a, const PartialConfiguration& b);

// Total configuration from a partial covering every variable.
Configuration to_configuration(const ProblemModel& model, const PartialConfiguration& x);

// Overwrite the variables of `part` in x.
Configuration with_part(const Configuration& x, const PartialConfiguration& part);

FeasibilityReport check_feasible(const ProblemModel& model, const Configuration& x);

}  // namespace pcl
