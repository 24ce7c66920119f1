#pragma once

#include "pcl/model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcl {

// exhaustive is the reference enumerator; branch_and_bound must return the
// identical assignment. dynamic_programming runs over whole parts and only
// applies to full inference (part requests fall back to branch_and_bound).
enum class InferenceMode { exhaustive, branch_and_bound, dynamic_programming };

const char* mode_name(InferenceMode mode);
InferenceMode parse_mode(const std::string& name);

class InferenceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InferenceRequest {
  const ProblemModel* model = nullptr;
  std::span<const double> weights;
  std::vector<std::size_t> objective;  // feature indices
  std::optional<std::size_t> part;     // nullopt: all variables are free
  Configuration remainder;             // supplies the fixed variables
  InferenceMode mode = InferenceMode::branch_and_bound;
};

struct InferenceStats {
  double seconds = 0.0;
  std::uint64_t nodes = 0;
};

struct PartInference {
  PartialConfiguration assignment;
  double objective_value = 0.0;  // sum over the objective, remainder included
  InferenceStats stats;
};

struct FullInference {
  Configuration x;
  double objective_value = 0.0;
  InferenceStats stats;
};

struct ScoredAssignment {
  std::vector<Value> values;  // over the free variables, declaration order
  double value = 0.0;
};

/// argmax over the part's variables of sum_{i in objective} w_i phi_i, with the
/// rest of the configuration fixed. Hard constraints that read a free
/// variable are enforced with the remainder substituted; constraints that
/// read only fixed variables are ignored. Ties go to the lexicographically
/// smallest assignment (variable order, then ascending value).
/// Throws InfeasibleError when no completion satisfies the constraints.
PartInference infer_part(const InferenceRequest& request);

/// Whole-configuration argmax. `objective` defaults to every feature.
/// DP state count is capped by `state_limit`; beyond it InferenceTooLarge.
FullInference infer_full(const ProblemModel& model, std::span<const double> w,
                         InferenceMode mode = InferenceMode::dynamic_programming,
                         std::optional<std::vector<std::size_t>> objective = std::nullopt,
                         std::size_t state_limit = 4'000'000);

/// Every feasible assignment of the free variables in lexicographic order,
/// scored by the request objective.
std::vector<ScoredAssignment> enumerate_feasible(const InferenceRequest& request);

// Lexicographically smallest feasible configuration.
Configuration lexicographic_minimum(const ProblemModel& model);

struct LocalOptimumCertificate {
  bool local_optimum = true;
  std::optional<std::size_t> part;               // first improvable part
  std::optional<PartialConfiguration> witness;   // its improving assignment
  double gain = 0.0;
};

/// True iff no single part can be reassigned to raise u by more than kEpsilon.
LocalOptimumCertificate certify_local_optimum(const ProblemModel& model, std::span<const double> w,
                                              const Configuration& x,
                                              InferenceMode mode = InferenceMode::branch_and_bound);

// Random feasible configuration: starts from the lexicographic minimum and
// resamples uniformly among the feasible assignments of random parts.
Configuration random_feasible_configuration(const ProblemModel& model, std::mt19937_64& rng,
                                            std::size_t moves);

}  // namespace pcl
