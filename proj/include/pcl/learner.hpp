#pragma once

#include "pcl/gai.hpp"
#include "pcl/inference.hpp"
#include "pcl/model.hpp"
#include "pcl/selection.hpp"

#include "json.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace pcl {

enum class UpdateBranch { I, J };

const char* branch_name(UpdateBranch b);

struct IterationRecord {
  std::size_t t = 0;                      // 1-based
  std::optional<std::size_t> part;        // empty for full-configuration turns
  PartialConfiguration recommended;       // x^t on the queried part
  PartialConfiguration improvement;       // user's reassignment of the same variables
  UpdateBranch branch = UpdateBranch::I;
  double estimated_gain = 0.0;            // u^t[I](improved) - u^t[I](recommended)
  double surrogate_gain = 0.0;            // same difference under the updated weights, on Q
  bool satisfied = false;
  bool recommendation_changed = false;    // inference moved x on the queried part
  double inference_seconds = 0.0;
  bool converged = false;                 // detector state after this turn
};

nlohmann::json record_to_json(const ProblemModel& model, const IterationRecord& r);

struct LearnerOptions {
  SelectionKind selection = SelectionKind::random;
  std::uint64_t seed = 0;
  double exploration = 1.0;
  InferenceMode mode = InferenceMode::branch_and_bound;
  std::optional<Configuration> initial;  // defaults to the lexicographic minimum
  bool exact = false;                    // also track weights as rationals
};

struct PendingTurn {
  std::size_t t = 0;
  std::size_t part = 0;
  Configuration x;                       // x^t, the recommended configuration
  PartialConfiguration recommendation;   // x^t restricted to the part
  double inference_seconds = 0.0;
};

/// Part-wise coactive learner. A turn is split so a rejected improvement
/// leaves the pending recommendation untouched.
class PartwiseLearner {
 public:
  PartwiseLearner(const ProblemModel& model, LearnerOptions options = {});
  PartwiseLearner(const ProblemModel& model, GaiDecomposition decomposition, LearnerOptions options);

  // Chooses a part and infers it over J under the current weights. Repeated
  // calls return the same pending turn.
  const PendingTurn& begin_turn();
  bool has_pending() const { return pending_.has_value(); }
  const PendingTurn& pending() const { return *pending_; }

  // Throws ConflictError if `improvement` does not cover exactly the pending
  // part, DomainError for out-of-domain values, InfeasibleError if the
  // completed configuration violates a hard constraint.
  IterationRecord complete_turn(const PartialConfiguration& improvement);

  using Provider = std::function<PartialConfiguration(const PendingTurn&)>;
  IterationRecord step(const Provider& provider);

  bool has_converged() const;
  std::size_t t() const { return t_; }  // completed turns
  const std::vector<double>& weights() const { return w_; }
  const std::vector<Rational>& exact_weights() const { return w_exact_; }
  const Configuration& x() const { return x_; }
  const GaiDecomposition& decomposition() const { return decomposition_; }
  const ProblemModel& model() const { return *model_; }
  const std::vector<IterationRecord>& trace() const { return trace_; }
  const std::vector<std::size_t>& streak() const { return streak_; }
  const SelectionStrategy& selection() const { return selection_; }

 private:
  const ProblemModel* model_;
  GaiDecomposition decomposition_;
  LearnerOptions options_;
  SelectionStrategy selection_;
  std::vector<double> w_;
  std::vector<Rational> w_exact_;
  Configuration x_;
  std::size_t t_ = 0;
  std::optional<PendingTurn> pending_;
  std::vector<IterationRecord> trace_;
  // Satisfied visits per part since the configuration last changed.
  std::vector<std::size_t> streak_;
};

/// Standard coactive learner over whole configurations.
class CoactiveLearner {
 public:
  CoactiveLearner(const ProblemModel& model, InferenceMode mode = InferenceMode::dynamic_programming);

  const Configuration& recommend();  // x^t = argmax u^t
  IterationRecord complete_turn(const Configuration& improvement);

  std::size_t t() const { return t_; }
  const std::vector<double>& weights() const { return w_; }
  const Configuration& x() const { return x_; }

 private:
  const ProblemModel* model_;
  InferenceMode mode_;
  std::vector<double> w_;
  Configuration x_;
  bool pending_ = false;
  double inference_seconds_ = 0.0;
  std::size_t t_ = 0;
};

}  // namespace pcl
