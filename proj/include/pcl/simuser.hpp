#pragma once

#include "pcl/inference.hpp"
#include "pcl/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pcl {

struct SimulatedUser {
  std::vector<double> w_star;  // hidden utility weights
  double alpha = 0.3;
  std::uint64_t seed = 0;
};

// Coordinates i.i.d. N(0, 1); user k draws from its own stream.
std::vector<SimulatedUser> sample_users(const ProblemModel& model, std::size_t count, std::uint64_t seed,
                                        double alpha);

nlohmann::json users_to_json(const std::vector<SimulatedUser>& users);
std::vector<SimulatedUser> users_from_json(const nlohmann::json& doc);

struct UserFeedback {
  std::vector<Value> values;  // improved assignment of the queried variables
  double gap = 0.0;           // best achievable gain under the user's objective
  double gain = 0.0;          // gain of the returned assignment
  bool satisfied = false;     // gap <= kEpsilon: the input is returned unchanged
};

/// Least useful feasible reassignment of `part` whose gain in u*[objective]
/// is at least alpha times the conditional regret. Ties go to the
/// lexicographically smallest assignment.
UserFeedback improve_part(const SimulatedUser& user, const ProblemModel& model, const Configuration& x,
                          std::size_t part, std::span<const std::size_t> objective);

// Largest problem improve_full will enumerate (product of domain sizes).
inline constexpr double kFullImprovementLimit = 1 << 22;

/// Same program over whole configurations. `target_gain`, when set, replaces
/// alpha * REG(x) by min(target_gain, REG(x)).
/// Throws DomainError when the configuration space exceeds kFullImprovementLimit.
UserFeedback improve_full(const SimulatedUser& user, const ProblemModel& model, const Configuration& x,
                          std::optional<double> target_gain = std::nullopt);

/// improve_full with the feasible set enumerated once per user.
class FullImprovementOracle {
 public:
  FullImprovementOracle(const SimulatedUser& user, const ProblemModel& model);
  UserFeedback improve(const Configuration& x, std::optional<double> target_gain = std::nullopt) const;

 private:
  const SimulatedUser* user_;
  std::vector<ScoredAssignment> options_;
};

}  // namespace pcl
