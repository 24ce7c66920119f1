#include "pcl/simuser.hpp"

#include <limits>
#include <random>

namespace pcl {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Shared by part and full improvements: options are in lexicographic order.
UserFeedback minimal_improvement(const std::vector<ScoredAssignment>& options, std::span<const Value> current,
                                 double current_value, double alpha, std::optional<double> target_gain) {
  UserFeedback fb;
  fb.values.assign(current.begin(), current.end());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& o : options)
    if (o.value > best + kEpsilon) best = o.value;
  fb.gap = std::max(0.0, best - current_value);
  if (fb.gap <= kEpsilon) {
    fb.satisfied = true;
    return fb;
  }
  double required = target_gain ? std::min(*target_gain, fb.gap) : alpha * fb.gap;
  const ScoredAssignment* chosen = nullptr;
  for (const auto& o : options) {
    if (o.value - current_value < required - kEpsilon) continue;
    // Values within kEpsilon tie; the lexicographically first one is kept.
    if (!chosen || o.value < chosen->value - kEpsilon) chosen = &o;
  }
  // The optimum always qualifies; this only guards against rounding.
  if (!chosen)
    for (const auto& o : options)
      if (o.value == best) {
        chosen = &o;
        break;
      }
  fb.values = chosen->values;
  fb.gain = chosen->value - current_value;
  return fb;
}

}  // namespace

std::vector<SimulatedUser> sample_users(const ProblemModel& model, std::size_t count, std::uint64_t seed,
                                        double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  std::vector<SimulatedUser> users;
  for (std::size_t k = 0; k < count; ++k) {
    SimulatedUser u;
    u.alpha = alpha;
    u.seed = splitmix(seed * 0x100000001b3ULL + k);
    std::mt19937_64 rng(u.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    u.w_star.resize(model.num_features());
    for (auto& w : u.w_star) w = normal(rng);
    users.push_back(std::move(u));
  }
  return users;
}

nlohmann::json users_to_json(const std::vector<SimulatedUser>& users) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& u : users) out.push_back({{"seed", u.seed}, {"alpha", u.alpha}, {"w_star", u.w_star}});
  return out;
}

std::vector<SimulatedUser> users_from_json(const nlohmann::json& doc) {
  std::vector<SimulatedUser> users;
  for (const auto& j : doc) {
    SimulatedUser u;
    u.seed = j.at("seed").get<std::uint64_t>();
    u.alpha = j.at("alpha").get<double>();
    u.w_star = j.at("w_star").get<std::vector<double>>();
    users.push_back(std::move(u));
  }
  return users;
}

UserFeedback improve_part(const SimulatedUser& user, const ProblemModel& model, const Configuration& x,
                          std::size_t part, std::span<const std::size_t> objective) {
  InferenceRequest r{&model, user.w_star, {objective.begin(), objective.end()}, part, x,
                     InferenceMode::exhaustive};
  auto options = enumerate_feasible(r);
  const auto& vars = model.parts()[part].variables;
  std::vector<Value> current;
  for (auto v : vars) current.push_back(x.values[v]);
  double current_value = 0.0;
  bool found = false;
  for (const auto& o : options)
    if (o.values == current) {
      current_value = o.value;
      found = true;
      break;
    }
  if (!found) throw DomainError("current configuration is infeasible");
  return minimal_improvement(options, current, current_value, user.alpha, std::nullopt);
}

UserFeedback improve_full(const SimulatedUser& user, const ProblemModel& model, const Configuration& x,
                          std::optional<double> target_gain) {
  return FullImprovementOracle(user, model).improve(x, target_gain);
}

FullImprovementOracle::FullImprovementOracle(const SimulatedUser& user, const ProblemModel& model) : user_(&user) {
  double space = 1.0;
  for (const auto& d : model.domains()) space *= static_cast<double>(d.size());
  if (space > kFullImprovementLimit)
    throw DomainError("full-configuration improvement needs enumeration; problem '" + model.name() +
                      "' is too large");
  InferenceRequest r{&model, user.w_star, all_features(model), std::nullopt, {}, InferenceMode::exhaustive};
  options_ = enumerate_feasible(r);
}

UserFeedback FullImprovementOracle::improve(const Configuration& x, std::optional<double> target_gain) const {
  double current_value = -std::numeric_limits<double>::infinity();
  for (const auto& o : options_)
    if (o.values == x.values) {
      current_value = o.value;
      break;
    }
  if (current_value == -std::numeric_limits<double>::infinity())
    throw DomainError("current configuration is infeasible");
  return minimal_improvement(options_, x.values, current_value, user_->alpha, target_gain);
}

}  // namespace pcl
