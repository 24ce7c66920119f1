#include "pcl/learner.hpp"

#include "pcl/problem_io.hpp"

#include <algorithm>
#include <chrono>

namespace pcl {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

const char* branch_name(UpdateBranch b) { return b == UpdateBranch::I ? "I" : "J"; }

nlohmann::json record_to_json(const ProblemModel& model, const IterationRecord& r) {
  nlohmann::json j = {{"t", r.t},
                      {"recommended", partial_to_json(model, r.recommended)},
                      {"improvement", partial_to_json(model, r.improvement)},
                      {"branch", branch_name(r.branch)},
                      {"estimated_gain", r.estimated_gain},
                      {"surrogate_gain", r.surrogate_gain},
                      {"satisfied", r.satisfied},
                      {"recommendation_changed", r.recommendation_changed},
                      {"inference_seconds", r.inference_seconds},
                      {"converged", r.converged}};
  j["part"] = r.part ? nlohmann::json(model.parts()[*r.part].name) : nlohmann::json(nullptr);
  return j;
}

PartwiseLearner::PartwiseLearner(const ProblemModel& model, LearnerOptions options)
    : PartwiseLearner(model, default_decomposition(model), std::move(options)) {}

PartwiseLearner::PartwiseLearner(const ProblemModel& model, GaiDecomposition decomposition,
                                 LearnerOptions options)
    : model_(&model),
      decomposition_(std::move(decomposition)),
      options_(std::move(options)),
      selection_(options_.selection, model, decomposition_, options_.seed, options_.exploration),
      w_(model.num_features(), 0.0),
      streak_(model.num_parts(), 0) {
  if (options_.exact) w_exact_.assign(model.num_features(), Rational(0));
  if (options_.initial) {
    check_domain(model, *options_.initial);
    auto report = check_feasible(model, *options_.initial);
    if (!report.feasible) throw InfeasibleError("initial configuration is infeasible", report.violated);
    x_ = *options_.initial;
  } else {
    x_ = lexicographic_minimum(model);
  }
}

const PendingTurn& PartwiseLearner::begin_turn() {
  if (pending_) return *pending_;
  std::size_t p = selection_.select();
  auto start = std::chrono::steady_clock::now();
  InferenceRequest req{model_, w_, decomposition_.J_of_part(p), p, x_, options_.mode};
  PartInference inferred = infer_part(req);
  PendingTurn turn;
  turn.t = t_ + 1;
  turn.part = p;
  turn.x = with_part(x_, inferred.assignment);
  turn.recommendation = std::move(inferred.assignment);
  turn.inference_seconds = seconds_since(start);
  pending_ = std::move(turn);
  return *pending_;
}

IterationRecord PartwiseLearner::complete_turn(const PartialConfiguration& improvement) {
  if (!pending_) throw ConflictError("no pending turn");
  const PendingTurn& turn = *pending_;
  const std::size_t p = turn.part;
  if (improvement.variables != turn.recommendation.variables ||
      improvement.values.size() != improvement.variables.size())
    throw ConflictError("improvement must assign exactly the variables of part '" + model_->parts()[p].name + "'");
  for (std::size_t j = 0; j < improvement.variables.size(); ++j)
    if (!model_->in_domain(improvement.variables[j], improvement.values[j]))
      throw DomainError("value " + std::to_string(improvement.values[j]) + " out of domain for '" +
                        model_->variables()[improvement.variables[j]].name + "'");
  Configuration improved = with_part(turn.x, improvement);
  auto report = check_feasible(*model_, improved);
  if (!report.feasible) throw InfeasibleError("improvement violates hard constraints", report.violated);

  IterationRecord rec;
  rec.t = turn.t;
  rec.part = p;
  rec.recommended = turn.recommendation;
  rec.improvement = improvement;
  rec.improvement.parts = turn.recommendation.parts;
  rec.inference_seconds = turn.inference_seconds;
  rec.satisfied = improvement.values == turn.recommendation.values;
  rec.recommendation_changed = turn.x != x_;

  const auto& I = model_->parts()[p].features;
  const auto& J = decomposition_.J_of_part(p);
  rec.estimated_gain =
      evaluate_partial_utility(*model_, w_, I, improved) - evaluate_partial_utility(*model_, w_, I, turn.x);
  rec.branch = rec.estimated_gain <= kEpsilon ? UpdateBranch::I : UpdateBranch::J;
  const auto& Q = rec.branch == UpdateBranch::I ? I : J;

  if (!rec.satisfied) {
    auto phi_hat = feature_vector(*model_, improved);
    auto phi = feature_vector(*model_, turn.x);
    for (auto i : Q) w_[i] += phi_hat[i] - phi[i];
    if (options_.exact) {
      auto ex_hat = feature_vector_exact(*model_, improved);
      auto ex = feature_vector_exact(*model_, turn.x);
      for (auto i : Q) w_exact_[i] += ex_hat[i] - ex[i];
    }
  }
  rec.surrogate_gain =
      evaluate_partial_utility(*model_, w_, Q, improved) - evaluate_partial_utility(*model_, w_, Q, turn.x);
  selection_.record_reward(p, SelectionStrategy::surrogate_reward(rec.surrogate_gain, model_->feature_bound(),
                                                                   static_cast<double>(model_->part_feature_bound())));

  if (!rec.satisfied) {
    std::fill(streak_.begin(), streak_.end(), 0);
  } else {
    if (rec.recommendation_changed) std::fill(streak_.begin(), streak_.end(), 0);
    ++streak_[p];
  }

  x_ = turn.x;
  t_ = turn.t;
  pending_.reset();
  rec.converged = has_converged();
  trace_.push_back(rec);
  return rec;
}

IterationRecord PartwiseLearner::step(const Provider& provider) {
  const PendingTurn& turn = begin_turn();
  return complete_turn(provider(turn));
}

bool PartwiseLearner::has_converged() const {
  return std::all_of(streak_.begin(), streak_.end(), [](std::size_t c) { return c >= 2; });
}

CoactiveLearner::CoactiveLearner(const ProblemModel& model, InferenceMode mode)
    : model_(&model), mode_(mode), w_(model.num_features(), 0.0), x_(lexicographic_minimum(model)) {}

const Configuration& CoactiveLearner::recommend() {
  if (pending_) return x_;
  auto start = std::chrono::steady_clock::now();
  // Zero weights make every configuration optimal; keep the lexicographic minimum.
  bool zero = std::all_of(w_.begin(), w_.end(), [](double v) { return v == 0.0; });
  if (!zero) x_ = infer_full(*model_, w_, mode_).x;
  inference_seconds_ = seconds_since(start);
  pending_ = true;
  return x_;
}

IterationRecord CoactiveLearner::complete_turn(const Configuration& improvement) {
  if (!pending_) throw ConflictError("no pending recommendation");
  check_domain(*model_, improvement);
  auto report = check_feasible(*model_, improvement);
  if (!report.feasible) throw InfeasibleError("improvement violates hard constraints", report.violated);
  IterationRecord rec;
  rec.t = t_ + 1;
  std::vector<std::size_t> all_parts(model_->num_parts());
  for (std::size_t p = 0; p < all_parts.size(); ++p) all_parts[p] = p;
  rec.recommended = restrict_to(*model_, x_, all_parts);
  rec.improvement = restrict_to(*model_, improvement, all_parts);
  rec.satisfied = improvement == x_;
  rec.inference_seconds = inference_seconds_;
  rec.estimated_gain = utility(*model_, w_, improvement) - utility(*model_, w_, x_);
  auto phi_hat = feature_vector(*model_, improvement);
  auto phi = feature_vector(*model_, x_);
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += phi_hat[i] - phi[i];
  rec.surrogate_gain = utility(*model_, w_, improvement) - utility(*model_, w_, x_);
  pending_ = false;
  t_ = rec.t;
  return rec;
}

}  // namespace pcl
