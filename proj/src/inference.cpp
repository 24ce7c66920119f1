#include "pcl/inference.hpp"

#include "conditional.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace pcl {

namespace {

struct StopSearch {};

std::vector<std::size_t> free_variables(const ProblemModel& model, std::optional<std::size_t> part) {
  if (part) {
    if (*part >= model.num_parts()) throw DomainError("part index out of range");
    return model.parts()[*part].variables;
  }
  std::vector<std::size_t> all(model.num_variables());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

Configuration fixed_values(const ProblemModel& model, const InferenceRequest& r,
                           const std::vector<std::size_t>& free) {
  Configuration fixed = r.remainder;
  if (fixed.values.empty()) fixed.values.assign(model.num_variables(), kUnassigned);
  if (fixed.values.size() != model.num_variables())
    throw DomainError("remainder must list every variable");
  std::vector<char> is_free(model.num_variables(), 0);
  for (auto v : free) is_free[v] = 1;
  for (std::size_t v = 0; v < model.num_variables(); ++v)
    if (!is_free[v] && !model.in_domain(v, fixed.values[v]))
      throw DomainError("remainder leaves variable " + model.variables()[v].name + " unassigned or out of domain");
  return fixed;
}

PartialConfiguration make_partial(const ProblemModel& model, std::optional<std::size_t> part,
                                  std::vector<std::size_t> vars, std::vector<Value> values) {
  PartialConfiguration out;
  if (part) {
    out.parts = {*part};
  } else {
    out.parts.resize(model.num_parts());
    std::iota(out.parts.begin(), out.parts.end(), 0);
  }
  out.variables = std::move(vars);
  out.values = std::move(values);
  return out;
}

}  // namespace

const char* mode_name(InferenceMode mode) {
  switch (mode) {
    case InferenceMode::exhaustive:
      return "exhaustive";
    case InferenceMode::branch_and_bound:
      return "branch_and_bound";
    case InferenceMode::dynamic_programming:
      return "dynamic_programming";
  }
  return "?";
}

InferenceMode parse_mode(const std::string& name) {
  if (name == "exhaustive") return InferenceMode::exhaustive;
  if (name == "branch_and_bound" || name == "bnb") return InferenceMode::branch_and_bound;
  if (name == "dynamic_programming" || name == "dp") return InferenceMode::dynamic_programming;
  throw DomainError("unknown inference mode: " + name);
}

PartInference infer_part(const InferenceRequest& request) {
  if (!request.model) throw DomainError("inference request without a model");
  const ProblemModel& model = *request.model;
  if (request.weights.size() != model.num_features()) throw DomainError("weight vector has wrong length");
  for (auto i : request.objective)
    if (i >= model.num_features()) throw DomainError("objective feature index out of range");

  auto started = std::chrono::steady_clock::now();
  if (!request.part && request.mode == InferenceMode::dynamic_programming) {
    FullInference full = detail::solve_by_parts(model, request.weights, request.objective, 4'000'000);
    std::vector<std::size_t> vars(model.num_variables());
    std::iota(vars.begin(), vars.end(), 0);
    return {make_partial(model, std::nullopt, std::move(vars), full.x.values), full.objective_value, full.stats};
  }

  auto free = free_variables(model, request.part);
  Configuration fixed = fixed_values(model, request, free);
  detail::ConditionalProblem cp(model, request.weights, request.objective, free, fixed);

  double best = -std::numeric_limits<double>::infinity();
  std::vector<Value> best_vals;
  bool found = false;
  auto res = cp.search(
      [&](const Value* v) {
        double val = cp.objective(v);
        if (val > best + kEpsilon) {
          best = val;
          best_vals.assign(v, v + cp.size());
          found = true;
        }
      },
      request.mode != InferenceMode::exhaustive, &best);
  if (!found) {
    std::string where = request.part ? "part " + model.parts()[*request.part].name : "the model";
    throw InfeasibleError("no feasible assignment for " + where, res.violated);
  }
  PartInference out{make_partial(model, request.part, cp.free_vars(), std::move(best_vals)), best, {}};
  out.stats.nodes = res.nodes;
  out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

FullInference infer_full(const ProblemModel& model, std::span<const double> w, InferenceMode mode,
                         std::optional<std::vector<std::size_t>> objective, std::size_t state_limit) {
  std::vector<std::size_t> obj = objective ? std::move(*objective) : all_features(model);
  if (mode == InferenceMode::dynamic_programming) return detail::solve_by_parts(model, w, obj, state_limit);
  InferenceRequest r{&model, w, std::move(obj), std::nullopt, {}, mode};
  PartInference p = infer_part(r);
  return {Configuration{std::move(p.assignment.values)}, p.objective_value, p.stats};
}

std::vector<ScoredAssignment> enumerate_feasible(const InferenceRequest& request) {
  const ProblemModel& model = *request.model;
  auto free = free_variables(model, request.part);
  Configuration fixed = fixed_values(model, request, free);
  detail::ConditionalProblem cp(model, request.weights, request.objective, free, fixed);
  std::vector<ScoredAssignment> out;
  cp.search([&](const Value* v) { out.push_back({std::vector<Value>(v, v + cp.size()), cp.objective(v)}); },
            false, nullptr);
  return out;
}

Configuration lexicographic_minimum(const ProblemModel& model) {
  std::vector<double> w(model.num_features(), 0.0);
  std::vector<std::size_t> all(model.num_variables());
  std::iota(all.begin(), all.end(), 0);
  Configuration fixed{std::vector<Value>(model.num_variables(), kUnassigned)};
  detail::ConditionalProblem cp(model, w, {}, all, fixed);
  Configuration out;
  try {
    cp.search(
        [&](const Value* v) {
          out.values.assign(v, v + cp.size());
          throw StopSearch{};
        },
        false, nullptr);
  } catch (const StopSearch&) {
    return out;
  }
  throw InfeasibleError("model has no feasible configuration", {});
}

LocalOptimumCertificate certify_local_optimum(const ProblemModel& model, std::span<const double> w,
                                              const Configuration& x, InferenceMode mode) {
  if (mode == InferenceMode::dynamic_programming) mode = InferenceMode::branch_and_bound;
  const double base = utility(model, w, x);
  auto objective = all_features(model);
  LocalOptimumCertificate cert;
  for (std::size_t p = 0; p < model.num_parts(); ++p) {
    InferenceRequest r{&model, w, objective, p, x, mode};
    PartInference best = infer_part(r);
    double gain = best.objective_value - base;
    if (gain > kEpsilon) {
      cert.local_optimum = false;
      cert.part = p;
      cert.witness = best.assignment;
      cert.gain = gain;
      return cert;
    }
  }
  return cert;
}

Configuration random_feasible_configuration(const ProblemModel& model, std::mt19937_64& rng, std::size_t moves) {
  Configuration x = lexicographic_minimum(model);
  std::vector<double> w(model.num_features(), 0.0);
  std::uniform_int_distribution<std::size_t> pick_part(0, model.num_parts() - 1);
  for (std::size_t m = 0; m < moves; ++m) {
    std::size_t p = pick_part(rng);
    InferenceRequest r{&model, w, {}, p, x, InferenceMode::exhaustive};
    auto options = enumerate_feasible(r);
    if (options.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const auto& chosen = options[pick(rng)];
    const auto& vars = model.parts()[p].variables;
    for (std::size_t j = 0; j < vars.size(); ++j) x.values[vars[j]] = chosen.values[j];
  }
  return x;
}

}  // namespace pcl
