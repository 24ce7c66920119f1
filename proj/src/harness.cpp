#include "pcl/harness.hpp"

#include "pcl/gai.hpp"
#include "pcl/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcl {

namespace {

constexpr std::size_t kMaxMessages = 50;

double tolerance(double scale) { return 1e-9 * (1.0 + std::abs(scale)); }

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string context(std::size_t user, std::size_t t, const std::string& detail) {
  return "user " + std::to_string(user) + " t " + std::to_string(t) + ": " + detail;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<std::size_t> difference(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::uint64_t user_stream(std::uint64_t seed, std::size_t user) {
  std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + user + 1;
  x = (x ^ (x >> 31)) * 0xbf58476d1ce4e5b9ULL;
  return x ^ (x >> 29);
}

GaiDecomposition decomposition_for(const ProblemModel& model, const ExperimentConfig& cfg) {
  if (cfg.ordering.empty()) return default_decomposition(model);
  std::vector<std::size_t> order;
  for (const auto& name : cfg.ordering) {
    auto p = model.find_part(name);
    if (!p) throw DomainError("unknown part '" + name + "' in ordering");
    order.push_back(*p);
  }
  return compute_decomposition(model, order);
}

struct RunContext {
  const ProblemModel& model;
  const ExperimentConfig& config;
  const SimulatedUser& user;
  std::size_t index;
  double optimum;
  const std::vector<double>* gain_targets = nullptr;
};

UserRun run_pcl_user(const RunContext& ctx, InvariantReport& report) {
  const auto& model = ctx.model;
  const auto& cfg = ctx.config;
  const auto& w_star = ctx.user.w_star;
  const bool strict = cfg.strict;
  const double alpha = ctx.user.alpha;
  const double D = model.feature_bound();
  const double S = static_cast<double>(model.part_feature_bound());
  const double w_star_norm = norm(w_star);

  LearnerOptions opts;
  opts.selection = cfg.selection;
  opts.seed = user_stream(cfg.seed, ctx.index);
  opts.exploration = cfg.exploration;
  opts.mode = cfg.mode;
  opts.exact = cfg.exact;
  PartwiseLearner learner(model, decomposition_for(model, cfg), opts);

  std::vector<Rational> w_star_exact;
  Rational bound_factor_exact;
  if (cfg.exact) {
    for (double w : w_star) w_star_exact.push_back(rational_from_double(w));
    Rational d = rational_from_double(D);
    bound_factor_exact = 4 * d * d * Rational(model.part_feature_bound() * model.part_feature_bound());
  }

  UserRun run;
  run.optimum = ctx.optimum;
  MetricsRow initial;
  initial.user = ctx.index;
  initial.regret = compute_regret(model, w_star, learner.x(), ctx.optimum);
  run.rows.push_back(initial);

  double sum_creg = 0.0, sum_zeta = 0.0, seconds = 0.0;
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const std::vector<double> w_before = learner.weights();
    const std::vector<Rational> w_exact_before = learner.exact_weights();
    const Configuration x_prev = learner.x();
    const PendingTurn turn = learner.begin_turn();
    const std::size_t p = turn.part;
    const auto& I = model.parts()[p].features;
    const auto& J = learner.decomposition().J_of_part(p);

    UserFeedback fb = improve_part(ctx.user, model, turn.x, p, I);
    PartialConfiguration improvement = turn.recommendation;
    improvement.values = fb.values;
    IterationRecord rec = learner.complete_turn(improvement);
    Configuration x_hat = with_part(turn.x, improvement);
    const auto& w_after = learner.weights();
    const auto& Q = rec.branch == UpdateBranch::I ? I : J;

    double creg = compute_conditional_regret(model, w_star, turn.x, p);
    report.check("nonnegative_conditional_regret", creg >= -kEpsilon, context(ctx.index, t, "CREG " + num(creg)), strict);
    report.check("conditional_regret_agreement", std::abs(creg - fb.gap) <= tolerance(creg),
                 context(ctx.index, t, "search " + num(creg) + " vs enumeration " + num(fb.gap)), strict);
    creg = std::max(creg, 0.0);

    double user_gain = evaluate_partial_utility(model, w_star, I, x_hat) - evaluate_partial_utility(model, w_star, I, turn.x);
    report.check("alpha_informative", user_gain >= alpha * creg - tolerance(creg),
                 context(ctx.index, t, "gain " + num(user_gain) + " < alpha * CREG " + num(alpha * creg)), strict);
    report.check("satisfied_fixed_point", !fb.satisfied || improvement.values == turn.recommendation.values,
                 context(ctx.index, t, "satisfied user changed the part"), strict);

    double j_gain = evaluate_partial_utility(model, w_before, J, x_hat) - evaluate_partial_utility(model, w_before, J, turn.x);
    report.check("j_optimality", j_gain <= kEpsilon, context(ctx.index, t, "J-gain " + num(j_gain)), strict);
    double j_before = evaluate_partial_utility(model, w_before, J, x_prev);
    double j_after = evaluate_partial_utility(model, w_before, J, turn.x);
    report.check("inference_monotone", j_after >= j_before - tolerance(j_before),
                 context(ctx.index, t, "inference lowered the J objective"), strict);

    std::vector<char> in_q(model.num_features(), 0);
    for (auto i : Q) in_q[i] = 1;
    bool untouched = true;
    for (std::size_t i = 0; i < w_after.size(); ++i)
      if (!in_q[i] && std::memcmp(&w_after[i], &w_before[i], sizeof(double)) != 0) untouched = false;
    report.check("untouched_coordinates", untouched, context(ctx.index, t, "weights outside Q changed"), strict);

    double lhs = dot(w_star, w_after) - dot(w_star, w_before);
    double rhs = evaluate_partial_utility(model, w_star, Q, x_hat) - evaluate_partial_utility(model, w_star, Q, turn.x);
    report.check("telescoping", std::abs(lhs - rhs) <= tolerance(std::abs(dot(w_star, w_before)) + std::abs(rhs)),
                 context(ctx.index, t, "lhs " + num(lhs) + " rhs " + num(rhs)), strict);
    double norm_sq = dot(w_after, w_after);
    double norm_cap = 4.0 * D * D * S * S * static_cast<double>(t);
    report.check("norm_bound", norm_sq <= norm_cap + tolerance(norm_cap),
                 context(ctx.index, t, "|w|^2 " + num(norm_sq) + " > " + num(norm_cap)), strict);

    if (cfg.exact) {
      const auto& we = learner.exact_weights();
      auto phi_hat = feature_vector_exact(model, x_hat);
      auto phi = feature_vector_exact(model, turn.x);
      Rational l = 0, r = 0, sq = 0;
      for (std::size_t i = 0; i < we.size(); ++i) {
        l += w_star_exact[i] * (we[i] - w_exact_before[i]);
        sq += we[i] * we[i];
      }
      for (auto i : Q) r += w_star_exact[i] * (phi_hat[i] - phi[i]);
      report.check("telescoping_exact", l == r, context(ctx.index, t, "exact identity fails"), strict);
      report.check("norm_bound_exact", sq <= bound_factor_exact * Rational(static_cast<long>(t)),
                   context(ctx.index, t, "exact norm bound fails"), strict);
    }

    double zeta = 0.0;
    if (rec.branch == UpdateBranch::J) {
      auto rest = difference(I, J);
      zeta = evaluate_partial_utility(model, w_star, rest, x_hat) - evaluate_partial_utility(model, w_star, rest, turn.x);
    }
    sum_creg += creg;
    sum_zeta += zeta;
    const double td = static_cast<double>(t);
    double avg = sum_creg / td;
    double bound = 2.0 * D * S * w_star_norm / (alpha * std::sqrt(td)) + sum_zeta / (alpha * td);
    report.check("average_regret_bound", avg <= bound + tolerance(bound),
                 context(ctx.index, t, "average CREG " + num(avg) + " > bound " + num(bound)), strict);

    MetricsRow row;
    row.user = ctx.index;
    row.t = t;
    row.part = p;
    row.branch = rec.branch;
    row.satisfied = rec.satisfied;
    row.regret = compute_regret(model, w_star, turn.x, ctx.optimum);
    if (!std::isnan(row.regret))
      report.check("nonnegative_regret", row.regret >= -tolerance(ctx.optimum),
                   context(ctx.index, t, "regret " + num(row.regret)), strict);
    row.conditional_regret = creg;
    row.zeta = zeta;
    row.avg_conditional_regret = avg;
    row.bound = bound;
    row.user_gain = user_gain;
    row.estimated_gain = rec.estimated_gain;
    seconds += rec.inference_seconds;
    row.inference_seconds = seconds;
    row.converged = rec.converged;
    run.rows.push_back(row);
    run.trace.push_back(rec);

    if (rec.converged && !run.converged_at) {
      run.converged_at = t;
      LocalOptimumCertificate cert = certify_local_optimum(model, w_star, learner.x(), cfg.mode);
      run.certified = cert.local_optimum;
      report.converged_runs += 1;
      report.certified_runs += cert.local_optimum ? 1 : 0;
      report.check("local_optimum_at_convergence", cert.local_optimum,
                   context(ctx.index, t, "stopping rule fired but part " +
                                             (cert.part ? model.parts()[*cert.part].name : std::string("?")) +
                                             " improves by " + num(cert.gain)),
                   strict);
      if (cfg.stop_at_convergence) break;
    }
  }
  run.final_x = learner.x();
  return run;
}

UserRun run_cl_user(const RunContext& ctx, InvariantReport& report) {
  const auto& model = ctx.model;
  const auto& cfg = ctx.config;
  const auto& w_star = ctx.user.w_star;
  const bool strict = cfg.strict;
  CoactiveLearner learner(model, cfg.mode == InferenceMode::exhaustive ? InferenceMode::exhaustive
                                                                       : InferenceMode::dynamic_programming);
  UserRun run;
  run.optimum = ctx.optimum;
  MetricsRow initial;
  initial.user = ctx.index;
  initial.regret = compute_regret(model, w_star, learner.x(), ctx.optimum);
  run.rows.push_back(initial);
  FullImprovementOracle oracle(ctx.user, model);
  double seconds = 0.0;
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const std::vector<double> w_before = learner.weights();
    Configuration x = learner.recommend();
    std::optional<double> target;
    if (ctx.gain_targets) target = t <= ctx.gain_targets->size() ? (*ctx.gain_targets)[t - 1] : 0.0;
    UserFeedback fb = oracle.improve(x, target);
    Configuration x_hat{fb.values};
    IterationRecord rec = learner.complete_turn(x_hat);
    double reg = compute_regret(model, w_star, x, ctx.optimum);
    double gain = utility(model, w_star, x_hat) - utility(model, w_star, x);
    if (!target)
      report.check("alpha_informative", gain >= ctx.user.alpha * fb.gap - tolerance(fb.gap),
                   context(ctx.index, t, "gain " + num(gain)), strict);
    double lhs = dot(w_star, learner.weights()) - dot(w_star, w_before);
    report.check("telescoping", std::abs(lhs - gain) <= tolerance(std::abs(dot(w_star, w_before)) + std::abs(gain)),
                 context(ctx.index, t, "lhs " + num(lhs) + " rhs " + num(gain)), strict);
    if (!std::isnan(reg))
      report.check("nonnegative_regret", reg >= -tolerance(ctx.optimum), context(ctx.index, t, "regret " + num(reg)),
                   strict);
    MetricsRow row;
    row.user = ctx.index;
    row.t = t;
    row.satisfied = fb.satisfied;
    row.regret = reg;
    row.conditional_regret = fb.gap;
    row.user_gain = gain;
    row.estimated_gain = rec.estimated_gain;
    seconds += rec.inference_seconds;
    row.inference_seconds = seconds;
    row.converged = fb.satisfied;
    run.rows.push_back(row);
    run.trace.push_back(rec);
    if (fb.satisfied && !target) {
      // Only a global optimum leaves an alpha-informative user nothing to improve.
      run.converged_at = t;
      if (cfg.stop_at_convergence) break;
    }
  }
  run.final_x = learner.x();
  return run;
}

}  // namespace

const char* algorithm_name(Algorithm a) { return a == Algorithm::pcl ? "pcl" : "cl"; }

Algorithm parse_algorithm(const std::string& name) {
  if (name == "pcl") return Algorithm::pcl;
  if (name == "cl") return Algorithm::cl;
  throw DomainError("unknown algorithm: " + name);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j = {{"problem", c.problem},
                      {"algo", algorithm_name(c.algorithm)},
                      {"alpha", c.alpha},
                      {"users", c.users},
                      {"iters", c.iterations},
                      {"select", selection_name(c.selection)},
                      {"seed", c.seed},
                      {"exploration", c.exploration},
                      {"mode", mode_name(c.mode)},
                      {"regret", c.compute_regret},
                      {"stop_at_convergence", c.stop_at_convergence},
                      {"matched_gain", c.matched_gain},
                      {"exact", c.exact},
                      {"strict", c.strict},
                      {"threads", c.threads}};
  if (c.out) j["out"] = c.out->string();
  if (!c.ordering.empty()) j["ordering"] = c.ordering;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig c) {
  if (!doc.is_object()) throw DomainError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "problem") c.problem = value.get<std::string>();
    else if (key == "algo") c.algorithm = parse_algorithm(value.get<std::string>());
    else if (key == "alpha") c.alpha = value.get<double>();
    else if (key == "users") c.users = value.get<std::size_t>();
    else if (key == "iters") c.iterations = value.get<std::size_t>();
    else if (key == "select") c.selection = parse_selection(value.get<std::string>());
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "exploration") c.exploration = value.get<double>();
    else if (key == "mode") c.mode = parse_mode(value.get<std::string>());
    else if (key == "regret") c.compute_regret = value.get<bool>();
    else if (key == "stop_at_convergence") c.stop_at_convergence = value.get<bool>();
    else if (key == "matched_gain") c.matched_gain = value.get<bool>();
    else if (key == "exact") c.exact = value.get<bool>();
    else if (key == "strict") c.strict = value.get<bool>();
    else if (key == "threads") c.threads = value.get<int>();
    else if (key == "out") c.out = value.get<std::string>();
    else if (key == "ordering") c.ordering = value.get<std::vector<std::string>>();
    else throw DomainError("unknown config key: " + key);
  }
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (c.iterations < 1) throw DomainError("iters must be at least 1");
  return c;
}

void InvariantReport::check(const std::string& name, bool ok, const std::string& ctx, bool strict) {
  auto& c = counts[name];
  ++c.first;
  if (ok) return;
  ++c.second;
  std::string msg = name + " violated at " + ctx;
  if (strict) throw InvariantViolation(msg);
  if (messages.size() < kMaxMessages) messages.push_back(std::move(msg));
}

std::size_t InvariantReport::violations(const std::string& name) const {
  auto it = counts.find(name);
  return it == counts.end() ? 0 : it->second.second;
}

std::size_t InvariantReport::checks(const std::string& name) const {
  auto it = counts.find(name);
  return it == counts.end() ? 0 : it->second.first;
}

std::size_t InvariantReport::total_violations() const {
  std::size_t n = 0;
  for (const auto& [name, c] : counts) n += c.second;
  return n;
}

void InvariantReport::merge(const InvariantReport& other) {
  for (const auto& [name, c] : other.counts) {
    counts[name].first += c.first;
    counts[name].second += c.second;
  }
  for (const auto& m : other.messages)
    if (messages.size() < kMaxMessages) messages.push_back(m);
  converged_runs += other.converged_runs;
  certified_runs += other.certified_runs;
}

nlohmann::json InvariantReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::object();
  for (const auto& [name, c] : counts) checks_json[name] = {{"checks", c.first}, {"violations", c.second}};
  return {{"checks", checks_json},
          {"converged_runs", converged_runs},
          {"certified_runs", certified_runs},
          {"messages", messages}};
}

std::vector<double> compute_optima(const ProblemModel& model, const std::vector<SimulatedUser>& users,
                                   InferenceMode mode) {
  std::vector<double> out(users.size(), kNaN);
  for (std::size_t u = 0; u < users.size(); ++u) {
    try {
      FullInference best = infer_full(model, users[u].w_star, mode);
      out[u] = utility(model, users[u].w_star, best.x);
    } catch (const InferenceTooLarge&) {
      out[u] = kNaN;
    }
  }
  return out;
}

double compute_regret(const ProblemModel& model, std::span<const double> w_star, const Configuration& x,
                      double optimum) {
  if (std::isnan(optimum)) return kNaN;
  return optimum - utility(model, w_star, x);
}

double compute_conditional_regret(const ProblemModel& model, std::span<const double> w_star,
                                  const Configuration& x, std::size_t part) {
  const auto& I = model.parts()[part].features;
  InferenceRequest req{&model, w_star, I, part, x, InferenceMode::branch_and_bound};
  PartInference best = infer_part(req);
  return best.objective_value - evaluate_partial_utility(model, w_star, I, x);
}

ExperimentResult run_experiment(const ProblemModel& model, const ExperimentConfig& config,
                                const std::vector<SimulatedUser>* users, const std::vector<double>* optima) {
  ExperimentResult result;
  result.config = config;
  result.problem_name = model.name();
  result.users = users ? *users : sample_users(model, config.users, config.seed, config.alpha);
  const std::size_t n = result.users.size();
  std::vector<double> best(n, kNaN);
  if (optima) {
    if (optima->size() != n) throw DomainError("one optimum per user required");
    best = *optima;
  } else if (config.compute_regret) {
    best = compute_optima(model, result.users);
  }

  // Matched-gain CL takes its per-iteration targets from a pcl run of the same user.
  std::vector<std::vector<double>> targets;
  if (config.algorithm == Algorithm::cl && config.matched_gain) {
    ExperimentConfig pcl_cfg = config;
    pcl_cfg.algorithm = Algorithm::pcl;
    pcl_cfg.matched_gain = false;
    pcl_cfg.out.reset();
    ExperimentResult pcl_result = run_experiment(model, pcl_cfg, &result.users, &best);
    for (const auto& run : pcl_result.runs) {
      std::vector<double> g;
      for (std::size_t k = 1; k < run.rows.size(); ++k) g.push_back(std::max(0.0, run.rows[k].user_gain));
      targets.push_back(std::move(g));
    }
  }

  result.runs.resize(n);
  std::vector<InvariantReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  auto run_one = [&](std::size_t u) {
    try {
      RunContext ctx{model, config, result.users[u], u, best[u], targets.empty() ? nullptr : &targets[u]};
      result.runs[u] = config.algorithm == Algorithm::pcl ? run_pcl_user(ctx, reports[u]) : run_cl_user(ctx, reports[u]);
    } catch (...) {
      errors[u] = std::current_exception();
    }
  };
  if (config.threads == 1) {
    for (std::size_t u = 0; u < n; ++u) run_one(u);
  } else {
#ifdef _OPENMP
    int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t u = 0; u < n; ++u) run_one(u);
#else
    for (std::size_t u = 0; u < n; ++u) run_one(u);
#endif
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (errors[u]) std::rethrow_exception(errors[u]);
    result.report.merge(reports[u]);
  }
  if (config.out) write_outputs(model, result, *config.out);
  return result;
}

std::vector<CurvePoint> aggregate(const ExperimentResult& result) {
  const std::size_t T = result.config.iterations;
  const std::size_t n = result.runs.size();
  std::vector<CurvePoint> curve;
  if (n == 0) return curve;
  for (std::size_t t = 0; t <= T; ++t) {
    std::vector<double> regrets, ratios, avg_creg, secs;
    for (const auto& run : result.runs) {
      if (run.rows.empty()) continue;
      const MetricsRow& row = run.rows[std::min(t, run.rows.size() - 1)];
      const double initial = run.rows.front().regret;
      if (!std::isnan(row.regret)) {
        regrets.push_back(row.regret);
        ratios.push_back(initial > kEpsilon ? row.regret / initial : 0.0);
      }
      avg_creg.push_back(row.avg_conditional_regret);
      secs.push_back(row.inference_seconds);
    }
    auto mean = [](const std::vector<double>& v) {
      return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    auto stdev = [&](const std::vector<double>& v) {
      if (v.empty()) return kNaN;
      double m = mean(v), s = 0.0;
      for (double x : v) s += (x - m) * (x - m);
      return std::sqrt(s / static_cast<double>(v.size()));
    };
    auto median = [](std::vector<double> v) {
      if (v.empty()) return kNaN;
      std::sort(v.begin(), v.end());
      std::size_t k = v.size() / 2;
      return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
    };
    CurvePoint cp;
    cp.t = t;
    cp.mean_regret = mean(regrets);
    cp.std_regret = stdev(regrets);
    cp.median_regret_ratio = median(ratios);
    cp.mean_avg_creg = mean(avg_creg);
    cp.mean_seconds = mean(secs);
    cp.std_seconds = stdev(secs);
    curve.push_back(cp);
  }
  return curve;
}

std::string metrics_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "user,t,part,branch,satisfied,regret,conditional_regret,zeta,avg_conditional_regret,bound,user_gain,"
        "estimated_gain,converged\n";
  for (const auto& run : result.runs)
    for (const auto& r : run.rows) {
      os << r.user << ',' << r.t << ',' << (r.part ? std::to_string(*r.part) : "") << ','
         << (r.branch ? branch_name(*r.branch) : "") << ',' << (r.satisfied ? 1 : 0) << ',' << num(r.regret) << ','
         << num(r.conditional_regret) << ',' << num(r.zeta) << ',' << num(r.avg_conditional_regret) << ','
         << num(r.bound) << ',' << num(r.user_gain) << ',' << num(r.estimated_gain) << ','
         << (r.converged ? 1 : 0) << '\n';
    }
  return os.str();
}

std::string summary_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "t,mean_regret,std_regret,median_regret_ratio,mean_avg_conditional_regret\n";
  for (const auto& c : curve)
    os << c.t << ',' << num(c.mean_regret) << ',' << num(c.std_regret) << ',' << num(c.median_regret_ratio) << ','
       << num(c.mean_avg_creg) << '\n';
  return os.str();
}

void write_outputs(const ProblemModel& model, const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << text;
  };
  auto curve = aggregate(result);
  write("metrics.csv", metrics_csv(result));
  write("summary.csv", summary_csv(curve));

  std::ostringstream rt;
  rt << "user,t,cumulative_inference_seconds\n";
  for (const auto& run : result.runs)
    for (const auto& r : run.rows) rt << r.user << ',' << r.t << ',' << num(r.inference_seconds) << '\n';
  write("runtime.csv", rt.str());

  nlohmann::json regret = nlohmann::json::array(), runtime = nlohmann::json::array();
  auto js = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  for (const auto& c : curve) {
    regret.push_back({{"t", c.t}, {"mean", js(c.mean_regret)}, {"std", js(c.std_regret)},
                      {"median_ratio", js(c.median_regret_ratio)}});
    runtime.push_back({{"t", c.t}, {"mean", js(c.mean_seconds)}, {"std", js(c.std_seconds)}});
  }
  nlohmann::json plot = {{"problem", result.problem_name},
                         {"config", config_to_json(result.config)},
                         {"panels", {{"regret", regret}, {"cumulative_runtime", runtime}}}};
  write("plot_data.json", plot.dump(2) + "\n");
  write("invariants.json", result.report.to_json().dump(2) + "\n");
  write("users.json", users_to_json(result.users).dump(2) + "\n");

  std::ostringstream tr;
  for (std::size_t u = 0; u < result.runs.size(); ++u)
    for (const auto& rec : result.runs[u].trace) {
      auto j = record_to_json(model, rec);
      j["user"] = u;
      tr << j.dump() << '\n';
    }
  write("trace.jsonl", tr.str());
}

}  // namespace pcl
