#pragma once

#include "pcl/inference.hpp"
#include "pcl/learner.hpp"
#include "pcl/model.hpp"
#include "pcl/selection.hpp"
#include "pcl/simuser.hpp"

#include "json.hpp"

#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcl {

enum class Algorithm { pcl, cl };

struct ExperimentConfig {
  std::string problem = "grid";
  Algorithm algorithm = Algorithm::pcl;
  double alpha = 0.3;
  std::size_t users = 20;
  std::size_t iterations = 100;
  SelectionKind selection = SelectionKind::random;
  std::uint64_t seed = 0;
  double exploration = 1.0;
  InferenceMode mode = InferenceMode::branch_and_bound;
  bool compute_regret = true;
  bool stop_at_convergence = true;
  bool matched_gain = false;  // cl only: per-iteration gain targets taken from a pcl run
  bool exact = false;         // rational weight tracking and exact identity checks
  bool strict = false;        // throw on the first invariant violation
  int threads = 0;            // 0: OpenMP default, 1: serial
  std::vector<std::string> ordering;  // part names; empty: ascending GAI degree
  std::optional<std::filesystem::path> out;
};

nlohmann::json config_to_json(const ExperimentConfig& c);
// Fields present in `doc` override `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvariantReport {
  // Checks performed / violations, by invariant name.
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  std::vector<std::string> messages;  // first violations, with context
  std::size_t converged_runs = 0;
  std::size_t certified_runs = 0;

  void check(const std::string& name, bool ok, const std::string& context, bool strict);
  std::size_t violations(const std::string& name) const;
  std::size_t checks(const std::string& name) const;
  std::size_t total_violations() const;
  void merge(const InvariantReport& other);
  nlohmann::json to_json() const;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MetricsRow {
  std::size_t user = 0;
  std::size_t t = 0;                   // 0 is the initial configuration
  std::optional<std::size_t> part;
  std::optional<UpdateBranch> branch;
  bool satisfied = false;
  double regret = kNaN;                // NaN: unavailable
  double conditional_regret = 0.0;
  double zeta = 0.0;
  double avg_conditional_regret = 0.0;
  double bound = 0.0;                  // right-hand side of the average conditional regret bound
  double user_gain = 0.0;
  double estimated_gain = 0.0;
  double inference_seconds = 0.0;
  bool converged = false;
};

struct UserRun {
  std::vector<MetricsRow> rows;
  std::vector<IterationRecord> trace;
  double optimum = kNaN;               // u*(x*)
  std::optional<std::size_t> converged_at;
  bool certified = false;
  Configuration final_x;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string problem_name;
  std::vector<SimulatedUser> users;
  std::vector<UserRun> runs;
  InvariantReport report;
};

// u*(x*) per user by full inference; NaN where the problem is too large.
std::vector<double> compute_optima(const ProblemModel& model, const std::vector<SimulatedUser>& users,
                                   InferenceMode mode = InferenceMode::dynamic_programming);

double compute_regret(const ProblemModel& model, std::span<const double> w_star, const Configuration& x,
                      double optimum);
double compute_conditional_regret(const ProblemModel& model, std::span<const double> w_star,
                                  const Configuration& x, std::size_t part);

/// Runs every user (in parallel unless threads == 1) and checks the learning
/// invariants at each iteration. Users default to sample_users(model,
/// config.users, config.seed, config.alpha); optima are computed unless given.
ExperimentResult run_experiment(const ProblemModel& model, const ExperimentConfig& config,
                                const std::vector<SimulatedUser>* users = nullptr,
                                const std::vector<double>* optima = nullptr);

struct CurvePoint {
  std::size_t t = 0;
  double mean_regret = kNaN;
  double std_regret = kNaN;
  double median_regret_ratio = kNaN;
  double mean_avg_creg = 0.0;
  double mean_seconds = 0.0;  // cumulative inference time
  double std_seconds = 0.0;
};

// Per-iteration aggregate over users; converged runs carry their last values.
std::vector<CurvePoint> aggregate(const ExperimentResult& result);

// metrics.csv, summary.csv (deterministic), runtime.csv, plot_data.json,
// invariants.json, users.json, trace.jsonl.
void write_outputs(const ProblemModel& model, const ExperimentResult& result, const std::filesystem::path& dir);
std::string metrics_csv(const ExperimentResult& result);
std::string summary_csv(const std::vector<CurvePoint>& curve);

}  // namespace pcl
