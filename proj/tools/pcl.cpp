#include "pcl/gai.hpp"
#include "pcl/harness.hpp"
#include "pcl/inference.hpp"
#include "pcl/problem_io.hpp"
#include "pcl/problems.hpp"
#include "pcl/service.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <cmath>
#include <iostream>

using namespace pcl;

namespace {

int run_command(const std::string& config_file, ExperimentConfig flags, const std::vector<std::string>& given,
                bool quiet) {
  ExperimentConfig cfg;
  if (!config_file.empty()) cfg = config_from_json(read_json_file(config_file), cfg);
  // Command-line flags win over the config file.
  nlohmann::json overrides = config_to_json(flags);
  nlohmann::json picked = nlohmann::json::object();
  for (const auto& key : given)
    if (overrides.contains(key)) picked[key] = overrides[key];
  cfg = config_from_json(picked, cfg);

  ProblemModel model = load_problem(cfg.problem);
  ExperimentResult result;
  try {
    result = run_experiment(model, cfg);
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  }
  auto curve = aggregate(result);
  if (!quiet) {
    const auto& first = curve.front();
    const auto& last = curve.back();
    std::cout << "problem " << result.problem_name << " algo " << algorithm_name(cfg.algorithm) << " users "
              << result.runs.size() << " iters " << cfg.iterations << "\n";
    if (!std::isnan(first.mean_regret))
      std::cout << "mean regret " << first.mean_regret << " -> " << last.mean_regret << " (median ratio "
                << last.median_regret_ratio << ")\n";
    else
      std::cout << "regret unavailable for this problem\n";
    std::cout << "converged runs " << result.report.converged_runs << ", certified " << result.report.certified_runs
              << "\n";
    std::cout << "invariant checks " << [&] {
      std::size_t n = 0;
      for (const auto& [name, c] : result.report.counts) n += c.first;
      return n;
    }() << ", violations " << result.report.total_violations() << "\n";
    if (cfg.out) std::cout << "outputs written to " << cfg.out->string() << "\n";
  }
  if (result.report.total_violations() > 0) {
    std::cerr << "invariant violations:\n";
    for (const auto& m : result.report.messages) std::cerr << "  " << m << "\n";
    std::cerr << result.report.to_json().dump(2) << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Part-wise coactive preference elicitation"};
  app.require_subcommand(1);

  ExperimentConfig flags;
  std::string config_file;
  std::string algo = "pcl", select = "random", mode = "bnb", out;
  bool no_stop = false, no_regret = false, quiet = false;
  auto* run = app.add_subcommand("run", "Simulate users and write metrics");
  run->add_option("--config", config_file, "JSON config mirroring the flags");
  run->add_option("--problem", flags.problem, "grid, training, hotel, hotel-small or a problem file");
  run->add_option("--algo", algo, "pcl or cl");
  run->add_option("--alpha", flags.alpha, "user informativeness in (0, 1]");
  run->add_option("--users", flags.users);
  run->add_option("--iters", flags.iterations);
  run->add_option("--select", select, "random, smallest or ucb1");
  run->add_option("--seed", flags.seed);
  run->add_option("--exploration", flags.exploration, "ucb1 exploration constant");
  run->add_option("--mode", mode, "part inference: exhaustive or bnb");
  run->add_option("--ordering", flags.ordering, "part names, first to last");
  run->add_option("--threads", flags.threads, "0: OpenMP default, 1: serial");
  run->add_option("--out", out, "output directory");
  run->add_flag("--no-stop", no_stop, "keep iterating after convergence");
  run->add_flag("--no-regret", no_regret, "skip full inference for regret");
  run->add_flag("--matched-gain", flags.matched_gain, "cl: match the gains of a pcl run");
  run->add_flag("--exact", flags.exact, "rational weight tracking and exact identity checks");
  run->add_flag("--strict", flags.strict, "abort on the first invariant violation");
  run->add_flag("--quiet", quiet);

  std::string problem_file;
  auto* validate = app.add_subcommand("validate", "Load and validate a problem file");
  validate->add_option("--problem", problem_file)->required();

  std::string weights_file, configuration_file;
  auto* certify = app.add_subcommand("certify", "Check whether a configuration is a local optimum");
  certify->add_option("--problem", problem_file)->required();
  certify->add_option("--weights", weights_file)->required();
  certify->add_option("--config", configuration_file, "configuration file")->required();

  auto* dump = app.add_subcommand("dump-gai", "Print the GAI network and feature partition");
  dump->add_option("--problem", problem_file)->required();
  std::vector<std::string> ordering;
  dump->add_option("--ordering", ordering, "part names, first to last");

  std::string export_out;
  auto* exp = app.add_subcommand("export", "Write a built-in problem as a problem file");
  exp->add_option("--problem", problem_file)->required();
  exp->add_option("--out", export_out)->required();

  std::string host = "127.0.0.1", journal;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the session HTTP service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--journal", journal, "session journal directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::vector<std::string> given;
      auto note = [&](const char* flag, const char* key) {
        if (run->count(flag) > 0) given.push_back(key);
      };
      note("--problem", "problem");
      note("--algo", "algo");
      note("--alpha", "alpha");
      note("--users", "users");
      note("--iters", "iters");
      note("--select", "select");
      note("--seed", "seed");
      note("--exploration", "exploration");
      note("--mode", "mode");
      note("--ordering", "ordering");
      note("--threads", "threads");
      note("--out", "out");
      note("--matched-gain", "matched_gain");
      note("--exact", "exact");
      note("--strict", "strict");
      note("--no-stop", "stop_at_convergence");
      note("--no-regret", "regret");
      flags.algorithm = parse_algorithm(algo);
      flags.selection = parse_selection(select);
      flags.mode = parse_mode(mode);
      flags.stop_at_convergence = !no_stop;
      flags.compute_regret = !no_regret;
      if (!out.empty()) flags.out = out;
      return run_command(config_file, flags, given, quiet);
    }
    if (*validate) {
      ProblemModel m = load_problem(problem_file);
      std::cout << "ok: " << m.name() << ", " << m.num_variables() << " variables, " << m.num_features()
                << " features, " << m.constraints().size() << " constraints, " << m.num_parts()
                << " parts, D = " << m.feature_bound() << ", S = " << m.part_feature_bound() << "\n";
      return 0;
    }
    if (*certify) {
      ProblemModel m = load_problem(problem_file);
      auto w = weights_from_json(m, read_json_file(weights_file));
      auto x = configuration_from_json(m, read_json_file(configuration_file));
      auto report = check_feasible(m, x);
      if (!report.feasible) throw InfeasibleError("configuration violates hard constraints", report.violated);
      auto cert = certify_local_optimum(m, w, x);
      nlohmann::json j = {{"local_optimum", cert.local_optimum}, {"gain", cert.gain}};
      if (cert.part) j["part"] = m.parts()[*cert.part].name;
      if (cert.witness) j["witness"] = partial_to_json(m, *cert.witness);
      std::cout << j.dump(2) << "\n";
      return cert.local_optimum ? 0 : 1;
    }
    if (*dump) {
      ProblemModel m = load_problem(problem_file);
      auto network = build_gai_network(m);
      GaiDecomposition d;
      if (ordering.empty()) {
        d = default_decomposition(m);
      } else {
        std::vector<std::size_t> order;
        for (const auto& name : ordering) {
          auto p = m.find_part(name);
          if (!p) throw DomainError("unknown part '" + name + "'");
          order.push_back(*p);
        }
        d = compute_decomposition(m, order);
      }
      std::cout << gai_to_json(m, network, d).dump(2) << "\n";
      return 0;
    }
    if (*exp) {
      save_model(load_problem(problem_file), export_out);
      return 0;
    }
    if (*serve) {
      SessionManager manager(journal.empty() ? std::nullopt : std::optional<std::filesystem::path>(journal));
      httplib::Server server;
      bind_routes(server, manager);
      std::cout << "listening on " << host << ":" << port << "\n" << std::flush;
      if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const ModelError& e) {
    std::cerr << "model error at " << e.path() << ": " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
