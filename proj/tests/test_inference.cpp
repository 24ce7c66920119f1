#include "doctest.h"
#include "oracle.hpp"

#include "pcl/gai.hpp"
#include "pcl/inference.hpp"
#include "pcl/problem_io.hpp"
#include "pcl/problems.hpp"

#include <random>

using namespace pcl;
using nlohmann::json;

namespace {

std::vector<double> normal_weights(const ProblemModel& m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> w(m.num_features());
  for (auto& v : w) v = normal(rng);
  return w;
}

std::vector<std::size_t> features_named(const ProblemModel& m, std::initializer_list<const char*> names) {
  std::vector<std::size_t> out;
  for (const char* n : names)
    for (std::size_t i = 0; i < m.num_features(); ++i)
      if (m.features()[i].name == n) out.push_back(i);
  return out;
}

Configuration random_grid(std::mt19937_64& rng) {
  Configuration x;
  for (int k = 0; k < 16; ++k) x.values.push_back(static_cast<Value>(rng() % 2));
  return x;
}

// Oracle argmax over one part, as a full configuration.
oracle::Best oracle_part(const ProblemModel& m, const std::vector<double>& w, std::size_t part,
                         const Configuration& x, const std::vector<std::size_t>& objective) {
  return oracle::best_over(m, w, m.parts()[part].variables, x.values, &objective);
}

}  // namespace

TEST_CASE("part inference on the internal edges of a block yields a checkerboard") {
  auto m = build_grid();
  std::vector<double> ones(24, 1.0);
  auto internal = features_named(m, {"h00", "h10", "v00", "v01"});
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 16; ++rep) {
    auto x = random_grid(rng);
    for (auto mode : {InferenceMode::exhaustive, InferenceMode::branch_and_bound}) {
      auto r = infer_part({&m, ones, internal, 0, x, mode});
      CHECK(r.objective_value == 4.0);
      CHECK(r.assignment.variables == std::vector<std::size_t>{0, 1, 4, 5});
      CHECK(r.assignment.values == std::vector<Value>{0, 1, 1, 0});
    }
  }
}

TEST_CASE("zero weights return the lexicographically smallest assignment") {
  for (const char* name : {"grid", "training", "hotel-small"}) {
    auto m = load_problem(name);
    std::vector<double> zeros(m.num_features(), 0.0);
    auto d = default_decomposition(m);
    std::mt19937_64 rng(3);
    auto x = random_feasible_configuration(m, rng, 5);
    for (std::size_t p = 0; p < m.num_parts(); ++p) {
      auto r = infer_part({&m, zeros, d.J_of_part(p), p, x, InferenceMode::branch_and_bound});
      auto expected = oracle_part(m, zeros, p, x, d.J_of_part(p));
      REQUIRE(expected.found);
      CHECK(with_part(x, r.assignment).values == expected.x);
    }
  }
}

TEST_CASE("a fully unavailable day is all rest") {
  auto cfg = default_training_config();
  cfg.available[2] = {false, false, false, false, false};
  auto m = build_training_plan(cfg);
  std::vector<double> w(m.num_features(), 1.0);
  auto x = lexicographic_minimum(m);
  auto r = infer_part({&m, w, all_features(m), 2, x, InferenceMode::branch_and_bound});
  for (Value v : r.assignment.values) CHECK(v == 0);
}

TEST_CASE("grid full inference") {
  auto m = build_grid();
  std::vector<double> ones(24, 1.0), minus(24, -1.0);
  for (auto mode : {InferenceMode::exhaustive, InferenceMode::branch_and_bound, InferenceMode::dynamic_programming}) {
    auto a = infer_full(m, ones, mode);
    CHECK(a.objective_value == doctest::Approx(24.0));
    // Parts are not contiguous in variable order, so DP may return the other checkerboard.
    int phase = mode == InferenceMode::dynamic_programming ? a.x.values[0] : 0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) CHECK(a.x.values[4 * r + c] == (r + c + phase) % 2);
    auto b = infer_full(m, minus, mode);
    CHECK(b.objective_value == doctest::Approx(24.0));
    CHECK(b.x.values == std::vector<Value>(16, 0));
  }
  CHECK(oracle::global_optimum(m, ones).value == 24.0);
  CHECK(oracle::global_optimum(m, minus).x == std::vector<Value>(16, 0));
}

TEST_CASE("local optimum certificate on the grid") {
  auto m = build_grid();
  std::vector<double> ones(24, 1.0);
  Configuration zeros{std::vector<Value>(16, 0)};
  auto cert = certify_local_optimum(m, ones, zeros);
  CHECK_FALSE(cert.local_optimum);
  REQUIRE(cert.part);
  CHECK(m.parts()[*cert.part].name == "b00");
  CHECK(cert.gain == doctest::Approx(12.0));
  REQUIRE(cert.witness);
  auto improved = with_part(zeros, *cert.witness);
  CHECK(utility(m, ones, improved) - utility(m, ones, zeros) == doctest::Approx(12.0));

  auto optimum = infer_full(m, ones).x;
  CHECK(certify_local_optimum(m, ones, optimum).local_optimum);
}

TEST_CASE("certificate agrees with the oracle on random grid states") {
  auto m = build_grid();
  std::mt19937_64 rng(21);
  int local = 0;
  for (int rep = 0; rep < 300; ++rep) {
    auto w = normal_weights(m, rng);
    auto x = random_grid(rng);
    // Some states are pushed to a local optimum first so both outcomes occur.
    if (rep % 2 == 0) {
      for (int sweep = 0; sweep < 8; ++sweep)
        for (std::size_t p = 0; p < 4; ++p)
          x = with_part(x, infer_part({&m, w, all_features(m), p, x, InferenceMode::branch_and_bound}).assignment);
    }
    bool certified = certify_local_optimum(m, w, x).local_optimum;
    CHECK(certified == oracle::local_optimum(m, w, x.values));
    local += certified;
  }
  CHECK(local > 0);
  CHECK(local < 300);
}

TEST_CASE("branch and bound, exhaustive and the oracle agree on random instances") {
  std::mt19937_64 rng(33);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto m = random_small_instance(seed);
    auto w = normal_weights(m, rng);
    auto d = default_decomposition(m);
    auto x = random_feasible_configuration(m, rng, 4);
    for (std::size_t p = 0; p < m.num_parts(); ++p) {
      InferenceRequest req{&m, w, d.J_of_part(p), p, x, InferenceMode::exhaustive};
      auto expected = oracle_part(m, w, p, x, d.J_of_part(p));
      if (!expected.found) {
        CHECK_THROWS_AS(infer_part(req), InfeasibleError);
        continue;
      }
      auto ex = infer_part(req);
      req.mode = InferenceMode::branch_and_bound;
      auto bb = infer_part(req);
      CHECK(ex.assignment == bb.assignment);
      CHECK(with_part(x, ex.assignment).values == expected.x);
      CHECK(ex.objective_value == doctest::Approx(expected.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("full inference modes agree with the oracle") {
  std::mt19937_64 rng(44);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto m = random_small_instance(seed);
    auto w = normal_weights(m, rng);
    auto expected = oracle::global_optimum(m, w);
    REQUIRE(expected.found);
    for (auto mode : {InferenceMode::exhaustive, InferenceMode::branch_and_bound, InferenceMode::dynamic_programming}) {
      auto r = infer_full(m, w, mode);
      CHECK(r.objective_value == doctest::Approx(expected.value).epsilon(1e-9));
      if (mode != InferenceMode::dynamic_programming) CHECK(r.x.values == expected.x);
    }
  }
  auto small = load_problem("hotel-small");
  auto w = normal_weights(small, rng);
  auto bb = infer_full(small, w, InferenceMode::branch_and_bound);
  auto dp = infer_full(small, w, InferenceMode::dynamic_programming);
  CHECK(bb.objective_value == doctest::Approx(dp.objective_value).epsilon(1e-9));
  CHECK(oracle::feasible(small, dp.x.values));
}

TEST_CASE("dynamic programming gives up past its state limit") {
  auto m = load_problem("training");
  std::vector<double> w(m.num_features(), 1.0);
  CHECK_THROWS_AS(infer_full(m, w, InferenceMode::dynamic_programming, std::nullopt, 10), InferenceTooLarge);
}

TEST_CASE("infeasible part inference names the violated constraint") {
  auto m = model_from_json(json::parse(R"({
    "name": "clash",
    "variables": [{"name": "a", "domain": [0, 1]}, {"name": "b", "domain": [1, 2]}],
    "features": [
      {"name": "fa", "expr": {"linear": [{"coef": 1, "var": "a"}]}},
      {"name": "fb", "expr": {"linear": [{"coef": 1, "var": "b"}]}}
    ],
    "constraints": [{"name": "cap", "expr": {"linear": [{"coef": 1, "var": "a"}, {"coef": 1, "var": "b"}]},
                     "sense": "<=", "rhs": 1}],
    "parts": [{"name": "A", "variables": ["a"]}, {"name": "B", "variables": ["b"]}]
  })"));
  std::vector<double> w{1.0, 1.0};
  Configuration x{{1, 1}};
  for (auto mode : {InferenceMode::exhaustive, InferenceMode::branch_and_bound}) {
    try {
      infer_part({&m, w, all_features(m), 1, x, mode});
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
      REQUIRE(e.violated().size() == 1);
      CHECK(m.constraints()[e.violated()[0]].name == "cap");
    }
  }
  // Part A can still move to a = 0.
  auto r = infer_part({&m, w, all_features(m), 0, x, InferenceMode::branch_and_bound});
  CHECK(r.assignment.values == std::vector<Value>{0});
}

TEST_CASE("feasible enumeration is lexicographic and complete") {
  auto m = build_grid();
  std::vector<double> ones(24, 1.0);
  Configuration zeros{std::vector<Value>(16, 0)};
  auto all = enumerate_feasible({&m, ones, all_features(m), 3, zeros, InferenceMode::exhaustive});
  REQUIRE(all.size() == 16);
  for (std::size_t k = 0; k < all.size(); ++k) {
    std::vector<Value> bits;
    for (int b = 3; b >= 0; --b) bits.push_back(static_cast<Value>((k >> b) & 1));
    CHECK(all[k].values == bits);
  }
}

TEST_CASE("expression bounds contain every completion") {
  std::mt19937_64 rng(55);
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    auto m = random_small_instance(seed);
    std::vector<std::vector<Value>> domains = m.domains();
    for (const auto& f : m.features()) {
      std::vector<Value> partial(m.num_variables(), kUnassigned);
      std::vector<Value> base(m.num_variables(), 0);
      std::vector<std::size_t> free;
      for (std::size_t v = 0; v < m.num_variables(); ++v) {
        if (rng() % 2) {
          partial[v] = base[v] = domains[v][rng() % domains[v].size()];
        } else {
          free.push_back(v);
        }
      }
      auto iv = f.expr.bounds(domains, partial);
      double lo = 1e300, hi = -1e300;
      oracle::enumerate(m, free, base, [&](const std::vector<Value>& y) {
        double e = pcl::to_double(oracle::eval_expr(f.expr, y));
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      });
      CHECK(iv.lo <= lo + 1e-9);
      CHECK(iv.hi >= hi - 1e-9);
    }
  }
}
