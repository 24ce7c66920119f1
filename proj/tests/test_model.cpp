#include "doctest.h"
#include "oracle.hpp"

#include "pcl/inference.hpp"
#include "pcl/problem_io.hpp"
#include "pcl/problems.hpp"

#include <random>
#include <set>

using namespace pcl;

namespace {

Configuration grid_of(std::initializer_list<Value> v) { return Configuration{std::vector<Value>(v)}; }

Configuration checkerboard() {
  Configuration x;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) x.values.push_back((r + c) % 2);
  return x;
}

std::vector<std::size_t> features_named(const ProblemModel& m, std::initializer_list<const char*> names) {
  std::vector<std::size_t> out;
  for (const char* n : names)
    for (std::size_t i = 0; i < m.num_features(); ++i)
      if (m.features()[i].name == n) out.push_back(i);
  return out;
}

}  // namespace

TEST_CASE("grid feature vectors") {
  auto m = build_grid();
  Configuration zeros{std::vector<Value>(16, 0)};
  for (double f : feature_vector(m, zeros)) CHECK(f == -1.0);
  for (double f : feature_vector(m, checkerboard())) CHECK(f == 1.0);
}

TEST_CASE("feature vector rejects out-of-domain values") {
  auto m = build_grid();
  Configuration x{std::vector<Value>(16, 0)};
  x.values[3] = 2;
  CHECK_THROWS_AS(feature_vector(m, x), DomainError);
  CHECK_THROWS_AS(check_domain(m, Configuration{std::vector<Value>(15, 0)}), DomainError);
}

TEST_CASE("training plan with identical consecutive days has all diversity features at -1") {
  auto m = build_training_plan(default_training_config());
  Configuration x = lexicographic_minimum(m);
  // Same activities on days 3 and 4 in their shared available slots (slot 1).
  x.values[2 * 5 + 0] = 1;
  x.values[3 * 5 + 0] = 1;
  auto fv = feature_vector(m, x);
  auto direct = oracle::features(m, x.values);
  for (std::size_t i = 0; i < m.num_features(); ++i) {
    CHECK(fv[i] == doctest::Approx(to_double(direct[i])));
    if (m.features()[i].name.find("_day3_4") != std::string::npos) CHECK(fv[i] == -1.0);
  }
}

TEST_CASE("partial utility") {
  auto m = build_grid();
  std::vector<double> ones(24, 1.0);
  Configuration zeros{std::vector<Value>(16, 0)};
  CHECK(evaluate_partial_utility(m, ones, all_features(m), zeros) == -24.0);
  CHECK(evaluate_partial_utility(m, ones, std::vector<std::size_t>{}, zeros) == 0.0);
  // Internal edges of b00: h00, h10, v00, v01.
  auto internal = features_named(m, {"h00", "h10", "v00", "v01"});
  CHECK(evaluate_partial_utility(m, ones, internal, zeros) == -4.0);
  CHECK(oracle::utility(m, ones, zeros.values, &internal) == -4.0);
  CHECK_THROWS_AS(evaluate_partial_utility(m, ones, std::vector<std::size_t>{24}, zeros), DomainError);
}

TEST_CASE("utility additivity over a partition of the features") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (const char* name : {"grid", "training", "hotel"}) {
    auto m = load_problem(name);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> w(m.num_features());
      for (auto& v : w) v = normal(rng);
      auto x = random_feasible_configuration(m, rng, 10);
      std::vector<std::size_t> a, b;
      for (std::size_t i = 0; i < m.num_features(); ++i) (rng() % 2 ? a : b).push_back(i);
      double whole = utility(m, w, x);
      CHECK(evaluate_partial_utility(m, w, a, x) + evaluate_partial_utility(m, w, b, x) ==
            doctest::Approx(whole).epsilon(1e-9));
      std::vector<Rational> we;
      for (double v : w) we.push_back(rational_from_double(v));
      Rational exact_whole = evaluate_partial_utility_exact(m, we, all_features(m), x);
      CHECK(evaluate_partial_utility_exact(m, we, a, x) + evaluate_partial_utility_exact(m, we, b, x) == exact_whole);
    }
  }
}

TEST_CASE("part algebra") {
  auto m = build_grid();
  Configuration x = grid_of({1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 1, 0, 1});
  auto b00 = restrict_to_part(m, x, 0);
  auto rest = complement_of(m, x, 0);
  CHECK(to_configuration(m, combine(b00, rest)) == x);
  CHECK(to_configuration(m, combine(rest, b00)) == x);
  CHECK(combine(b00, b00) == b00);
  auto b01 = restrict_to_part(m, x, 1);
  auto both = combine(b00, b01);
  CHECK(both.parts == std::vector<std::size_t>{0, 1});
  CHECK(both.variables.size() == 8);
  CHECK(combine(combine(b00, b01), rest) == combine(b00, combine(b01, rest)));

  auto other = restrict_to_part(m, checkerboard(), 0);
  if (other.values != b00.values) CHECK_THROWS_AS(combine(b00, other), ConflictError);
}

TEST_CASE("feasibility reports") {
  auto grid = build_grid();
  CHECK(check_feasible(grid, Configuration{std::vector<Value>(16, 1)}).feasible);

  auto m = build_training_plan(default_training_config());
  Configuration rest = lexicographic_minimum(m);
  for (Value v : rest.values) CHECK(v == 0);
  CHECK(check_feasible(m, rest).feasible);

  // day1_slot2 is unavailable.
  Configuration x = rest;
  x.values[1] = 1;
  auto r = check_feasible(m, x);
  CHECK_FALSE(r.feasible);
  REQUIRE(r.violated.size() == 1);
  CHECK(m.constraints()[r.violated[0]].name == "unavailable_day1_slot2");

  // Squats in day1 slots 1 and 3: legs fatigue 3 + 3 over one 3-slot window.
  Configuration y = rest;
  y.values[0] = 6;
  y.values[2] = 6;
  auto s = check_feasible(m, y);
  CHECK_FALSE(s.feasible);
  std::set<std::string> names;
  for (auto c : s.violated) names.insert(m.constraints()[c].name);
  CHECK(names.count("fatigue_legs_day1_slot1") == 1);
  CHECK_FALSE(oracle::feasible(m, y.values));
}

TEST_CASE("feature bound holds on random feasible configurations") {
  for (const char* name : {"grid", "training", "hotel"}) {
    auto m = load_problem(name);
    std::mt19937_64 rng(11);
    Configuration x = lexicographic_minimum(m);
    double worst = 0.0;
    for (int k = 0; k < (std::string(name) == "grid" ? 10000 : 1000); ++k) {
      x = random_feasible_configuration(m, rng, 1);
      for (double f : feature_vector(m, x)) worst = std::max(worst, std::abs(f));
    }
    CHECK(worst <= m.feature_bound() + 1e-12);
  }
}

TEST_CASE("part cover, exclusivity and S") {
  for (const char* name : {"grid", "training", "hotel", "hotel-small"}) {
    auto m = load_problem(name);
    std::size_t covered = 0;
    std::vector<int> owner(m.num_variables(), 0);
    std::size_t s = 0;
    std::set<std::size_t> union_i;
    for (std::size_t p = 0; p < m.num_parts(); ++p) {
      covered += m.parts()[p].variables.size();
      for (auto v : m.parts()[p].variables) ++owner[v];
      s = std::max(s, m.parts()[p].features.size());
      union_i.insert(m.parts()[p].features.begin(), m.parts()[p].features.end());
      std::size_t exclusive = 0;
      for (auto i : m.parts()[p].features) exclusive += m.feature_parts(i).size() == 1;
      CHECK(exclusive > 0);
    }
    CHECK(covered == m.num_variables());
    for (int o : owner) CHECK(o == 1);
    CHECK(union_i.size() == m.num_features());
    CHECK(m.part_feature_bound() == s);
  }
}
