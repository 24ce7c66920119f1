#include "doctest.h"
#include "oracle.hpp"

#include "pcl/gai.hpp"
#include "pcl/problems.hpp"
#include "pcl/simuser.hpp"

#include <random>

using namespace pcl;

namespace {

struct OracleFeedback {
  std::vector<Value> values;
  double gap = 0.0;
  double gain = 0.0;
};

// Smallest gain reaching alpha * gap, first in lexicographic order among ties.
OracleFeedback oracle_feedback(const ProblemModel& m, const std::vector<double>& w, const std::vector<Value>& x,
                               const std::vector<std::size_t>& vars, const std::vector<std::size_t>* objective,
                               double threshold_scale, std::optional<double> target = std::nullopt) {
  double here = oracle::utility(m, w, x, objective);
  std::vector<std::pair<std::vector<Value>, double>> options;
  double gap = 0.0;
  oracle::enumerate(m, vars, x, [&](const std::vector<Value>& y) {
    if (!oracle::feasible(m, y)) return;
    double g = oracle::utility(m, w, y, objective) - here;
    options.emplace_back(y, g);
    gap = std::max(gap, g);
  });
  OracleFeedback out{x, gap, 0.0};
  if (gap <= kEpsilon) return out;
  double need = target ? std::min(*target, gap) : threshold_scale * gap;
  bool found = false;
  for (const auto& [y, g] : options) {
    if (g < need - kEpsilon) continue;
    if (!found || g < out.gain - kEpsilon) {
      out.values = y;
      out.gain = g;
      found = true;
    }
  }
  return out;
}

std::vector<Value> part_values(const ProblemModel& m, const std::vector<Value>& x, std::size_t part) {
  std::vector<Value> out;
  for (auto v : m.parts()[part].variables) out.push_back(x[v]);
  return out;
}

}  // namespace

TEST_CASE("grid block improvement at alpha 0.5") {
  auto m = build_grid();
  SimulatedUser user{std::vector<double>(24, 1.0), 0.5, 0};
  Configuration zeros{std::vector<Value>(16, 0)};
  const auto& I = m.parts()[0].features;
  auto fb = improve_part(user, m, zeros, 0, I);
  CHECK(fb.gap == 12.0);
  CHECK(fb.gain == 6.0);
  CHECK_FALSE(fb.satisfied);
  auto expected = oracle_feedback(m, user.w_star, zeros.values, m.parts()[0].variables, &I, 0.5);
  CHECK(expected.gap == 12.0);
  CHECK(fb.gain == expected.gain);
  CHECK(fb.values == part_values(m, expected.values, 0));
  CHECK(fb.values == std::vector<Value>{0, 0, 1, 0});
}

TEST_CASE("part improvements match the oracle on random instances") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto m = random_small_instance(seed);
    auto d = default_decomposition(m);
    std::vector<double> w(m.num_features());
    for (auto& v : w) v = normal(rng);
    double alpha = std::array<double, 4>{0.1, 0.3, 0.5, 1.0}[seed % 4];
    SimulatedUser user{w, alpha, seed};
    auto x = random_feasible_configuration(m, rng, 3);
    for (std::size_t p = 0; p < m.num_parts(); ++p) {
      const auto& I = m.parts()[p].features;
      auto fb = improve_part(user, m, x, p, I);
      auto expected = oracle_feedback(m, w, x.values, m.parts()[p].variables, &I, alpha);
      CHECK(fb.gap == doctest::Approx(expected.gap).epsilon(1e-9));
      CHECK(fb.values == part_values(m, expected.values, p));
      CHECK(fb.gain >= alpha * fb.gap - kEpsilon);
      CHECK(fb.satisfied == (fb.gap <= kEpsilon));
      if (alpha == 1.0) CHECK(fb.gain == doctest::Approx(fb.gap).epsilon(1e-9));
    }
  }
}

TEST_CASE("a locally optimal part is returned unchanged") {
  auto m = build_grid();
  SimulatedUser user{std::vector<double>(24, 1.0), 0.3, 0};
  Configuration board;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) board.values.push_back((r + c) % 2);
  for (std::size_t p = 0; p < 4; ++p) {
    auto fb = improve_part(user, m, board, p, m.parts()[p].features);
    CHECK(fb.satisfied);
    CHECK(fb.gap == 0.0);
    CHECK(fb.values == part_values(m, board.values, p));
  }
  auto full = improve_full(user, m, board);
  CHECK(full.satisfied);
  CHECK(full.values == board.values);
}

TEST_CASE("full improvements match the oracle") {
  auto m = build_grid();
  // Every grid configuration with its exact feature vector, in lexicographic order.
  std::vector<std::vector<Value>> configs;
  std::vector<std::vector<double>> phis;
  oracle::enumerate(m, oracle::all_vars(m), std::vector<Value>(16, 0), [&](const std::vector<Value>& y) {
    configs.push_back(y);
    std::vector<double> phi;
    for (const auto& f : oracle::features(m, y)) phi.push_back(to_double(f));
    phis.push_back(std::move(phi));
  });
  auto feedback = [&](const std::vector<double>& w, std::size_t current, double scale, std::optional<double> target) {
    std::vector<double> u(configs.size(), 0.0);
    for (std::size_t k = 0; k < configs.size(); ++k)
      for (std::size_t i = 0; i < w.size(); ++i) u[k] += w[i] * phis[k][i];
    double gap = 0.0;
    for (double v : u) gap = std::max(gap, v - u[current]);
    OracleFeedback out{configs[current], gap, 0.0};
    if (gap <= kEpsilon) return out;
    double need = target ? std::min(*target, gap) : scale * gap;
    bool found = false;
    for (std::size_t k = 0; k < configs.size(); ++k) {
      double g = u[k] - u[current];
      if (g < need - kEpsilon) continue;
      if (!found || g < out.gain - kEpsilon) {
        out.values = configs[k];
        out.gain = g;
        found = true;
      }
    }
    return out;
  };

  std::mt19937_64 rng(12);
  for (const auto& user : sample_users(m, 6, 4, 0.3)) {
    FullImprovementOracle cached(user, m);
    for (int rep = 0; rep < 4; ++rep) {
      std::size_t index = rng() % configs.size();
      Configuration x{configs[index]};
      auto expected = feedback(user.w_star, index, user.alpha, std::nullopt);
      auto fb = improve_full(user, m, x);
      CHECK(fb.gap == doctest::Approx(expected.gap).epsilon(1e-9));
      CHECK(fb.values == expected.values);
      auto fc = cached.improve(x);
      CHECK(fc.values == fb.values);
      CHECK(fc.gain == fb.gain);

      double target = 0.25 * expected.gap + 0.1;
      auto matched = cached.improve(x, target);
      CHECK(matched.values == feedback(user.w_star, index, 0.0, target).values);
      CHECK(matched.gain >= std::min(target, matched.gap) - kEpsilon);
    }
  }
}

TEST_CASE("full improvement refuses spaces beyond its limit") {
  auto m = load_problem("training");
  SimulatedUser user{std::vector<double>(m.num_features(), 1.0), 0.3, 0};
  CHECK_THROWS_AS(improve_full(user, m, lexicographic_minimum(m)), DomainError);
}

TEST_CASE("user sampling") {
  auto m = build_grid();
  auto a = sample_users(m, 5, 9, 0.3);
  auto b = sample_users(m, 5, 9, 0.3);
  auto more = sample_users(m, 7, 9, 0.3);
  REQUIRE(a.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(a[k].w_star == b[k].w_star);
    CHECK(a[k].w_star == more[k].w_star);
    CHECK(a[k].alpha == 0.3);
  }
  CHECK(a[0].w_star != a[1].w_star);

  auto many = sample_users(m, 1000000 / 24 + 1, 1, 0.3);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& u : many)
    for (double v : u.w_star) {
      sum += v;
      sq += v * v;
      ++n;
    }
  CHECK(n >= 1000000);
  CHECK(std::abs(sum / n) <= 0.01);
  CHECK(std::abs(sq / n - 1.0) <= 0.01);

  auto round = users_from_json(users_to_json(a));
  REQUIRE(round.size() == a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(round[k].w_star == a[k].w_star);
    CHECK(round[k].alpha == a[k].alpha);
    CHECK(round[k].seed == a[k].seed);
  }
}
