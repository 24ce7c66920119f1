#include "doctest.h"

#include "pcl/problems.hpp"
#include "pcl/selection.hpp"

#include <cmath>

using namespace pcl;

TEST_CASE("selection names") {
  CHECK(parse_selection("random") == SelectionKind::random);
  CHECK(parse_selection("smallest") == SelectionKind::smallest_first);
  CHECK(parse_selection("smallest-first") == SelectionKind::smallest_first);
  CHECK(parse_selection("ucb1") == SelectionKind::ucb1);
  CHECK_THROWS_AS(parse_selection("greedy"), DomainError);
}

TEST_CASE("smallest-first cycles by ascending overlap") {
  auto m = build_grid();
  SelectionStrategy s(SelectionKind::smallest_first, m, default_decomposition(m), 0);
  std::vector<std::string> order;
  for (int k = 0; k < 8; ++k) order.push_back(m.parts()[s.select()].name);
  CHECK(order == std::vector<std::string>{"b11", "b01", "b10", "b00", "b11", "b01", "b10", "b00"});
}

TEST_CASE("ucb1 visits every part once before using the index") {
  auto m = build_grid();
  SelectionStrategy s(SelectionKind::ucb1, m, default_decomposition(m), 0, 1.0);
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(std::isinf(s.ucb_index(p)));
    CHECK(s.select() == p);
    s.record_reward(p, p == 2 ? 1.0 : 0.0);
  }
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(s.visits(p) == 1);
    double expected = (p == 2 ? 1.0 : 0.0) + std::sqrt(2.0 * std::log(4.0));
    CHECK(s.ucb_index(p) == doctest::Approx(expected));
  }
  CHECK(s.select() == 2);
  s.record_reward(2, 0.5);
  CHECK(s.ucb_index(2) == doctest::Approx(0.75 + std::sqrt(2.0 * std::log(5.0) / 2.0)));
  CHECK(s.ucb_index(0) == doctest::Approx(std::sqrt(2.0 * std::log(5.0))));
}

TEST_CASE("ucb1 favours the rewarding part") {
  auto m = build_grid();
  SelectionStrategy s(SelectionKind::ucb1, m, default_decomposition(m), 0, 0.5);
  std::vector<int> count(4, 0);
  for (int t = 0; t < 400; ++t) {
    auto p = s.select();
    ++count[p];
    s.record_reward(p, p == 1 ? 0.8 : 0.1);
  }
  CHECK(count[1] > count[0]);
  CHECK(count[1] > count[2]);
  CHECK(count[1] > count[3]);
  CHECK(count[1] > 200);
}

TEST_CASE("random selection is uniform and ignores rewards") {
  auto m = build_grid();
  auto d = default_decomposition(m);
  SelectionStrategy s(SelectionKind::random, m, d, 42);
  SelectionStrategy twin(SelectionKind::random, m, d, 42);
  const int n = 40000;
  std::vector<int> count(4, 0);
  for (int t = 0; t < n; ++t) {
    auto p = s.select();
    ++count[p];
    s.record_reward(p, 1.0);
    CHECK(twin.select() == p);
  }
  double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : count) CHECK(std::abs(c - n / 4.0) <= 3 * sigma);
  for (std::size_t p = 0; p < 4; ++p) CHECK(s.visits(p) == 0);
}

TEST_CASE("surrogate reward is clipped and scaled") {
  CHECK(SelectionStrategy::surrogate_reward(-3.0, 1.0, 8.0) == 0.0);
  CHECK(SelectionStrategy::surrogate_reward(8.0, 1.0, 8.0) == 0.5);
  CHECK(SelectionStrategy::surrogate_reward(100.0, 1.0, 8.0) == 1.0);
  CHECK(SelectionStrategy::surrogate_reward(1.0, 0.0, 8.0) == 0.0);
}
