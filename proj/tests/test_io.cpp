#include "doctest.h"

#include "pcl/inference.hpp"
#include "pcl/problem_io.hpp"
#include "pcl/problems.hpp"

#include <filesystem>

using namespace pcl;
using nlohmann::json;

namespace {

json two_part_model() {
  return json::parse(R"({
    "name": "pair",
    "variables": [{"name": "a", "domain": [0, 1]}, {"name": "b", "domain": [0, 1, 2]}],
    "features": [
      {"name": "only_a", "expr": {"terms": [{"coef": 1, "literals": [{"var": "a", "value": 1}]}]}},
      {"name": "only_b", "expr": {"linear": [{"coef": "1/2", "var": "b"}]}},
      {"name": "both", "expr": {"terms": [{"coef": 1, "literals": [{"var": "a", "value": 1}, {"var": "b", "value": 2}]}]},
       "transform": "signed"}
    ],
    "constraints": [{"name": "not_both_high", "expr": {"linear": [{"coef": 1, "var": "a"}, {"coef": 1, "var": "b"}]},
                     "sense": "<=", "rhs": 2}],
    "parts": [{"name": "A", "variables": ["a"]}, {"name": "B", "variables": ["b"]}]
  })");
}

std::string model_error_path(const json& doc) {
  try {
    model_from_json(doc);
  } catch (const ModelError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST_CASE("problem files round-trip") {
  for (const auto& name : builtin_problems()) {
    auto m = load_problem(name);
    auto doc = model_to_json(m);
    auto back = model_from_json(doc);
    CHECK(model_to_json(back) == doc);
    CHECK(back.feature_bound() == m.feature_bound());
    CHECK(back.part_feature_bound() == m.part_feature_bound());
  }
}

TEST_CASE("save and load through a file") {
  auto path = std::filesystem::temp_directory_path() / "pcl_io_test_grid.json";
  save_model(build_grid(), path);
  auto m = load_problem(path.string());
  CHECK(m.num_features() == 24);
  std::filesystem::remove(path);
}

TEST_CASE("hand-written model loads with derived scopes and bounds") {
  auto m = model_from_json(two_part_model());
  CHECK(m.num_parts() == 2);
  CHECK(m.parts()[0].features == std::vector<std::size_t>{0, 2});
  CHECK(m.parts()[1].features == std::vector<std::size_t>{1, 2});
  CHECK(m.feature_bound() == 1.0);
  CHECK(m.part_feature_bound() == 2);
  Configuration x{{1, 2}};
  CHECK_FALSE(check_feasible(m, x).feasible);
}

TEST_CASE("loader errors carry a path into the document") {
  auto doc = two_part_model();
  doc["features"].erase(1);
  CHECK(model_error_path(doc).rfind("parts[1]", 0) == 0);

  doc = two_part_model();
  doc["features"][0]["expr"]["terms"][0]["literals"][0]["var"] = "zzz";
  CHECK(model_error_path(doc) == "features[0].expr.terms[0].literals[0].var");

  doc = two_part_model();
  doc["features"][1]["expr"]["linear"][0]["coef"] = "1/0";
  CHECK(model_error_path(doc).rfind("features[1]", 0) == 0);

  doc = two_part_model();
  doc["parts"][1]["variables"] = json::array({"a"});
  CHECK(model_error_path(doc).rfind("parts", 0) == 0);

  doc = two_part_model();
  doc["variables"][1]["domain"] = json::array();
  CHECK(model_error_path(doc) == "variables[1].domain");
}

TEST_CASE("configurations and partial configurations from JSON") {
  auto m = build_grid();
  auto x = configuration_from_json(m, json::array({0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0}));
  CHECK(configuration_from_json(m, configuration_to_json(m, x)) == x);
  CHECK_THROWS_AS(configuration_from_json(m, json{{"n00", 0}}), DomainError);
  auto p = partial_from_json(m, 0, json{{"n00", 1}, {"n01", 1}, {"n10", 0}, {"n11", 0}});
  CHECK(p.values == std::vector<Value>{1, 1, 0, 0});
  CHECK_THROWS_AS(partial_from_json(m, 0, json{{"n00", 1}, {"n01", 1}, {"n10", 0}, {"n02", 0}}), ConflictError);
  CHECK_THROWS_AS(partial_from_json(m, 0, json{{"n00", 1}, {"n01", 1}, {"n10", 0}}), DomainError);
  CHECK_THROWS_AS(partial_from_json(m, 0, json{{"n00", 1}, {"n01", 1}, {"n10", 0}, {"n11", 5}}), DomainError);
}

TEST_CASE("weights from JSON by name or position") {
  auto m = model_from_json(two_part_model());
  CHECK(weights_from_json(m, json::array({1, 2, 3})) == std::vector<double>{1, 2, 3});
  CHECK(weights_from_json(m, json{{"both", -1.5}}) == std::vector<double>{0, 0, -1.5});
  CHECK_THROWS_AS(weights_from_json(m, json::array({1, 2})), DomainError);
  CHECK_THROWS_AS(weights_from_json(m, json{{"nope", 1}}), DomainError);
}

TEST_CASE("rationals") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK(format_rational(Rational(-7, 3)) == "-7/3");
  CHECK(rational_from_double(0.1) == Rational(1, 10));
  CHECK(rational_from_double(-2.5) == Rational(-5, 2));
}
