#include "pcl/problems.hpp"

#include "pcl/problem_io.hpp"

#include <algorithm>
#include <random>

#ifndef PCL_ASSET_DIR
#define PCL_ASSET_DIR "assets"
#endif

namespace pcl {

namespace {

Variable variable(std::string name, Value lo, Value hi) {
  Variable v{std::move(name), {}};
  for (Value x = lo; x <= hi; ++x) v.domain.push_back(x);
  return v;
}

FeatureDef feature(std::string name, Expression e, Transform t = Transform::identity()) {
  return FeatureDef{std::move(name), std::move(e), std::move(t), {}, false};
}

Constraint constraint(std::string name, Expression e, Sense sense, Rational rhs,
                      std::vector<Literal> guard = {}) {
  Constraint c;
  c.name = std::move(name);
  c.guard = std::move(guard);
  c.expr = std::move(e);
  c.sense = sense;
  c.rhs = std::move(rhs);
  return c;
}

}  // namespace

ProblemModel build_grid() {
  ModelSpec spec;
  spec.name = "grid";
  auto node = [](int r, int c) { return static_cast<std::size_t>(4 * r + c); };
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) spec.variables.push_back(variable("n" + std::to_string(r) + std::to_string(c), 0, 1));

  auto differ = [](std::size_t a, std::size_t b) {
    Expression e;
    e.add_indicator(1, {{a, 0}, {b, 1}});
    e.add_indicator(1, {{a, 1}, {b, 0}});
    return e;
  };
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c)
      spec.features.push_back(feature("h" + std::to_string(r) + std::to_string(c),
                                      differ(node(r, c), node(r, c + 1)), Transform::signed_indicator()));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c)
      spec.features.push_back(feature("v" + std::to_string(r) + std::to_string(c),
                                      differ(node(r, c), node(r + 1, c)), Transform::signed_indicator()));

  for (int br = 0; br < 2; ++br)
    for (int bc = 0; bc < 2; ++bc) {
      BasicPart p{"b" + std::to_string(br) + std::to_string(bc), {}, {}};
      for (int r = 2 * br; r < 2 * br + 2; ++r)
        for (int c = 2 * bc; c < 2 * bc + 2; ++c) p.variables.push_back(node(r, c));
      spec.parts.push_back(std::move(p));
    }
  spec.metadata = {{"kind", "grid"}, {"rows", 4}, {"cols", 4}};
  return ProblemModel::build(std::move(spec));
}

TrainingConfig training_config_from_json(const nlohmann::json& doc) {
  TrainingConfig cfg;
  cfg.version = doc.value("version", "");
  for (const auto& a : doc.at("activities")) {
    Activity act;
    act.name = a.at("name").get<std::string>();
    act.improvement = a.at("improvement").get<std::array<int, 5>>();
    act.fatigue = a.at("fatigue").get<std::array<int, 5>>();
    cfg.activities.push_back(std::move(act));
  }
  cfg.fatigue_threshold = doc.at("fatigue_threshold").get<std::array<int, 5>>();
  for (const auto& day : doc.at("available")) cfg.available.push_back(day.get<std::array<bool, 5>>());
  if (cfg.activities.empty()) throw ModelError("activities", "activity table is empty");
  if (cfg.available.size() < 2) throw ModelError("available", "need at least two days");
  return cfg;
}

TrainingConfig default_training_config() {
  return training_config_from_json(read_json_file(asset_dir() / "training_activities.json"));
}

ProblemModel build_training_plan(const TrainingConfig& config) {
  ModelSpec spec;
  spec.name = "training";
  const std::size_t days = config.available.size();
  const std::size_t slots = 5;
  const auto num_activities = static_cast<Value>(config.activities.size());
  auto var = [&](std::size_t d, std::size_t s) { return d * slots + s; };
  for (std::size_t d = 0; d < days; ++d)
    for (std::size_t s = 0; s < slots; ++s)
      spec.variables.push_back(variable("day" + std::to_string(d + 1) + "_slot" + std::to_string(s + 1), 0,
                                        num_activities));

  const auto total_slots = static_cast<long>(days * slots);
  for (std::size_t b = 0; b < kBodyParts.size(); ++b) {
    int max_gain = 1, max_fatigue = 1;
    for (const auto& a : config.activities) {
      max_gain = std::max(max_gain, a.improvement[b]);
      max_fatigue = std::max(max_fatigue, a.fatigue[b]);
    }
    Expression gain, tired;
    for (std::size_t v = 0; v < days * slots; ++v)
      for (Value a = 1; a <= num_activities; ++a) {
        const auto& act = config.activities[static_cast<std::size_t>(a - 1)];
        if (act.improvement[b] != 0) gain.add_indicator(Rational(act.improvement[b], total_slots * max_gain), {{v, a}});
        if (act.fatigue[b] != 0) tired.add_indicator(Rational(act.fatigue[b], total_slots * max_fatigue), {{v, a}});
      }
    spec.features.push_back(feature(std::string(kBodyParts[b]) + "_improvement", std::move(gain)));
    spec.features.push_back(feature(std::string(kBodyParts[b]) + "_fatigue", std::move(tired)));
  }

  // +1 when two consecutive days schedule activity a in different slots.
  for (std::size_t d = 0; d + 1 < days; ++d)
    for (Value a = 1; a <= num_activities; ++a) {
      Expression e;
      for (std::size_t s = 0; s < slots; ++s) {
        e.add_indicator(1, {{var(d, s), a}});
        e.add_indicator(1, {{var(d + 1, s), a}});
        e.add_indicator(-2, {{var(d, s), a}, {var(d + 1, s), a}});
      }
      const auto& name = config.activities[static_cast<std::size_t>(a - 1)].name;
      spec.features.push_back(feature("vary_" + name + "_day" + std::to_string(d + 1) + "_" + std::to_string(d + 2),
                                      std::move(e), Transform::signed_indicator()));
    }

  for (std::size_t d = 0; d < days; ++d) {
    Expression load;
    for (std::size_t s = 0; s < slots; ++s)
      for (Value a = 1; a <= num_activities; ++a) load.add_indicator(Rational(1, static_cast<long>(slots)), {{var(d, s), a}});
    spec.features.push_back(feature("day" + std::to_string(d + 1) + "_load", std::move(load)));
  }

  for (std::size_t d = 0; d < days; ++d)
    for (std::size_t s = 0; s < slots; ++s) {
      if (config.available[d][s]) continue;
      Expression e;
      for (Value a = 1; a <= num_activities; ++a) e.add_indicator(1, {{var(d, s), a}});
      spec.constraints.push_back(constraint("unavailable_" + spec.variables[var(d, s)].name, std::move(e),
                                            Sense::less_equal, 0));
    }
  for (std::size_t b = 0; b < kBodyParts.size(); ++b)
    for (std::size_t start = 0; start + 3 <= days * slots; ++start) {
      Expression e;
      for (std::size_t v = start; v < start + 3; ++v)
        for (Value a = 1; a <= num_activities; ++a) {
          int f = config.activities[static_cast<std::size_t>(a - 1)].fatigue[b];
          if (f != 0) e.add_indicator(f, {{v, a}});
        }
      if (e.indicators().empty()) continue;
      spec.constraints.push_back(constraint(std::string("fatigue_") + kBodyParts[b] + "_" +
                                                spec.variables[start].name,
                                            std::move(e), Sense::less_equal, config.fatigue_threshold[b]));
    }

  for (std::size_t d = 0; d < days; ++d) {
    BasicPart p{"day" + std::to_string(d + 1), {}, {}};
    for (std::size_t s = 0; s < slots; ++s) p.variables.push_back(var(d, s));
    spec.parts.push_back(std::move(p));
  }

  nlohmann::json activities = nlohmann::json::array({"rest"});
  for (const auto& a : config.activities) activities.push_back(a.name);
  nlohmann::json available = nlohmann::json::array();
  for (const auto& day : config.available) available.push_back(day);
  spec.metadata = {{"kind", "training"},
                   {"asset_version", config.version},
                   {"values", activities},
                   {"available", available},
                   {"slots_per_day", slots}};
  return ProblemModel::build(std::move(spec));
}

HotelConfig reduced_hotel_config() {
  HotelConfig c;
  c.floors = 1;
  c.rooms_per_floor = 4;
  c.max_per_item = 1;
  c.budget = 12;
  return c;
}

ProblemModel build_hotel(const HotelConfig& config) {
  enum : Value { kEmpty = 0, kNormal = 1, kSuite = 2, kDorm = 3 };
  const std::size_t rooms = config.floors * config.rooms_per_floor;
  const std::size_t width = config.rooms_per_floor;
  if (rooms < 2 || width < 2) throw ModelError("hotel", "need at least two rooms per floor");
  const bool reduced = rooms != 15;

  ModelSpec spec;
  spec.name = reduced ? "hotel-small" : "hotel";
  // Variable layout per room: type, single, double, bunk, table, sofa.
  const std::vector<std::string> fields = {"type", "single", "double", "bunk", "table", "sofa"};
  const std::vector<int> item_cost = {0, 1, 2, 2, 1, 2};
  const std::vector<int> item_guests = {0, 1, 2, 2, 0, 0};
  auto var = [&](std::size_t r, std::size_t f) { return r * fields.size() + f; };
  for (std::size_t r = 0; r < rooms; ++r) {
    std::string prefix = "room" + std::to_string(r + 1) + "_";
    spec.variables.push_back(variable(prefix + "type", 0, 3));
    for (std::size_t f = 1; f <= 3; ++f) spec.variables.push_back(variable(prefix + fields[f], 0, config.max_per_item));
    spec.variables.push_back(variable(prefix + "table", 0, 1));
    spec.variables.push_back(variable(prefix + "sofa", 0, 1));
  }

  auto floor_pos = [&](std::size_t r) { return r % width; };
  auto bath_distance = [&](std::size_t r) {
    std::size_t p = floor_pos(r);
    return std::min(p, width - 1 - p);
  };
  auto near_bathroom = [&](std::size_t r) { return bath_distance(r) <= 1; };
  // Corridor distance to the nearest bar-side room (ground floor, away from the ends).
  auto bar_distance = [&](std::size_t r) {
    std::size_t best = SIZE_MAX;
    for (std::size_t q = 1; q + 1 < width; ++q) best = std::min(best, r > q ? r - q : q - r);
    return best;
  };
  auto near_bar = [&](std::size_t r) { return bar_distance(r) == 0; };
  auto neighbors = [&](std::size_t r) {
    std::vector<std::size_t> out;
    if (r > 0) out.push_back(r - 1);
    if (r + 1 < rooms) out.push_back(r + 1);
    return out;
  };
  std::size_t max_bar = 0;
  for (std::size_t r = 0; r < rooms; ++r) max_bar = std::max(max_bar, bar_distance(r));
  std::vector<int> capacity = config.capacity;
  if (capacity.empty())
    for (std::size_t r = 0; r < rooms; ++r) capacity.push_back(r % 2 == 0 ? 3 : 4);
  if (capacity.size() != rooms) throw ModelError("hotel.capacity", "one capacity per room");

  auto sum_items = [&](std::size_t r, std::initializer_list<std::size_t> items) {
    Expression e;
    for (auto f : items) e.add_linear(1, var(r, f));
    return e;
  };
  auto is_type = [&](std::size_t r, Value t) { return std::vector<Literal>{{var(r, 0), t}}; };

  for (std::size_t r = 0; r < rooms; ++r) {
    std::string room = "room" + std::to_string(r + 1);
    spec.constraints.push_back(constraint(room + "_capacity", sum_items(r, {1, 2, 3, 4, 5}), Sense::less_equal,
                                          capacity[r]));
    spec.constraints.push_back(constraint(room + "_unassigned_empty", sum_items(r, {1, 2, 3, 4, 5}),
                                          Sense::less_equal, 0, is_type(r, kEmpty)));
    spec.constraints.push_back(
        constraint(room + "_normal_min_beds", sum_items(r, {1, 2}), Sense::greater_equal, 1, is_type(r, kNormal)));
    if (2 * config.max_per_item > 3)
      spec.constraints.push_back(
          constraint(room + "_normal_max_beds", sum_items(r, {1, 2}), Sense::less_equal, 3, is_type(r, kNormal)));
    spec.constraints.push_back(
        constraint(room + "_normal_no_bunk", sum_items(r, {3}), Sense::less_equal, 0, is_type(r, kNormal)));
    spec.constraints.push_back(
        constraint(room + "_normal_table", sum_items(r, {4}), Sense::greater_equal, 1, is_type(r, kNormal)));
    spec.constraints.push_back(
        constraint(room + "_suite_one_bed", sum_items(r, {1, 2}), Sense::equal, 1, is_type(r, kSuite)));
    spec.constraints.push_back(
        constraint(room + "_suite_no_bunk", sum_items(r, {3}), Sense::less_equal, 0, is_type(r, kSuite)));
    spec.constraints.push_back(
        constraint(room + "_suite_table", sum_items(r, {4}), Sense::greater_equal, 1, is_type(r, kSuite)));
    spec.constraints.push_back(
        constraint(room + "_suite_sofa", sum_items(r, {5}), Sense::greater_equal, 1, is_type(r, kSuite)));
    spec.constraints.push_back(
        constraint(room + "_dorm_bunk", sum_items(r, {3}), Sense::greater_equal, 1, is_type(r, kDorm)));
    if (!near_bathroom(r)) {
      Expression e;
      e.add_indicator(1, is_type(r, kNormal));
      e.add_indicator(1, is_type(r, kSuite));
      spec.constraints.push_back(constraint(room + "_far_from_bathroom", std::move(e), Sense::less_equal, 0));
    } else if (!near_bar(r)) {
      Expression e;
      e.add_indicator(1, is_type(r, kSuite));
      spec.constraints.push_back(constraint(room + "_far_from_bar", std::move(e), Sense::less_equal, 0));
    }
  }

  const auto n_rooms = static_cast<long>(rooms);
  for (std::size_t r = 0; r < rooms; ++r) {
    std::string room = "room" + std::to_string(r + 1);
    auto indicator = [&](Value t) {
      Expression e;
      e.add_indicator(1, is_type(r, t));
      return e;
    };
    spec.features.push_back(feature(room + "_normal", indicator(kNormal)));
    spec.features.push_back(feature(room + "_suite", indicator(kSuite)));
    spec.features.push_back(feature(room + "_dorm", indicator(kDorm)));
    Expression pieces;
    for (std::size_t f = 1; f <= 5; ++f) pieces.add_linear(Rational(1, 4), var(r, f));
    spec.features.push_back(feature(room + "_pieces", std::move(pieces)));

    auto nb = neighbors(r);
    Expression same, clash;
    for (auto q : nb) {
      for (Value t = kNormal; t <= kDorm; ++t) same.add_indicator(Rational(1, 2), {{var(r, 0), t}, {var(q, 0), t}});
      clash.add_indicator(Rational(1, 2), {{var(r, 0), kSuite}, {var(q, 0), kDorm}});
      clash.add_indicator(Rational(1, 2), {{var(r, 0), kDorm}, {var(q, 0), kSuite}});
    }
    spec.features.push_back(feature(room + "_same_type_neighbors", std::move(same)));
    spec.features.push_back(feature(room + "_suite_dorm_neighbors", std::move(clash)));

    Expression bath, bar;
    for (Value t = kNormal; t <= kDorm; ++t) {
      bath.add_indicator(Rational(static_cast<long>(1 + bath_distance(r)), static_cast<long>(1 + width / 2)),
                         is_type(r, t));
      bar.add_indicator(Rational(static_cast<long>(1 + bar_distance(r)), static_cast<long>(1 + max_bar)),
                        is_type(r, t));
    }
    spec.features.push_back(feature(room + "_bathroom_walk", std::move(bath)));
    spec.features.push_back(feature(room + "_bar_walk", std::move(bar)));
  }

  auto type_count = [&](Value t, const Rational& scale) {
    Expression e;
    for (std::size_t r = 0; r < rooms; ++r) e.add_indicator(scale, is_type(r, t));
    return e;
  };
  auto item_total = [&](std::size_t f, const Rational& scale) {
    Expression e;
    for (std::size_t r = 0; r < rooms; ++r) e.add_linear(scale, var(r, f));
    return e;
  };
  auto cost_ratio = [&](const Rational& shift) {
    Expression e;
    for (std::size_t r = 0; r < rooms; ++r)
      for (std::size_t f = 1; f <= 5; ++f) e.add_linear(Rational(item_cost[f], config.budget), var(r, f));
    if (shift != 0) e.add_constant(shift);
    return e;
  };
  Rational per_room(1, n_rooms);
  Rational per_bed(1, n_rooms * config.max_per_item);
  spec.features.push_back(feature("fraction_normal", type_count(kNormal, per_room)));
  spec.features.push_back(feature("fraction_suite", type_count(kSuite, per_room)));
  spec.features.push_back(feature("fraction_dorm", type_count(kDorm, per_room)));
  spec.features.push_back(feature("fraction_unassigned", type_count(kEmpty, per_room)));
  spec.features.push_back(feature("budget_used", cost_ratio(0)));
  {
    Expression guests;
    int max_guests = 0;
    for (std::size_t f = 1; f <= 3; ++f) max_guests += item_guests[f] * config.max_per_item;
    for (std::size_t r = 0; r < rooms; ++r)
      for (std::size_t f = 1; f <= 3; ++f)
        guests.add_linear(Rational(item_guests[f], n_rooms * max_guests), var(r, f));
    spec.features.push_back(feature("guest_capacity", std::move(guests)));
  }
  {
    Expression pieces;
    for (std::size_t r = 0; r < rooms; ++r)
      for (std::size_t f = 1; f <= 5; ++f) pieces.add_linear(Rational(1, 4 * n_rooms), var(r, f));
    spec.features.push_back(feature("furniture_pieces", std::move(pieces)));
  }
  spec.features.push_back(feature("tables", item_total(4, per_room)));
  spec.features.push_back(feature("sofas", item_total(5, per_room)));
  spec.features.push_back(feature("bunks", item_total(3, per_bed)));
  spec.features.push_back(feature("doubles", item_total(2, per_bed)));
  spec.features.push_back(feature("singles", item_total(1, per_bed)));
  spec.features.push_back(feature("suites_over_20pct", type_count(kSuite, per_room), Transform::hinge(Rational(1, 5))));
  spec.features.push_back(feature("suites_over_40pct", type_count(kSuite, per_room), Transform::hinge(Rational(2, 5))));
  spec.features.push_back(feature("dorms_over_20pct", type_count(kDorm, per_room), Transform::hinge(Rational(1, 5))));
  spec.features.push_back(feature("dorms_over_40pct", type_count(kDorm, per_room), Transform::hinge(Rational(2, 5))));
  spec.features.push_back(feature("has_suite", type_count(kSuite, 1), Transform::signed_indicator()));
  spec.features.push_back(feature("has_dorm", type_count(kDorm, 1), Transform::signed_indicator()));
  spec.features.push_back(feature("budget_overrun", cost_ratio(0), Transform::hinge(1)));
  spec.features.push_back(feature("over_budget", cost_ratio(-1), Transform::signed_indicator()));

  for (std::size_t r = 0; r < rooms; ++r) {
    BasicPart p{"room" + std::to_string(r + 1), {}, {}};
    for (std::size_t f = 0; f < fields.size(); ++f) p.variables.push_back(var(r, f));
    spec.parts.push_back(std::move(p));
  }

  nlohmann::json layout = nlohmann::json::array();
  for (std::size_t r = 0; r < rooms; ++r)
    layout.push_back({{"room", "room" + std::to_string(r + 1)},
                      {"floor", r / width + 1},
                      {"near_bathroom", near_bathroom(r)},
                      {"near_bar", near_bar(r)},
                      {"capacity", capacity[r]}});
  nlohmann::json budget_terms = nlohmann::json::array();
  for (std::size_t r = 0; r < rooms; ++r)
    for (std::size_t f = 1; f <= 5; ++f) budget_terms.push_back({{"var", spec.variables[var(r, f)].name}, {"coef", item_cost[f]}});
  spec.metadata = {
      {"kind", "hotel"},
      {"types", {"unassigned", "normal", "suite", "dorm"}},
      {"item_cost", {{"single", item_cost[1]}, {"double", item_cost[2]}, {"bunk", item_cost[3]},
                     {"table", item_cost[4]}, {"sofa", item_cost[5]}}},
      {"budget", config.budget},
      {"rooms", layout},
      {"summaries",
       {{{"name", "budget used %"}, {"feature", "budget_used"}, {"scale", 100}},
        {{"name", "furniture cost"}, {"feature", "budget_used"}, {"scale", config.budget}},
        {{"name", "normal rooms"}, {"feature", "fraction_normal"}, {"scale", rooms}},
        {{"name", "suites"}, {"feature", "fraction_suite"}, {"scale", rooms}},
        {{"name", "dorms"}, {"feature", "fraction_dorm"}, {"scale", rooms}}}}};
  return ProblemModel::build(std::move(spec));
}

ProblemModel random_small_instance(std::uint64_t seed, const RandomInstanceSizes& sizes) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  ModelSpec spec;
  spec.name = "random-" + std::to_string(seed);

  std::size_t total_space = 1;
  const std::size_t parts = uniform(sizes.min_parts, sizes.max_parts);
  for (std::size_t p = 0; p < parts; ++p) {
    BasicPart part{"p" + std::to_string(p), {}, {}};
    std::size_t vars = uniform(sizes.min_vars_per_part, sizes.max_vars_per_part);
    std::size_t part_space = 1;
    for (std::size_t j = 0; j < vars; ++j) {
      auto dom = static_cast<Value>(uniform(2, static_cast<std::size_t>(sizes.max_domain)));
      if (part_space * static_cast<std::size_t>(dom) > sizes.max_part_space ||
          total_space * static_cast<std::size_t>(dom) > sizes.max_total_space) {
        if (j > 0) break;
        dom = 2;
      }
      part_space *= static_cast<std::size_t>(dom);
      total_space *= static_cast<std::size_t>(dom);
      part.variables.push_back(spec.variables.size());
      spec.variables.push_back(variable("x" + std::to_string(spec.variables.size()), 0, dom - 1));
    }
    spec.parts.push_back(std::move(part));
  }

  const std::size_t nv = spec.variables.size();
  auto random_value = [&](std::size_t v) {
    const auto& d = spec.variables[v].domain;
    return d[uniform(0, d.size() - 1)];
  };
  auto random_coef = [&]() {
    long c = static_cast<long>(uniform(0, 8)) - 4;
    if (c == 0) c = 1;
    return Rational(c, static_cast<long>(uniform(1, 2)));
  };
  auto random_transform = [&]() {
    switch (uniform(0, 2)) {
      case 0:
        return Transform::identity();
      case 1:
        return Transform::signed_indicator();
      default:
        return Transform::hinge(Rational(static_cast<long>(uniform(0, 2)) - 1, 2));
    }
  };
  auto random_expr = [&](const std::vector<std::size_t>& pool) {
    Expression e;
    std::size_t terms = uniform(1, 3);
    for (std::size_t t = 0; t < terms; ++t) {
      if (uniform(0, 4) == 0) {
        e.add_linear(random_coef(), pool[uniform(0, pool.size() - 1)]);
        continue;
      }
      std::vector<Literal> lits;
      std::size_t len = uniform(1, std::min<std::size_t>(2, pool.size()));
      for (std::size_t k = 0; k < len; ++k) {
        std::size_t v = pool[uniform(0, pool.size() - 1)];
        if (std::any_of(lits.begin(), lits.end(), [&](const Literal& l) { return l.var == v; })) continue;
        lits.push_back({v, random_value(v)});
      }
      e.add_indicator(random_coef(), std::move(lits));
    }
    if (uniform(0, 3) == 0) e.add_constant(random_coef());
    return e;
  };

  for (std::size_t p = 0; p < parts; ++p)
    spec.features.push_back(feature("local" + std::to_string(p), random_expr(spec.parts[p].variables), random_transform()));
  std::vector<std::size_t> all(nv);
  for (std::size_t v = 0; v < nv; ++v) all[v] = v;
  for (std::size_t i = 0; i < sizes.extra_features; ++i) {
    // Bias toward cross-part scopes.
    std::vector<std::size_t> pool;
    std::size_t a = uniform(0, parts - 1), b = uniform(0, parts - 1);
    for (auto v : spec.parts[a].variables) pool.push_back(v);
    if (b != a)
      for (auto v : spec.parts[b].variables) pool.push_back(v);
    if (uniform(0, 3) == 0) pool = all;
    spec.features.push_back(feature("f" + std::to_string(i), random_expr(pool), random_transform()));
  }

  // Constraints stay satisfiable: each one holds at a hidden reference configuration.
  std::vector<Value> reference(nv);
  for (std::size_t v = 0; v < nv; ++v) reference[v] = random_value(v);
  for (std::size_t c = 0; c < sizes.constraints; ++c) {
    std::size_t a = uniform(0, parts - 1), b = uniform(0, parts - 1);
    std::vector<std::size_t> pool = spec.parts[a].variables;
    if (b != a) pool.insert(pool.end(), spec.parts[b].variables.begin(), spec.parts[b].variables.end());
    Expression e = random_expr(pool);
    Rational at_ref = e.evaluate_exact(reference);
    std::vector<Literal> guard;
    if (uniform(0, 2) == 0) {
      std::size_t v = pool[uniform(0, pool.size() - 1)];
      guard.push_back({v, random_value(v)});
    }
    Sense sense = uniform(0, 1) == 0 ? Sense::less_equal : Sense::greater_equal;
    Rational slack(static_cast<long>(uniform(0, 2)));
    Rational rhs = sense == Sense::less_equal ? Rational(at_ref + slack) : Rational(at_ref - slack);
    spec.constraints.push_back(constraint("c" + std::to_string(c), std::move(e), sense, rhs, std::move(guard)));
  }
  spec.metadata = {{"kind", "random"}, {"seed", seed}};
  return ProblemModel::build(std::move(spec));
}

std::vector<std::string> builtin_problems() { return {"grid", "training", "hotel", "hotel-small"}; }

ProblemModel load_problem(const std::string& ref) {
  if (ref == "grid") return build_grid();
  if (ref == "training") return build_training_plan(default_training_config());
  if (ref == "hotel") return build_hotel();
  if (ref == "hotel-small") return build_hotel(reduced_hotel_config());
  return load_model(ref);
}

std::filesystem::path asset_dir() {
  if (const char* env = std::getenv("PCL_ASSET_DIR")) return env;
  return PCL_ASSET_DIR;
}

}  // namespace pcl
