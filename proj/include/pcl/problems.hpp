#pragma once

#include "pcl/model.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pcl {

// 4x4 binary grid, one signed "endpoints differ" feature per edge, parts are
// the four 2x2 blocks.
ProblemModel build_grid();

struct Activity {
  std::string name;
  std::array<int, 5> improvement{};  // arms, torso, back, legs, heart
  std::array<int, 5> fatigue{};
};

struct TrainingConfig {
  std::string version;
  std::vector<Activity> activities;          // value a+1 encodes activities[a]; 0 is rest
  std::array<int, 5> fatigue_threshold{};    // per body part, per 3-slot window
  std::vector<std::array<bool, 5>> available;  // per day
};

inline constexpr std::array<const char*, 5> kBodyParts = {"arms", "torso", "back", "legs", "heart"};

TrainingConfig training_config_from_json(const nlohmann::json& doc);
// Reads training_activities.json from the asset directory.
TrainingConfig default_training_config();
ProblemModel build_training_plan(const TrainingConfig& config);

struct HotelConfig {
  std::size_t floors = 3;
  std::size_t rooms_per_floor = 5;
  Value max_per_item = 2;                    // singles, doubles, bunks
  std::vector<int> capacity;                 // pieces per room; empty: 3 on even rooms, 4 on odd
  int budget = 40;
};

// Rooms on a single corridor path (stairs join the last room of a floor to
// the first of the next). Bathrooms sit at both ends of every floor and the
// bar on the ground floor between them.
ProblemModel build_hotel(const HotelConfig& config = {});
// Four rooms on one floor with at most one bed of each kind.
HotelConfig reduced_hotel_config();

struct RandomInstanceSizes {
  std::size_t min_parts = 2, max_parts = 4;
  std::size_t min_vars_per_part = 1, max_vars_per_part = 3;
  Value max_domain = 3;
  std::size_t extra_features = 4;  // on top of one exclusive feature per part
  std::size_t constraints = 2;
  std::size_t max_part_space = 10'000;
  std::size_t max_total_space = 1'000'000;
};

ProblemModel random_small_instance(std::uint64_t seed, const RandomInstanceSizes& sizes = {});

// "grid", "training", "hotel", "hotel-small", or a path to a problem file.
ProblemModel load_problem(const std::string& ref);
std::vector<std::string> builtin_problems();

std::filesystem::path asset_dir();

}  // namespace pcl
