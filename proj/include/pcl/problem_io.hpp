#pragma once

#include "pcl/model.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pcl {

// Problem files. Schema documented in docs/problem_format.md.
ProblemModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const ProblemModel& model);
ProblemModel load_model(const std::filesystem::path& path);
void save_model(const ProblemModel& model, const std::filesystem::path& path);

// Configurations are written either as an array in variable order or as an
// object {"values": {name: value}} / {"values": [..]}.
Configuration configuration_from_json(const ProblemModel& model, const nlohmann::json& doc);
nlohmann::json configuration_to_json(const ProblemModel& model, const Configuration& x);

// Partial configuration for a single part: {name: value} or values in the
// part's variable order.
PartialConfiguration partial_from_json(const ProblemModel& model, std::size_t part,
                                       const nlohmann::json& doc);
nlohmann::json partial_to_json(const ProblemModel& model, const PartialConfiguration& x);

std::vector<double> weights_from_json(const ProblemModel& model, const nlohmann::json& doc);

Rational rational_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json rational_to_json(const Rational& r);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace pcl
