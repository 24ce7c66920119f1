#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <climits>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcl {

using Value = std::int32_t;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr Value kUnassigned = INT32_MIN;

// Tolerance used wherever two utilities are compared.
inline constexpr double kEpsilon = 1e-9;

double to_double(const Rational& r);
Rational rational_from_double(double v);
// Accepts "3", "-2/7", "0.125", "1e-3".
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& r);

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConflictError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by the model loader. `path` addresses the offending JSON node,
// e.g. "features[3].expr.terms[0].literals[1].var".
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& message, std::vector<std::size_t> violated)
      : std::runtime_error(message), violated_(std::move(violated)) {}
  const std::vector<std::size_t>& violated() const { return violated_; }

 private:
  std::vector<std::size_t> violated_;
};

}  // namespace pcl
