#include "pcl/expression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

namespace pcl {

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite value cannot be made rational");
  // Prefer the shortest decimal spelling so 0.1 becomes 1/10.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return parse_rational(std::string(buf, res.ptr));
}

namespace {

Rational pow10(int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(const std::string& s) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
    negative = s[pos] == '-';
    ++pos;
  }
  boost::multiprecision::cpp_int mantissa = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      any_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw DomainError("malformed number '" + s + "'");
  int exponent = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    std::string rest = s.substr(pos + 1);
    auto [p, ec] = std::from_chars(rest.data() + (rest[0] == '+' ? 1 : 0),
                                   rest.data() + rest.size(), exponent);
    if (ec != std::errc() || p != rest.data() + rest.size())
      throw DomainError("malformed exponent in '" + s + "'");
    pos = s.size();
  }
  if (pos != s.size()) throw DomainError("malformed number '" + s + "'");
  Rational r(mantissa);
  int e = exponent - frac_digits;
  if (e > 0) r *= pow10(e);
  if (e < 0) r /= pow10(-e);
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw DomainError("zero denominator in '" + text + "'");
  return num / den;
}

std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Expression& Expression::add_constant(const Rational& c) {
  constant_ += c;
  constant_d_ = to_double(constant_);
  return *this;
}

Expression& Expression::add_indicator(const Rational& coef, std::vector<Literal> literals) {
  indicators_.push_back({coef, std::move(literals), to_double(coef)});
  return *this;
}

Expression& Expression::add_linear(const Rational& coef, std::size_t var) {
  linear_.push_back({coef, var, to_double(coef)});
  return *this;
}

double Expression::evaluate(std::span<const Value> x) const {
  double s = constant_d_;
  for (const auto& t : indicators_) {
    bool holds = true;
    for (const auto& l : t.literals) {
      if (x[l.var] != l.value) {
        holds = false;
        break;
      }
    }
    if (holds) s += t.coef_d;
  }
  for (const auto& t : linear_) s += t.coef_d * x[t.var];
  return s;
}

Rational Expression::evaluate_exact(std::span<const Value> x) const {
  Rational s = constant_;
  for (const auto& t : indicators_) {
    bool holds = std::all_of(t.literals.begin(), t.literals.end(),
                             [&](const Literal& l) { return x[l.var] == l.value; });
    if (holds) s += t.coef;
  }
  for (const auto& t : linear_) s += t.coef * x[t.var];
  return s;
}

std::vector<std::size_t> Expression::scope() const {
  std::vector<std::size_t> vars;
  for (const auto& t : indicators_)
    for (const auto& l : t.literals) vars.push_back(l.var);
  for (const auto& t : linear_) vars.push_back(t.var);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

Interval Expression::bounds(std::span<const std::vector<Value>> domains,
                            std::span<const Value> partial) const {
  Interval out{constant_d_, constant_d_};
  // Per free variable: contribution for each domain value.
  std::unordered_map<std::size_t, std::vector<double>> tables;
  auto table_for = [&](std::size_t var) -> std::vector<double>& {
    auto it = tables.find(var);
    if (it == tables.end()) it = tables.emplace(var, std::vector<double>(domains[var].size(), 0.0)).first;
    return it->second;
  };

  for (const auto& t : indicators_) {
    bool falsified = false;
    std::size_t free_var = SIZE_MAX;
    Value free_value = 0;
    bool multi_free = false;
    for (const auto& l : t.literals) {
      Value v = partial[l.var];
      if (v == kUnassigned) {
        if (free_var == SIZE_MAX) {
          free_var = l.var;
          free_value = l.value;
        } else if (free_var == l.var) {
          if (free_value != l.value) falsified = true;
        } else {
          multi_free = true;
        }
      } else if (v != l.value) {
        falsified = true;
        break;
      }
    }
    if (falsified) continue;
    if (free_var == SIZE_MAX) {
      out.lo += t.coef_d;
      out.hi += t.coef_d;
    } else if (!multi_free) {
      const auto& dom = domains[free_var];
      auto it = std::lower_bound(dom.begin(), dom.end(), free_value);
      if (it != dom.end() && *it == free_value) table_for(free_var)[it - dom.begin()] += t.coef_d;
    } else {
      out.lo += std::min(0.0, t.coef_d);
      out.hi += std::max(0.0, t.coef_d);
    }
  }
  for (const auto& t : linear_) {
    Value v = partial[t.var];
    if (v != kUnassigned) {
      out.lo += t.coef_d * v;
      out.hi += t.coef_d * v;
    } else {
      auto& table = table_for(t.var);
      const auto& dom = domains[t.var];
      for (std::size_t k = 0; k < dom.size(); ++k) table[k] += t.coef_d * dom[k];
    }
  }
  for (const auto& [var, table] : tables) {
    if (table.empty()) continue;
    auto [mn, mx] = std::minmax_element(table.begin(), table.end());
    out.lo += *mn;
    out.hi += *mx;
  }
  return out;
}

double Transform::apply(double e) const {
  switch (kind) {
    case TransformKind::identity:
      return e;
    case TransformKind::signed_indicator:
      return e > kEpsilon ? 1.0 : -1.0;
    case TransformKind::hinge:
      return std::max(0.0, e - threshold_d);
  }
  return e;
}

Rational Transform::apply_exact(const Rational& e) const {
  switch (kind) {
    case TransformKind::identity:
      return e;
    case TransformKind::signed_indicator:
      return e > 0 ? Rational(1) : Rational(-1);
    case TransformKind::hinge: {
      Rational d = e - threshold;
      return d > 0 ? d : Rational(0);
    }
  }
  return e;
}

Interval Transform::apply(Interval e) const {
  switch (kind) {
    case TransformKind::identity:
      return e;
    case TransformKind::signed_indicator:
      return {apply(e.lo), apply(e.hi)};
    case TransformKind::hinge:
      return {apply(e.lo), apply(e.hi)};
  }
  return e;
}

const char* transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity:
      return "identity";
    case TransformKind::signed_indicator:
      return "signed";
    case TransformKind::hinge:
      return "hinge";
  }
  return "identity";
}

TransformKind parse_transform(const std::string& name) {
  if (name == "identity") return TransformKind::identity;
  if (name == "signed" || name == "signed-indicator" || name == "signed_indicator")
    return TransformKind::signed_indicator;
  if (name == "hinge") return TransformKind::hinge;
  throw DomainError("unknown transform '" + name + "'");
}

}  // namespace pcl
