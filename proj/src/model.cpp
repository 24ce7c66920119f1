#include "pcl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace pcl {

namespace {

std::string idx(const char* base, std::size_t i) { return std::string(base) + "[" + std::to_string(i) + "]"; }

void check_literals(const std::vector<Literal>& literals, const std::vector<Variable>& vars,
                    const std::string& path) {
  for (std::size_t j = 0; j < literals.size(); ++j) {
    const auto& l = literals[j];
    std::string p = path + "[" + std::to_string(j) + "]";
    if (l.var >= vars.size()) throw ModelError(p + ".var", "unknown variable index");
    const auto& dom = vars[l.var].domain;
    if (!std::binary_search(dom.begin(), dom.end(), l.value))
      throw ModelError(p + ".value", "value " + std::to_string(l.value) + " not in domain of '" +
                                         vars[l.var].name + "'");
  }
}

void check_expression(const Expression& e, const std::vector<Variable>& vars, const std::string& path) {
  for (std::size_t t = 0; t < e.indicators().size(); ++t)
    check_literals(e.indicators()[t].literals, vars, path + ".terms[" + std::to_string(t) + "].literals");
  for (std::size_t t = 0; t < e.linear().size(); ++t)
    if (e.linear()[t].var >= vars.size())
      throw ModelError(path + ".linear[" + std::to_string(t) + "].var", "unknown variable index");
}

bool compare(double lhs, Sense sense, double rhs) {
  switch (sense) {
    case Sense::less_equal:
      return lhs <= rhs + kEpsilon;
    case Sense::greater_equal:
      return lhs >= rhs - kEpsilon;
    case Sense::equal:
      return std::abs(lhs - rhs) <= kEpsilon;
  }
  return false;
}

}  // namespace

bool Constraint::holds(std::span<const Value> x) const {
  for (const auto& l : guard)
    if (x[l.var] != l.value) return true;
  return compare(expr.evaluate(x), sense, rhs_d);
}

ProblemModel ProblemModel::build(ModelSpec spec) {
  ProblemModel m;
  m.name_ = std::move(spec.name);
  m.metadata_ = std::move(spec.metadata);

  if (spec.variables.empty()) throw ModelError("variables", "model has no variables");
  std::unordered_map<std::string, std::size_t> names;
  for (std::size_t v = 0; v < spec.variables.size(); ++v) {
    auto& var = spec.variables[v];
    if (var.name.empty()) throw ModelError(idx("variables", v) + ".name", "empty variable name");
    if (!names.emplace(var.name, v).second)
      throw ModelError(idx("variables", v) + ".name", "duplicate variable '" + var.name + "'");
    std::sort(var.domain.begin(), var.domain.end());
    var.domain.erase(std::unique(var.domain.begin(), var.domain.end()), var.domain.end());
    if (var.domain.empty()) throw ModelError(idx("variables", v) + ".domain", "empty domain");
    if (var.domain.front() == kUnassigned)
      throw ModelError(idx("variables", v) + ".domain", "reserved value in domain");
  }
  m.variables_ = std::move(spec.variables);
  for (const auto& v : m.variables_) m.domains_.push_back(v.domain);

  for (std::size_t c = 0; c < spec.constraints.size(); ++c) {
    auto& con = spec.constraints[c];
    std::string path = idx("constraints", c);
    check_literals(con.guard, m.variables_, path + ".guard");
    check_expression(con.expr, m.variables_, path + ".expr");
    con.rhs_d = to_double(con.rhs);
    con.scope = con.expr.scope();
    for (const auto& l : con.guard) con.scope.push_back(l.var);
    std::sort(con.scope.begin(), con.scope.end());
    con.scope.erase(std::unique(con.scope.begin(), con.scope.end()), con.scope.end());
    if (con.scope.empty()) throw ModelError(path, "constraint reads no variable");
  }
  m.constraints_ = std::move(spec.constraints);

  if (spec.features.empty()) throw ModelError("features", "model has no features");
  for (std::size_t i = 0; i < spec.features.size(); ++i) {
    auto& f = spec.features[i];
    std::string path = idx("features", i);
    check_expression(f.expr, m.variables_, path + ".expr");
    f.scope = f.expr.scope();
    if (f.scope.empty()) throw ModelError(path + ".expr", "feature depends on no variable");
    f.transform.threshold_d = to_double(f.transform.threshold);
  }
  m.features_ = std::move(spec.features);

  if (spec.parts.empty()) throw ModelError("parts", "model has no parts");
  m.var_part_.assign(m.variables_.size(), SIZE_MAX);
  std::unordered_map<std::string, std::size_t> part_names;
  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    auto& part = spec.parts[p];
    std::string path = idx("parts", p);
    if (!part_names.emplace(part.name, p).second)
      throw ModelError(path + ".name", "duplicate part '" + part.name + "'");
    if (part.variables.empty()) throw ModelError(path + ".variables", "part has no variables");
    for (std::size_t j = 0; j < part.variables.size(); ++j) {
      std::size_t v = part.variables[j];
      std::string vpath = path + ".variables[" + std::to_string(j) + "]";
      if (v >= m.variables_.size()) throw ModelError(vpath, "unknown variable index");
      if (m.var_part_[v] != SIZE_MAX)
        throw ModelError(vpath, "variable '" + m.variables_[v].name + "' already belongs to part '" +
                                    spec.parts[m.var_part_[v]].name + "'");
      m.var_part_[v] = p;
    }
    std::sort(part.variables.begin(), part.variables.end());
  }
  for (std::size_t v = 0; v < m.variables_.size(); ++v)
    if (m.var_part_[v] == SIZE_MAX)
      throw ModelError(idx("variables", v), "variable '" + m.variables_[v].name + "' is in no part");
  m.parts_ = std::move(spec.parts);

  auto parts_of = [&](const std::vector<std::size_t>& scope) {
    std::vector<std::size_t> ps;
    for (auto v : scope) ps.push_back(m.var_part_[v]);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
  };

  for (auto& part : m.parts_) part.features.clear();
  for (std::size_t i = 0; i < m.features_.size(); ++i) {
    m.feature_parts_.push_back(parts_of(m.features_[i].scope));
    for (auto p : m.feature_parts_.back()) m.parts_[p].features.push_back(i);
    bool derived_global = m.parts_.size() >= 3 && m.feature_parts_.back().size() == m.parts_.size();
    if (i < spec.global_override.size() && spec.global_override[i])
      m.features_[i].global = *spec.global_override[i];
    else
      m.features_[i].global = derived_global;
  }
  for (const auto& c : m.constraints_) m.constraint_parts_.push_back(parts_of(c.scope));

  for (std::size_t p = 0; p < m.parts_.size(); ++p) {
    const auto& I = m.parts_[p].features;
    bool exclusive = std::any_of(I.begin(), I.end(), [&](std::size_t i) {
      return m.feature_parts_[i].size() == 1;
    });
    if (!exclusive)
      throw ModelError(idx("parts", p), "part '" + m.parts_[p].name +
                                            "' owns no feature exclusive to it");
    m.part_feature_bound_ = std::max(m.part_feature_bound_, I.size());
  }

  std::vector<Value> all_free(m.variables_.size(), kUnassigned);
  for (std::size_t i = 0; i < m.features_.size(); ++i) {
    const auto& f = m.features_[i];
    Interval b = f.transform.apply(f.expr.bounds(m.domains_, all_free));
    double d = std::max(std::abs(b.lo), std::abs(b.hi));
    if (!std::isfinite(d)) throw ModelError(idx("features", i), "feature is unbounded");
    m.feature_bound_ = std::max(m.feature_bound_, d);
  }
  return m;
}

std::optional<std::size_t> ProblemModel::find_variable(const std::string& name) const {
  for (std::size_t v = 0; v < variables_.size(); ++v)
    if (variables_[v].name == name) return v;
  return std::nullopt;
}

std::optional<std::size_t> ProblemModel::find_part(const std::string& name) const {
  for (std::size_t p = 0; p < parts_.size(); ++p)
    if (parts_[p].name == name) return p;
  return std::nullopt;
}

bool ProblemModel::in_domain(std::size_t var, Value v) const {
  const auto& dom = domains_[var];
  return std::binary_search(dom.begin(), dom.end(), v);
}

void check_domain(const ProblemModel& model, const Configuration& x) {
  if (x.values.size() != model.num_variables())
    throw DomainError("configuration has " + std::to_string(x.values.size()) + " values, model has " +
                      std::to_string(model.num_variables()) + " variables");
  for (std::size_t v = 0; v < x.values.size(); ++v)
    if (!model.in_domain(v, x.values[v]))
      throw DomainError("value " + std::to_string(x.values[v]) + " out of domain for '" +
                        model.variables()[v].name + "'");
}

double feature_value(const ProblemModel& model, std::size_t i, std::span<const Value> x) {
  const auto& f = model.features()[i];
  return f.transform.apply(f.expr.evaluate(x));
}

std::vector<double> feature_vector(const ProblemModel& model, const Configuration& x) {
  check_domain(model, x);
  std::vector<double> phi(model.num_features());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = feature_value(model, i, x.values);
  return phi;
}

std::vector<Rational> feature_vector_exact(const ProblemModel& model, const Configuration& x) {
  check_domain(model, x);
  std::vector<Rational> phi;
  phi.reserve(model.num_features());
  for (const auto& f : model.features())
    phi.push_back(f.transform.apply_exact(f.expr.evaluate_exact(x.values)));
  return phi;
}

double evaluate_partial_utility(const ProblemModel& model, std::span<const double> w,
                                std::span<const std::size_t> indices, const Configuration& x) {
  double u = 0.0;
  for (auto i : indices) {
    if (i >= model.num_features()) throw DomainError("feature index " + std::to_string(i) + " out of range");
    if (w[i] != 0.0) u += w[i] * feature_value(model, i, x.values);
  }
  return u;
}

Rational evaluate_partial_utility_exact(const ProblemModel& model, std::span<const Rational> w,
                                        std::span<const std::size_t> indices,
                                        const Configuration& x) {
  Rational u = 0;
  for (auto i : indices) {
    if (i >= model.num_features()) throw DomainError("feature index " + std::to_string(i) + " out of range");
    const auto& f = model.features()[i];
    u += w[i] * f.transform.apply_exact(f.expr.evaluate_exact(x.values));
  }
  return u;
}

std::vector<std::size_t> all_features(const ProblemModel& model) {
  std::vector<std::size_t> idx(model.num_features());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

double utility(const ProblemModel& model, std::span<const double> w, const Configuration& x) {
  auto all = all_features(model);
  return evaluate_partial_utility(model, w, all, x);
}

PartialConfiguration restrict_to(const ProblemModel& model, const Configuration& x,
                                 std::span<const std::size_t> parts) {
  PartialConfiguration out;
  out.parts.assign(parts.begin(), parts.end());
  std::sort(out.parts.begin(), out.parts.end());
  out.parts.erase(std::unique(out.parts.begin(), out.parts.end()), out.parts.end());
  for (auto p : out.parts)
    for (auto v : model.parts().at(p).variables) out.variables.push_back(v);
  std::sort(out.variables.begin(), out.variables.end());
  for (auto v : out.variables) out.values.push_back(x.values.at(v));
  return out;
}

PartialConfiguration restrict_to_part(const ProblemModel& model, const Configuration& x, std::size_t part) {
  std::size_t p[] = {part};
  return restrict_to(model, x, p);
}

PartialConfiguration complement_of(const ProblemModel& model, const Configuration& x, std::size_t part) {
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < model.num_parts(); ++p)
    if (p != part) rest.push_back(p);
  return restrict_to(model, x, rest);
}

PartialConfiguration combine(const PartialConfiguration& a, const PartialConfiguration& b) {
  PartialConfiguration out;
  std::set_union(a.parts.begin(), a.parts.end(), b.parts.begin(), b.parts.end(),
                 std::back_inserter(out.parts));
  std::size_t i = 0, j = 0;
  while (i < a.variables.size() || j < b.variables.size()) {
    if (j == b.variables.size() || (i < a.variables.size() && a.variables[i] < b.variables[j])) {
      out.variables.push_back(a.variables[i]);
      out.values.push_back(a.values[i++]);
    } else if (i == a.variables.size() || b.variables[j] < a.variables[i]) {
      out.variables.push_back(b.variables[j]);
      out.values.push_back(b.values[j++]);
    } else {
      if (a.values[i] != b.values[j])
        throw ConflictError("conflicting values for variable " + std::to_string(a.variables[i]) + ": " +
                            std::to_string(a.values[i]) + " vs " + std::to_string(b.values[j]));
      out.variables.push_back(a.variables[i]);
      out.values.push_back(a.values[i]);
      ++i;
      ++j;
    }
  }
  return out;
}

Configuration to_configuration(const ProblemModel& model, const PartialConfiguration& x) {
  if (x.variables.size() != model.num_variables())
    throw DomainError("partial configuration does not cover every variable");
  Configuration out;
  out.values.assign(model.num_variables(), kUnassigned);
  for (std::size_t k = 0; k < x.variables.size(); ++k) out.values.at(x.variables[k]) = x.values[k];
  return out;
}

Configuration with_part(const Configuration& x, const PartialConfiguration& part) {
  Configuration out = x;
  for (std::size_t k = 0; k < part.variables.size(); ++k) out.values.at(part.variables[k]) = part.values[k];
  return out;
}

FeasibilityReport check_feasible(const ProblemModel& model, const Configuration& x) {
  check_domain(model, x);
  FeasibilityReport report;
  for (std::size_t c = 0; c < model.constraints().size(); ++c) {
    if (!model.constraints()[c].holds(x.values)) {
      report.feasible = false;
      report.violated.push_back(c);
    }
  }
  return report;
}

}  // namespace pcl
