#include "pcl/problem_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace pcl {

using nlohmann::json;

namespace {

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ModelError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + "." + key, "missing");
  return *it;
}

const json& array_member(const json& obj, const char* key, const std::string& path) {
  const json& a = member(obj, key, path);
  if (!a.is_array()) throw ModelError(path + "." + key, "expected an array");
  return a;
}

std::string string_member(const json& obj, const char* key, const std::string& path) {
  const json& s = member(obj, key, path);
  if (!s.is_string()) throw ModelError(path + "." + key, "expected a string");
  return s.get<std::string>();
}

Value value_from_json(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ModelError(path, "expected an integer value");
  return j.get<Value>();
}

struct NameIndex {
  std::unordered_map<std::string, std::size_t> vars;

  std::size_t var(const json& j, const std::string& path) const {
    if (!j.is_string()) throw ModelError(path, "expected a variable name");
    auto it = vars.find(j.get<std::string>());
    if (it == vars.end()) throw ModelError(path, "unknown variable '" + j.get<std::string>() + "'");
    return it->second;
  }
};

std::vector<Literal> literals_from_json(const json& arr, const NameIndex& names, const std::string& path) {
  if (!arr.is_array()) throw ModelError(path, "expected an array of literals");
  std::vector<Literal> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    std::string p = path + "[" + std::to_string(k) + "]";
    out.push_back({names.var(member(arr[k], "var", p), p + ".var"),
                   value_from_json(member(arr[k], "value", p), p + ".value")});
  }
  return out;
}

Expression expression_from_json(const json& j, const NameIndex& names, const std::string& path) {
  if (!j.is_object()) throw ModelError(path, "expected an expression object");
  Expression e;
  if (auto it = j.find("constant"); it != j.end()) e.add_constant(rational_from_json(*it, path + ".constant"));
  if (auto it = j.find("terms"); it != j.end()) {
    if (!it->is_array()) throw ModelError(path + ".terms", "expected an array");
    for (std::size_t t = 0; t < it->size(); ++t) {
      std::string p = path + ".terms[" + std::to_string(t) + "]";
      const json& term = (*it)[t];
      e.add_indicator(rational_from_json(member(term, "coef", p), p + ".coef"),
                      literals_from_json(member(term, "literals", p), names, p + ".literals"));
    }
  }
  if (auto it = j.find("linear"); it != j.end()) {
    if (!it->is_array()) throw ModelError(path + ".linear", "expected an array");
    for (std::size_t t = 0; t < it->size(); ++t) {
      std::string p = path + ".linear[" + std::to_string(t) + "]";
      const json& term = (*it)[t];
      e.add_linear(rational_from_json(member(term, "coef", p), p + ".coef"),
                   names.var(member(term, "var", p), p + ".var"));
    }
  }
  return e;
}

json literals_to_json(const ProblemModel& m, const std::vector<Literal>& ls) {
  json arr = json::array();
  for (const auto& l : ls) arr.push_back({{"var", m.variables()[l.var].name}, {"value", l.value}});
  return arr;
}

json expression_to_json(const ProblemModel& m, const Expression& e) {
  json j = json::object();
  if (e.constant() != 0) j["constant"] = rational_to_json(e.constant());
  if (!e.indicators().empty()) {
    json terms = json::array();
    for (const auto& t : e.indicators())
      terms.push_back({{"coef", rational_to_json(t.coef)}, {"literals", literals_to_json(m, t.literals)}});
    j["terms"] = std::move(terms);
  }
  if (!e.linear().empty()) {
    json lin = json::array();
    for (const auto& t : e.linear())
      lin.push_back({{"coef", rational_to_json(t.coef)}, {"var", m.variables()[t.var].name}});
    j["linear"] = std::move(lin);
  }
  return j;
}

Sense parse_sense(const json& j, const std::string& path) {
  if (!j.is_string()) throw ModelError(path, "expected one of <=, >=, ==");
  auto s = j.get<std::string>();
  if (s == "<=") return Sense::less_equal;
  if (s == ">=") return Sense::greater_equal;
  if (s == "==" || s == "=") return Sense::equal;
  throw ModelError(path, "unknown sense '" + s + "'");
}

const char* sense_name(Sense s) {
  switch (s) {
    case Sense::less_equal:
      return "<=";
    case Sense::greater_equal:
      return ">=";
    case Sense::equal:
      return "==";
  }
  return "<=";
}

}  // namespace

Rational rational_from_json(const json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return rational_from_double(j.get<double>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const DomainError& e) {
    throw ModelError(path, e.what());
  }
  throw ModelError(path, "expected a number or a \"p/q\" string");
}

json rational_to_json(const Rational& r) {
  if (denominator(r) == 1 && abs(numerator(r)) < boost::multiprecision::cpp_int(1) << 53)
    return numerator(r).convert_to<std::int64_t>();
  return format_rational(r);
}

ProblemModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ModelError("$", "problem document must be an object");
  ModelSpec spec;
  spec.name = doc.value("name", std::string("unnamed"));
  if (auto it = doc.find("metadata"); it != doc.end()) spec.metadata = *it;

  NameIndex names;
  const json& vars = array_member(doc, "variables", "$");
  for (std::size_t v = 0; v < vars.size(); ++v) {
    std::string p = "variables[" + std::to_string(v) + "]";
    Variable var;
    var.name = string_member(vars[v], "name", p);
    const json& dom = array_member(vars[v], "domain", p);
    for (std::size_t k = 0; k < dom.size(); ++k)
      var.domain.push_back(value_from_json(dom[k], p + ".domain[" + std::to_string(k) + "]"));
    if (!names.vars.emplace(var.name, v).second) throw ModelError(p + ".name", "duplicate variable '" + var.name + "'");
    spec.variables.push_back(std::move(var));
  }

  if (auto it = doc.find("constraints"); it != doc.end()) {
    if (!it->is_array()) throw ModelError("constraints", "expected an array");
    for (std::size_t c = 0; c < it->size(); ++c) {
      std::string p = "constraints[" + std::to_string(c) + "]";
      const json& cj = (*it)[c];
      Constraint con;
      con.name = cj.value("name", p);
      if (auto g = cj.find("guard"); g != cj.end()) con.guard = literals_from_json(*g, names, p + ".guard");
      con.expr = expression_from_json(member(cj, "expr", p), names, p + ".expr");
      con.sense = parse_sense(member(cj, "sense", p), p + ".sense");
      con.rhs = rational_from_json(member(cj, "rhs", p), p + ".rhs");
      spec.constraints.push_back(std::move(con));
    }
  }

  const json& feats = array_member(doc, "features", "$");
  for (std::size_t i = 0; i < feats.size(); ++i) {
    std::string p = "features[" + std::to_string(i) + "]";
    const json& fj = feats[i];
    FeatureDef f;
    f.name = fj.value("name", p);
    f.expr = expression_from_json(member(fj, "expr", p), names, p + ".expr");
    std::string t = fj.value("transform", std::string("identity"));
    try {
      f.transform.kind = parse_transform(t);
    } catch (const DomainError& e) {
      throw ModelError(p + ".transform", e.what());
    }
    if (f.transform.kind == TransformKind::hinge)
      f.transform.threshold = rational_from_json(member(fj, "threshold", p), p + ".threshold");
    spec.features.push_back(std::move(f));
    if (auto g = fj.find("global"); g != fj.end()) {
      if (!g->is_boolean()) throw ModelError(p + ".global", "expected a boolean");
      spec.global_override.resize(i + 1);
      spec.global_override[i] = g->get<bool>();
    }
  }

  const json& parts = array_member(doc, "parts", "$");
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::string p = "parts[" + std::to_string(k) + "]";
    BasicPart part;
    part.name = string_member(parts[k], "name", p);
    const json& pv = array_member(parts[k], "variables", p);
    for (std::size_t j = 0; j < pv.size(); ++j)
      part.variables.push_back(names.var(pv[j], p + ".variables[" + std::to_string(j) + "]"));
    spec.parts.push_back(std::move(part));
  }
  return ProblemModel::build(std::move(spec));
}

json model_to_json(const ProblemModel& m) {
  json doc;
  doc["name"] = m.name();
  json vars = json::array();
  for (const auto& v : m.variables()) vars.push_back({{"name", v.name}, {"domain", v.domain}});
  doc["variables"] = std::move(vars);
  json cons = json::array();
  for (const auto& c : m.constraints()) {
    json cj = {{"name", c.name}, {"expr", expression_to_json(m, c.expr)}, {"sense", sense_name(c.sense)},
               {"rhs", rational_to_json(c.rhs)}};
    if (!c.guard.empty()) cj["guard"] = literals_to_json(m, c.guard);
    cons.push_back(std::move(cj));
  }
  doc["constraints"] = std::move(cons);
  json feats = json::array();
  for (const auto& f : m.features()) {
    json fj = {{"name", f.name}, {"expr", expression_to_json(m, f.expr)},
               {"transform", transform_name(f.transform.kind)}};
    if (f.transform.kind == TransformKind::hinge) fj["threshold"] = rational_to_json(f.transform.threshold);
    if (f.global) fj["global"] = true;
    feats.push_back(std::move(fj));
  }
  doc["features"] = std::move(feats);
  json parts = json::array();
  for (const auto& p : m.parts()) {
    json names = json::array();
    for (auto v : p.variables) names.push_back(m.variables()[v].name);
    parts.push_back({{"name", p.name}, {"variables", std::move(names)}});
  }
  doc["parts"] = std::move(parts);
  doc["metadata"] = m.metadata();
  return doc;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("$", path.string() + ": " + e.what());
  }
}

ProblemModel load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

void save_model(const ProblemModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model_to_json(model).dump(1) << "\n";
}

Configuration configuration_from_json(const ProblemModel& model, const json& doc) {
  const json& body = doc.is_object() && doc.contains("values") ? doc["values"] : doc;
  Configuration x;
  if (body.is_array()) {
    for (const auto& v : body) x.values.push_back(v.get<Value>());
  } else if (body.is_object()) {
    x.values.assign(model.num_variables(), kUnassigned);
    for (const auto& [name, v] : body.items()) {
      auto var = model.find_variable(name);
      if (!var) throw DomainError("unknown variable '" + name + "'");
      x.values[*var] = v.get<Value>();
    }
  } else {
    throw DomainError("configuration must be an array or an object");
  }
  check_domain(model, x);
  return x;
}

json configuration_to_json(const ProblemModel& model, const Configuration& x) {
  json obj = json::object();
  for (std::size_t v = 0; v < x.values.size(); ++v) obj[model.variables()[v].name] = x.values[v];
  return obj;
}

PartialConfiguration partial_from_json(const ProblemModel& model, std::size_t part, const json& doc) {
  const auto& vars = model.parts().at(part).variables;
  PartialConfiguration out;
  out.parts = {part};
  out.variables = vars;
  out.values.assign(vars.size(), kUnassigned);
  const json& body = doc.is_object() && doc.contains("values") ? doc["values"] : doc;
  if (body.is_array()) {
    if (body.size() != vars.size())
      throw DomainError("expected " + std::to_string(vars.size()) + " values for part '" +
                        model.parts()[part].name + "'");
    for (std::size_t k = 0; k < vars.size(); ++k) out.values[k] = body[k].get<Value>();
  } else if (body.is_object()) {
    for (const auto& [name, v] : body.items()) {
      auto var = model.find_variable(name);
      if (!var) throw DomainError("unknown variable '" + name + "'");
      auto it = std::lower_bound(vars.begin(), vars.end(), *var);
      if (it == vars.end() || *it != *var)
        throw ConflictError("variable '" + name + "' is outside part '" + model.parts()[part].name + "'");
      out.values[it - vars.begin()] = v.get<Value>();
    }
  } else {
    throw DomainError("partial configuration must be an array or an object");
  }
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (out.values[k] == kUnassigned)
      throw DomainError("missing value for '" + model.variables()[vars[k]].name + "'");
    if (!model.in_domain(vars[k], out.values[k]))
      throw DomainError("value " + std::to_string(out.values[k]) + " out of domain for '" +
                        model.variables()[vars[k]].name + "'");
  }
  return out;
}

json partial_to_json(const ProblemModel& model, const PartialConfiguration& x) {
  json obj = json::object();
  for (std::size_t k = 0; k < x.variables.size(); ++k) obj[model.variables()[x.variables[k]].name] = x.values[k];
  return obj;
}

std::vector<double> weights_from_json(const ProblemModel& model, const json& doc) {
  const json& body = doc.is_object() && doc.contains("weights") ? doc["weights"] : doc;
  std::vector<double> w;
  if (body.is_array()) {
    for (const auto& v : body) w.push_back(v.get<double>());
  } else if (body.is_object()) {
    w.assign(model.num_features(), 0.0);
    for (const auto& [name, v] : body.items()) {
      bool found = false;
      for (std::size_t i = 0; i < model.num_features(); ++i) {
        if (model.features()[i].name == name) {
          w[i] = v.get<double>();
          found = true;
          break;
        }
      }
      if (!found) throw DomainError("unknown feature '" + name + "'");
    }
  } else {
    throw DomainError("weights must be an array or an object");
  }
  if (w.size() != model.num_features())
    throw DomainError("expected " + std::to_string(model.num_features()) + " weights, got " +
                      std::to_string(w.size()));
  return w;
}

}  // namespace pcl
