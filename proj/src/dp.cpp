#include "conditional.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

namespace pcl::detail {

namespace {

constexpr double kSumQuantum = 1e9;

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

// Weighted indicator or linear term of an identity feature.
struct WeightedTerm {
  double coef;
  const IndicatorTerm* ind = nullptr;
  const LinearTerm* lin = nullptr;

  double eval(const std::vector<Value>& x) const {
    if (lin) return coef * x[lin->var];
    for (const auto& l : ind->literals)
      if (x[l.var] != l.value) return 0.0;
    return coef;
  }
};

struct WeightedFeature {
  double weight;
  const FeatureDef* feature;
};

// Feature or constraint whose terms each live in one part; its running sum
// is carried in the state between its first and last part.
struct Aggregate {
  double constant = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
  std::vector<std::vector<WeightedTerm>> by_part;
  // feature
  double weight = 0.0;
  const Transform* transform = nullptr;
  // constraint
  const Constraint* constraint = nullptr;
};

std::set<std::size_t> term_parts(const ProblemModel& model, const IndicatorTerm& t) {
  std::set<std::size_t> out;
  for (const auto& l : t.literals) out.insert(model.part_of(l.var));
  return out;
}

bool single_part_terms(const ProblemModel& model, const Expression& e) {
  return std::all_of(e.indicators().begin(), e.indicators().end(),
                     [&](const IndicatorTerm& t) { return term_parts(model, t).size() <= 1; });
}

struct KeyHash {
  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
  static std::uint64_t of(const std::int64_t* k, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) h = mix(h, static_cast<std::uint64_t>(k[i]) * 0xff51afd7ed558ccdULL);
    return h ^ (h >> 29);
  }
};

// One DP layer: states keyed by frontier values and quantized sums.
class Layer {
 public:
  Layer(std::size_t key_len, std::size_t num_sums) : key_len_(key_len), num_sums_(num_sums) {
    slots_.assign(16, kEmpty);
  }

  std::size_t size() const { return values.size(); }

  // Returns the state index for `key`, creating it when absent.
  std::pair<std::uint32_t, bool> find_or_insert(const std::int64_t* key) {
    if ((size() + 1) * 2 > slots_.size()) grow();
    std::uint64_t mask = slots_.size() - 1;
    std::uint64_t h = KeyHash::of(key, key_len_) & mask;
    while (true) {
      std::uint32_t s = slots_[h];
      if (s == kEmpty) {
        auto idx = static_cast<std::uint32_t>(size());
        slots_[h] = idx;
        keys.insert(keys.end(), key, key + key_len_);
        values.push_back(0.0);
        sums.resize(sums.size() + num_sums_, 0.0);
        prev.push_back(0);
        cand.push_back(0);
        return {idx, true};
      }
      if (std::equal(key, key + key_len_, keys.data() + static_cast<std::size_t>(s) * key_len_)) return {s, false};
      h = (h + 1) & mask;
    }
  }

  void release_keys() {
    std::vector<std::int64_t>().swap(keys);
    std::vector<double>().swap(sums);
    std::vector<std::uint32_t>().swap(slots_);
  }

  std::vector<std::int64_t> keys;
  std::vector<double> values;
  std::vector<double> sums;
  std::vector<std::uint32_t> prev;
  std::vector<std::uint32_t> cand;

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;

  void grow() {
    std::vector<std::uint32_t> next(slots_.size() * 2, kEmpty);
    std::uint64_t mask = next.size() - 1;
    for (std::uint32_t s = 0; s < size(); ++s) {
      std::uint64_t h = KeyHash::of(keys.data() + static_cast<std::size_t>(s) * key_len_, key_len_) & mask;
      while (next[h] != kEmpty) h = (h + 1) & mask;
      next[h] = s;
    }
    slots_.swap(next);
  }

  std::size_t key_len_;
  std::size_t num_sums_;
  std::vector<std::uint32_t> slots_;
};

}  // namespace

FullInference solve_by_parts(const ProblemModel& model, std::span<const double> w,
                             std::span<const std::size_t> objective, std::size_t state_limit) {
  auto started = std::chrono::steady_clock::now();
  const std::size_t n = model.num_parts();
  const std::size_t nv = model.num_variables();

  double offset = 0.0;
  std::vector<std::vector<WeightedTerm>> local_terms(n), cross_terms(n);
  std::vector<std::vector<WeightedFeature>> local_nonlinear(n), frontier_features(n);
  std::vector<std::vector<const Constraint*>> local_constraints(n), frontier_constraints(n);
  std::vector<Aggregate> aggregates;
  std::vector<std::size_t> need(nv, 0);  // last part index at which var is read
  std::vector<char> interface(nv, 0);

  auto mark_cross = [&](const std::vector<std::size_t>& vars, std::size_t finalize) {
    for (auto v : vars) {
      interface[v] = 1;
      need[v] = std::max(need[v], finalize);
    }
  };

  for (auto i : objective) {
    double wi = w[i];
    if (wi == 0.0) continue;
    const auto& f = model.features()[i];
    const auto& parts = model.feature_parts(i);
    if (f.transform.kind == TransformKind::identity) {
      offset += wi * f.expr.constant_d();
      for (const auto& t : f.expr.indicators()) {
        auto ps = term_parts(model, t);
        WeightedTerm wt{wi * t.coef_d, &t, nullptr};
        if (ps.empty()) {
          offset += wt.coef;
        } else if (ps.size() == 1) {
          local_terms[*ps.begin()].push_back(wt);
        } else {
          std::size_t fin = *ps.rbegin();
          cross_terms[fin].push_back(wt);
          std::vector<std::size_t> vars;
          for (const auto& l : t.literals) vars.push_back(l.var);
          mark_cross(vars, fin);
        }
      }
      for (const auto& t : f.expr.linear()) local_terms[model.part_of(t.var)].push_back({wi * t.coef_d, nullptr, &t});
    } else if (parts.empty()) {
      offset += wi * f.transform.apply(f.expr.constant_d());
    } else if (parts.size() == 1) {
      local_nonlinear[parts[0]].push_back({wi, &f});
    } else if (single_part_terms(model, f.expr)) {
      Aggregate a;
      a.constant = f.expr.constant_d();
      a.first = parts.front();
      a.last = parts.back();
      a.by_part.assign(n, {});
      for (const auto& t : f.expr.indicators()) {
        auto ps = term_parts(model, t);
        if (ps.empty())
          a.constant += t.coef_d;
        else
          a.by_part[*ps.begin()].push_back({t.coef_d, &t, nullptr});
      }
      for (const auto& t : f.expr.linear()) a.by_part[model.part_of(t.var)].push_back({t.coef_d, nullptr, &t});
      a.weight = wi;
      a.transform = &f.transform;
      aggregates.push_back(std::move(a));
    } else {
      frontier_features[parts.back()].push_back({wi, &f});
      mark_cross(f.scope, parts.back());
    }
  }

  for (std::size_t c = 0; c < model.constraints().size(); ++c) {
    const auto& con = model.constraints()[c];
    const auto& parts = model.constraint_parts(c);
    if (parts.empty()) {
      if (!con.holds(std::vector<Value>(nv, 0))) throw InfeasibleError("constant constraint fails", {c});
    } else if (parts.size() == 1) {
      local_constraints[parts[0]].push_back(&con);
    } else if (con.guard.empty() && single_part_terms(model, con.expr)) {
      Aggregate a;
      a.constant = con.expr.constant_d();
      a.first = parts.front();
      a.last = parts.back();
      a.by_part.assign(n, {});
      for (const auto& t : con.expr.indicators()) {
        auto ps = term_parts(model, t);
        if (ps.empty())
          a.constant += t.coef_d;
        else
          a.by_part[*ps.begin()].push_back({t.coef_d, &t, nullptr});
      }
      for (const auto& t : con.expr.linear()) a.by_part[model.part_of(t.var)].push_back({t.coef_d, nullptr, &t});
      a.constraint = &con;
      aggregates.push_back(std::move(a));
    } else {
      frontier_constraints[parts.back()].push_back(&con);
      mark_cross(con.scope, parts.back());
    }
  }

  // frontier[k]: variables of parts <= k still read after part k.
  std::vector<std::vector<std::size_t>> frontier(n);
  for (std::size_t v = 0; v < nv; ++v)
    for (std::size_t k = model.part_of(v); k < need[v]; ++k) frontier[k].push_back(v);
  // active[k]: aggregates carried from part k to k+1.
  std::vector<std::vector<std::size_t>> active(n);
  for (std::size_t a = 0; a < aggregates.size(); ++a)
    for (std::size_t k = aggregates[a].first; k < aggregates[a].last; ++k) active[k].push_back(a);

  std::vector<Value> scratch(nv, kUnassigned);

  // Candidate groups per part: candidates agreeing on interface values and
  // aggregate contributions are interchangeable; keep the best local reward.
  struct Group {
    std::size_t rep;
    double local;
    std::vector<double> contrib;  // indexed like touched
  };
  struct PartTable {
    std::vector<Value> cand_values;  // flattened, part variable order
    std::vector<Group> groups;
    std::vector<std::size_t> touched;  // aggregates with terms in this part
  };
  std::vector<PartTable> tables(n);
  std::uint64_t candidates_seen = 0;

  for (std::size_t k = 0; k < n; ++k) {
    const auto& vars = model.parts()[k].variables;
    auto& tab = tables[k];
    for (std::size_t a = 0; a < aggregates.size(); ++a)
      if (!aggregates[a].by_part[k].empty()) tab.touched.push_back(a);
    std::map<std::vector<std::int64_t>, std::size_t> by_signature;
    // Local constraints are checked as soon as their last variable is set.
    std::vector<std::vector<const Constraint*>> check_at(vars.size());
    for (const auto* c : local_constraints[k]) {
      std::size_t last = 0;
      for (std::size_t j = 0; j < vars.size(); ++j)
        if (std::binary_search(c->scope.begin(), c->scope.end(), vars[j])) last = j;
      check_at[last].push_back(c);
    }
    std::size_t count = 0;
    auto visit = [&]() {
      double local = 0.0;
      for (const auto& t : local_terms[k]) local += t.eval(scratch);
      for (const auto& f : local_nonlinear[k])
        local += f.weight * f.feature->transform.apply(f.feature->expr.evaluate(scratch));
      std::vector<double> contrib;
      std::vector<std::int64_t> sig;
      for (auto v : vars)
        if (interface[v]) sig.push_back(scratch[v]);
      for (auto a : tab.touched) {
        double s = 0.0;
        for (const auto& t : aggregates[a].by_part[k]) s += t.eval(scratch);
        contrib.push_back(s);
        sig.push_back(std::llround(s * kSumQuantum));
      }
      auto [it, fresh] = by_signature.emplace(std::move(sig), tab.groups.size());
      if (fresh) {
        tab.groups.push_back({count, local, std::move(contrib)});
      } else if (local > tab.groups[it->second].local + kEpsilon) {
        tab.groups[it->second].rep = count;
        tab.groups[it->second].local = local;
        tab.groups[it->second].contrib = std::move(contrib);
      }
      for (auto v : vars) tab.cand_values.push_back(scratch[v]);
      ++count;
    };
    auto dfs = [&](auto&& self, std::size_t j) -> void {
      if (j == vars.size()) {
        visit();
        return;
      }
      for (Value value : model.domains()[vars[j]]) {
        scratch[vars[j]] = value;
        ++candidates_seen;
        bool ok = std::all_of(check_at[j].begin(), check_at[j].end(),
                              [&](const Constraint* c) { return c->holds(scratch); });
        if (ok) self(self, j + 1);
      }
      scratch[vars[j]] = kUnassigned;
    };
    dfs(dfs, 0);
    for (auto v : vars) scratch[v] = kUnassigned;
    if (tab.groups.empty()) {
      std::vector<std::size_t> ids;
      for (const auto* c : local_constraints[k]) ids.push_back(static_cast<std::size_t>(c - model.constraints().data()));
      throw InfeasibleError("part " + model.parts()[k].name + " has no feasible assignment", ids);
    }
    std::stable_sort(tab.groups.begin(), tab.groups.end(),
                     [](const Group& a, const Group& b) { return a.rep < b.rep; });
  }

  // Layer -1 holds a single empty state.
  std::vector<Layer> layers;
  layers.reserve(n + 1);
  layers.emplace_back(0, 0);
  layers.back().find_or_insert(nullptr);
  layers.back().values[0] = offset;
  std::uint64_t transitions = 0;

  std::vector<std::int64_t> key;
  std::vector<double> new_sums;
  for (std::size_t k = 0; k < n; ++k) {
    Layer& cur = layers.back();
    const auto& prev_frontier = k == 0 ? std::vector<std::size_t>{} : frontier[k - 1];
    const auto& prev_active = k == 0 ? std::vector<std::size_t>{} : active[k - 1];
    const auto& tab = tables[k];
    const auto& vars = model.parts()[k].variables;
    const std::size_t key_len = frontier[k].size() + active[k].size();
    Layer next(key_len, active[k].size());
    key.assign(key_len, 0);
    new_sums.assign(active[k].size(), 0.0);

    // Position of each aggregate in the previous sums / current contributions.
    std::vector<long> prev_pos(aggregates.size(), -1), touch_pos(aggregates.size(), -1);
    for (std::size_t j = 0; j < prev_active.size(); ++j) prev_pos[prev_active[j]] = static_cast<long>(j);
    for (std::size_t j = 0; j < tab.touched.size(); ++j) touch_pos[tab.touched[j]] = static_cast<long>(j);
    std::vector<std::size_t> finalized;
    for (std::size_t a = 0; a < aggregates.size(); ++a)
      if (aggregates[a].last == k) finalized.push_back(a);

    const std::size_t prev_key_len = prev_frontier.size() + prev_active.size();
    for (std::uint32_t s = 0; s < cur.size(); ++s) {
      const std::int64_t* pk = cur.keys.data() + static_cast<std::size_t>(s) * prev_key_len;
      const double* ps = cur.sums.data() + static_cast<std::size_t>(s) * prev_active.size();
      for (std::size_t j = 0; j < prev_frontier.size(); ++j) scratch[prev_frontier[j]] = static_cast<Value>(pk[j]);
      for (const auto& g : tab.groups) {
        ++transitions;
        const Value* cv = tab.cand_values.data() + g.rep * vars.size();
        for (std::size_t j = 0; j < vars.size(); ++j) scratch[vars[j]] = cv[j];

        auto total = [&](std::size_t a) {
          const auto& ag = aggregates[a];
          double t = prev_pos[a] >= 0 ? ps[prev_pos[a]] : ag.constant;
          if (touch_pos[a] >= 0) t += g.contrib[static_cast<std::size_t>(touch_pos[a])];
          return t;
        };

        bool ok = true;
        for (const auto* c : frontier_constraints[k])
          if (!c->holds(scratch)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        double reward = g.local;
        for (auto a : finalized) {
          const auto& ag = aggregates[a];
          double t = total(a);
          if (ag.constraint) {
            if (!compare(t, ag.constraint->sense, ag.constraint->rhs_d)) {
              ok = false;
              break;
            }
          } else {
            reward += ag.weight * ag.transform->apply(t);
          }
        }
        if (!ok) continue;
        for (const auto& t : cross_terms[k]) reward += t.eval(scratch);
        for (const auto& f : frontier_features[k])
          reward += f.weight * f.feature->transform.apply(f.feature->expr.evaluate(scratch));
        double value = cur.values[s] + reward;

        for (std::size_t j = 0; j < frontier[k].size(); ++j) key[j] = scratch[frontier[k][j]];
        for (std::size_t j = 0; j < active[k].size(); ++j) {
          new_sums[j] = total(active[k][j]);
          key[frontier[k].size() + j] = std::llround(new_sums[j] * kSumQuantum);
        }
        auto [idx, fresh] = next.find_or_insert(key.data());
        if (fresh || value > next.values[idx] + kEpsilon) {
          next.values[idx] = value;
          next.prev[idx] = s;
          next.cand[idx] = static_cast<std::uint32_t>(g.rep);
          std::copy(new_sums.begin(), new_sums.end(), next.sums.begin() + static_cast<long>(idx * active[k].size()));
        }
        if (next.size() > state_limit)
          throw InferenceTooLarge("state limit exceeded at part " + model.parts()[k].name);
      }
    }
    for (auto v : vars) scratch[v] = kUnassigned;
    for (auto v : prev_frontier) scratch[v] = kUnassigned;
    cur.release_keys();
    if (next.size() == 0) throw InfeasibleError("no feasible configuration", {});
    layers.push_back(std::move(next));
  }

  FullInference out;
  out.x.values.assign(nv, kUnassigned);
  Layer& last = layers.back();
  // The final layer has an empty key, hence one state.
  std::uint32_t s = 0;
  out.objective_value = last.values[0];
  for (std::size_t k = n; k-- > 0;) {
    const Layer& layer = layers[k + 1];
    const auto& vars = model.parts()[k].variables;
    const Value* cv = tables[k].cand_values.data() + static_cast<std::size_t>(layer.cand[s]) * vars.size();
    for (std::size_t j = 0; j < vars.size(); ++j) out.x.values[vars[j]] = cv[j];
    s = layer.prev[s];
  }
  out.stats.nodes = transitions + candidates_seen;
  out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace pcl::detail
