#include "conditional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcl::detail {

namespace {

constexpr std::uint32_t kFixed = std::numeric_limits<std::uint32_t>::max();

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

bool possible(Interval iv, Sense sense, double rhs) {
  switch (sense) {
    case Sense::less_equal:
      return iv.lo <= rhs + kEpsilon;
    case Sense::greater_equal:
      return iv.hi >= rhs - kEpsilon;
    case Sense::equal:
      return iv.lo <= rhs + kEpsilon && iv.hi >= rhs - kEpsilon;
  }
  return true;
}

// Substitutes fixed values. Returns the reduced expression scaled by `scale`.
RExpr reduce(const Expression& e, double scale, const std::vector<std::uint32_t>& slot_of,
             const Configuration& fixed) {
  RExpr r;
  r.constant = scale * e.constant_d();
  for (const auto& t : e.indicators()) {
    RTerm rt{scale * t.coef_d, {}, 0};
    bool dead = false;
    for (const auto& l : t.literals) {
      std::uint32_t s = slot_of[l.var];
      if (s == kFixed) {
        if (fixed.values[l.var] != l.value) {
          dead = true;
          break;
        }
      } else {
        rt.lits.push_back({s, l.value});
        rt.last_slot = std::max(rt.last_slot, s);
      }
    }
    if (dead) continue;
    if (rt.lits.empty())
      r.constant += rt.coef;
    else
      r.terms.push_back(std::move(rt));
  }
  for (const auto& t : e.linear()) {
    std::uint32_t s = slot_of[t.var];
    if (s == kFixed)
      r.constant += scale * t.coef_d * fixed.values[t.var];
    else
      r.lin.push_back({scale * t.coef_d, s});
  }
  return r;
}

std::uint32_t last_slot_of(const RExpr& e) {
  std::uint32_t last = 0;
  for (const auto& t : e.terms) last = std::max(last, t.last_slot);
  for (const auto& l : e.lin) last = std::max(last, l.slot);
  return last;
}

}  // namespace

double RExpr::eval(const Value* vals) const {
  double s = constant;
  for (const auto& t : terms) {
    bool on = true;
    for (const auto& l : t.lits)
      if (vals[l.slot] != l.value) {
        on = false;
        break;
      }
    if (on) s += t.coef;
  }
  for (const auto& l : lin) s += l.coef * vals[l.slot];
  return s;
}

bool RConstraint::holds(const Value* vals) const {
  for (const auto& l : guard)
    if (vals[l.slot] != l.value) return true;
  return compare(expr.eval(vals), sense, rhs);
}

ConditionalProblem::ConditionalProblem(const ProblemModel& model, std::span<const double> w,
                                       std::span<const std::size_t> objective,
                                       std::vector<std::size_t> free_vars, const Configuration& fixed)
    : free_vars_(std::move(free_vars)) {
  std::sort(free_vars_.begin(), free_vars_.end());
  std::vector<std::uint32_t> slot_of(model.num_variables(), kFixed);
  for (std::size_t s = 0; s < free_vars_.size(); ++s) {
    slot_of[free_vars_[s]] = static_cast<std::uint32_t>(s);
    domains_.push_back(model.domains()[free_vars_[s]]);
  }

  for (auto i : objective) {
    double wi = w[i];
    if (wi == 0.0) continue;
    const auto& f = model.features()[i];
    if (f.transform.kind == TransformKind::identity) {
      RExpr r = reduce(f.expr, wi, slot_of, fixed);
      offset_ += r.constant;
      for (auto& t : r.terms) linear_.terms.push_back(std::move(t));
      for (auto& l : r.lin) linear_.lin.push_back(l);
    } else {
      RExpr r = reduce(f.expr, 1.0, slot_of, fixed);
      if (!r.has_free())
        offset_ += wi * f.transform.apply(r.constant);
      else
        nonlinear_.push_back({wi, f.transform, std::move(r)});
    }
  }

  constraints_by_last_.assign(free_vars_.size(), {});
  for (std::size_t c = 0; c < model.constraints().size(); ++c) {
    const auto& con = model.constraints()[c];
    bool touches = std::any_of(con.scope.begin(), con.scope.end(),
                               [&](std::size_t v) { return slot_of[v] != kFixed; });
    if (!touches) continue;
    RConstraint rc{c, {}, reduce(con.expr, 1.0, slot_of, fixed), con.sense, con.rhs_d, 0};
    bool vacuous = false;
    for (const auto& l : con.guard) {
      std::uint32_t s = slot_of[l.var];
      if (s == kFixed) {
        if (fixed.values[l.var] != l.value) vacuous = true;
      } else {
        rc.guard.push_back({s, l.value});
        rc.last_slot = std::max(rc.last_slot, s);
      }
    }
    if (vacuous) continue;
    if (rc.guard.empty() && !rc.expr.has_free()) {
      // Touches a free variable only through terms the substitution killed.
      rc.last_slot = 0;
    } else {
      rc.last_slot = std::max(rc.last_slot, last_slot_of(rc.expr));
    }
    if (free_vars_.empty()) continue;
    constraints_by_last_[rc.last_slot].push_back(constraints_.size());
    constraints_.push_back(std::move(rc));
  }
  compile_bounds();
}

void ConditionalProblem::compile_bounds() {
  const std::size_t n = free_vars_.size();
  unary_.assign(n, {});
  for (std::size_t s = 0; s < n; ++s) unary_[s].assign(domains_[s].size(), 0.0);
  for (const auto& t : linear_.terms) {
    std::uint32_t slot = t.lits.front().slot;
    bool single = std::all_of(t.lits.begin(), t.lits.end(), [&](const RLit& l) { return l.slot == slot; });
    if (!single) {
      multi_.push_back(t);
      continue;
    }
    Value v = t.lits.front().value;
    bool consistent = std::all_of(t.lits.begin(), t.lits.end(), [&](const RLit& l) { return l.value == v; });
    if (!consistent) continue;
    const auto& dom = domains_[slot];
    auto it = std::lower_bound(dom.begin(), dom.end(), v);
    if (it == dom.end() || *it != v) continue;
    unary_[slot][static_cast<std::size_t>(it - dom.begin())] += t.coef;
  }
  for (const auto& l : linear_.lin)
    for (std::size_t i = 0; i < domains_[l.slot].size(); ++i) unary_[l.slot][i] += l.coef * domains_[l.slot][i];

  unary_max_suffix_.assign(n + 1, 0.0);
  for (std::size_t s = n; s-- > 0;) {
    double mx = unary_[s].empty() ? 0.0 : *std::max_element(unary_[s].begin(), unary_[s].end());
    unary_max_suffix_[s] = unary_max_suffix_[s + 1] + mx;
  }

  scratch_offset_.assign(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s) scratch_offset_[s + 1] = scratch_offset_[s] + domains_[s].size();
  scratch_.assign(scratch_offset_[n], 0.0);
}

double ConditionalProblem::objective(const Value* vals) const {
  double s = offset_ + linear_.eval(vals);
  for (const auto& f : nonlinear_) s += f.weight * f.transform.apply(f.expr.eval(vals));
  return s;
}

Interval ConditionalProblem::expr_interval(const RExpr& e, std::size_t depth, const Value* vals) const {
  Interval iv{e.constant, e.constant};
  std::vector<std::uint32_t> touched;
  auto table = [&](std::uint32_t slot) {
    if (std::find(touched.begin(), touched.end(), slot) == touched.end()) touched.push_back(slot);
    return scratch_.data() + scratch_offset_[slot];
  };
  for (const auto& t : e.terms) {
    bool dead = false;
    std::uint32_t free_slot = kFixed;
    bool multi = false;
    Value free_value = 0;
    bool conflict = false;
    for (const auto& l : t.lits) {
      if (l.slot < depth) {
        if (vals[l.slot] != l.value) {
          dead = true;
          break;
        }
      } else if (free_slot == kFixed) {
        free_slot = l.slot;
        free_value = l.value;
      } else if (l.slot != free_slot) {
        multi = true;
      } else if (l.value != free_value) {
        conflict = true;
      }
    }
    if (dead) continue;
    if (free_slot == kFixed) {
      iv.lo += t.coef;
      iv.hi += t.coef;
    } else if (multi) {
      iv.lo += std::min(0.0, t.coef);
      iv.hi += std::max(0.0, t.coef);
    } else if (!conflict) {
      const auto& dom = domains_[free_slot];
      auto it = std::lower_bound(dom.begin(), dom.end(), free_value);
      if (it == dom.end() || *it != free_value) continue;
      table(free_slot)[it - dom.begin()] += t.coef;
    }
  }
  for (const auto& l : e.lin) {
    if (l.slot < depth) {
      iv.lo += l.coef * vals[l.slot];
      iv.hi += l.coef * vals[l.slot];
    } else {
      double* tab = table(l.slot);
      for (std::size_t i = 0; i < domains_[l.slot].size(); ++i) tab[i] += l.coef * domains_[l.slot][i];
    }
  }
  for (auto slot : touched) {
    double* tab = scratch_.data() + scratch_offset_[slot];
    std::size_t size = domains_[slot].size();
    iv.lo += *std::min_element(tab, tab + size);
    iv.hi += *std::max_element(tab, tab + size);
    std::fill(tab, tab + size, 0.0);
  }
  return iv;
}

double ConditionalProblem::upper_bound(std::size_t depth, const Value* vals,
                                       const std::uint32_t* val_idx) const {
  double ub = offset_ + unary_max_suffix_[depth];
  for (std::size_t s = 0; s < depth; ++s) ub += unary_[s][val_idx[s]];
  for (const auto& t : multi_) {
    bool dead = false;
    bool open = false;
    for (const auto& l : t.lits) {
      if (l.slot < depth) {
        if (vals[l.slot] != l.value) {
          dead = true;
          break;
        }
      } else {
        open = true;
      }
    }
    if (dead) continue;
    ub += open ? std::max(0.0, t.coef) : t.coef;
  }
  for (const auto& f : nonlinear_) {
    Interval iv = f.transform.apply(expr_interval(f.expr, depth, vals));
    ub += f.weight >= 0.0 ? f.weight * iv.hi : f.weight * iv.lo;
  }
  return ub;
}

bool ConditionalProblem::constraint_possible(const RConstraint& c, std::size_t depth,
                                             const Value* vals) const {
  for (const auto& l : c.guard) {
    if (l.slot >= depth) return true;
    if (vals[l.slot] != l.value) return true;
  }
  return possible(expr_interval(c.expr, depth, vals), c.sense, c.rhs);
}

ConditionalProblem::SearchResult ConditionalProblem::search(
    const std::function<void(const Value*)>& on_leaf, bool prune, const double* incumbent) const {
  const std::size_t n = free_vars_.size();
  SearchResult result;
  std::vector<Value> vals(n, kUnassigned);
  std::vector<std::uint32_t> idx(n, 0);
  std::vector<char> seen(constraints_.size(), 0);
  auto reject = [&](std::size_t ci) {
    if (!seen[ci]) {
      seen[ci] = 1;
      result.violated.push_back(constraints_[ci].id);
    }
  };

  auto dfs = [&](auto&& self, std::size_t depth) -> void {
    ++result.nodes;
    if (depth == n) {
      on_leaf(vals.data());
      return;
    }
    for (std::uint32_t i = 0; i < domains_[depth].size(); ++i) {
      vals[depth] = domains_[depth][i];
      idx[depth] = i;
      bool ok = true;
      for (auto ci : constraints_by_last_[depth])
        if (!constraints_[ci].holds(vals.data())) {
          reject(ci);
          ok = false;
          break;
        }
      if (!ok) continue;
      if (prune) {
        for (std::size_t ci = 0; ci < constraints_.size() && ok; ++ci)
          if (constraints_[ci].last_slot > depth && !constraint_possible(constraints_[ci], depth + 1, vals.data())) {
            reject(ci);
            ok = false;
          }
        if (!ok) continue;
        double best = *incumbent;
        double delta = 1e-9 * (1.0 + std::abs(best));
        if (std::isfinite(best) && upper_bound(depth + 1, vals.data(), idx.data()) + delta <= best + kEpsilon)
          continue;
      }
      self(self, depth + 1);
    }
    vals[depth] = kUnassigned;
  };
  dfs(dfs, 0);
  std::sort(result.violated.begin(), result.violated.end());
  return result;
}

}  // namespace pcl::detail
