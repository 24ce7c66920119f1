#include "pcl/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcl {

const char* selection_name(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::random:
      return "random";
    case SelectionKind::smallest_first:
      return "smallest";
    case SelectionKind::ucb1:
      return "ucb1";
  }
  return "?";
}

SelectionKind parse_selection(const std::string& name) {
  if (name == "random") return SelectionKind::random;
  if (name == "smallest" || name == "smallest-first") return SelectionKind::smallest_first;
  if (name == "ucb1" || name == "ucb") return SelectionKind::ucb1;
  throw DomainError("unknown selection strategy: " + name);
}

SelectionStrategy::SelectionStrategy(SelectionKind kind, const ProblemModel& model,
                                     const GaiDecomposition& decomposition, std::uint64_t seed,
                                     double exploration)
    : kind_(kind), parts_(model.num_parts()), rng_(seed), exploration_(exploration),
      visits_(parts_, 0), reward_sum_(parts_, 0.0) {
  if (parts_ == 0) throw DomainError("no parts to select from");
  cycle_.resize(parts_);
  std::iota(cycle_.begin(), cycle_.end(), 0);
  std::stable_sort(cycle_.begin(), cycle_.end(), [&](std::size_t a, std::size_t b) {
    return decomposition.overlap_of_part(model, a) < decomposition.overlap_of_part(model, b);
  });
}

std::size_t SelectionStrategy::select() {
  switch (kind_) {
    case SelectionKind::random:
      return std::uniform_int_distribution<std::size_t>(0, parts_ - 1)(rng_);
    case SelectionKind::smallest_first: {
      std::size_t p = cycle_[cursor_];
      cursor_ = (cursor_ + 1) % parts_;
      return p;
    }
    case SelectionKind::ucb1: {
      for (std::size_t p = 0; p < parts_; ++p)
        if (visits_[p] == 0) return p;
      std::size_t best = 0;
      double best_index = ucb_index(0);
      for (std::size_t p = 1; p < parts_; ++p) {
        double idx = ucb_index(p);
        if (idx > best_index) {
          best = p;
          best_index = idx;
        }
      }
      return best;
    }
  }
  return 0;
}

void SelectionStrategy::record_reward(std::size_t part, double reward) {
  if (kind_ != SelectionKind::ucb1) return;
  ++visits_[part];
  reward_sum_[part] += reward;
  ++plays_;
}

double SelectionStrategy::ucb_index(std::size_t part) const {
  if (visits_[part] == 0) return std::numeric_limits<double>::infinity();
  double n = static_cast<double>(visits_[part]);
  double t = static_cast<double>(std::max<std::size_t>(plays_, 1));
  return reward_sum_[part] / n + exploration_ * std::sqrt(2.0 * std::log(t) / n);
}

double SelectionStrategy::surrogate_reward(double gain, double D, double S) {
  double cap = 2.0 * D * S;
  if (cap <= 0.0) return 0.0;
  return std::clamp(gain, 0.0, cap) / cap;
}

}  // namespace pcl
