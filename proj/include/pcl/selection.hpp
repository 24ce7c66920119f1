#pragma once

#include "pcl/gai.hpp"
#include "pcl/model.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pcl {

enum class SelectionKind { random, smallest_first, ucb1 };

const char* selection_name(SelectionKind kind);
SelectionKind parse_selection(const std::string& name);

// Chooses the part queried at each iteration.
class SelectionStrategy {
 public:
  SelectionStrategy(SelectionKind kind, const ProblemModel& model, const GaiDecomposition& decomposition,
                    std::uint64_t seed, double exploration = 1.0);

  SelectionKind kind() const { return kind_; }
  std::size_t select();
  // Reward in [0, 1]; ignored unless ucb1.
  void record_reward(std::size_t part, double reward);

  // mean + c * sqrt(2 ln t / n_p), with t the number of recorded rewards.
  double ucb_index(std::size_t part) const;
  std::size_t visits(std::size_t part) const { return visits_[part]; }
  const std::vector<std::size_t>& cycle() const { return cycle_; }

  // Gain clipped to [0, 2DS] and scaled to [0, 1].
  static double surrogate_reward(double gain, double D, double S);

 private:
  SelectionKind kind_;
  std::size_t parts_;
  std::mt19937_64 rng_;
  double exploration_;
  std::vector<std::size_t> cycle_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> visits_;
  std::vector<double> reward_sum_;
  std::size_t plays_ = 0;
};

}  // namespace pcl
