#pragma once

#include "pcl/model.hpp"

#include "json.hpp"

#include <utility>
#include <vector>

namespace pcl {

/// Graph over basic parts; p and q are adjacent iff I_p and I_q intersect.
struct GaiNetwork {
  std::vector<std::vector<std::size_t>> neighbors;  // sorted, no self loops

  std::size_t size() const { return neighbors.size(); }
  std::size_t degree(std::size_t p) const { return neighbors[p].size(); }
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;  // p < q
};

/// Ordering p_1..p_n with J_k = I_k minus every later part's features.
/// The J sets partition the feature indices.
struct GaiDecomposition {
  std::vector<std::size_t> ordering;            // position -> part
  std::vector<std::size_t> position;            // part -> position
  std::vector<std::vector<std::size_t>> J;      // position -> J_k (sorted)

  const std::vector<std::size_t>& J_of_part(std::size_t part) const { return J[position[part]]; }
  // |I_p \ J_p|: features of p credited to a later part.
  std::size_t overlap_of_part(const ProblemModel& model, std::size_t part) const;
};

GaiNetwork build_gai_network(const ProblemModel& model);

// Ascending degree; equal degrees keep ascending part id.
std::vector<std::size_t> select_ordering(const GaiNetwork& network);

// Throws DomainError if `ordering` is not a permutation of the parts.
GaiDecomposition compute_decomposition(const ProblemModel& model, std::vector<std::size_t> ordering);

inline GaiDecomposition default_decomposition(const ProblemModel& model) {
  return compute_decomposition(model, select_ordering(build_gai_network(model)));
}

nlohmann::json gai_to_json(const ProblemModel& model, const GaiNetwork& network,
                           const GaiDecomposition& decomposition);

}  // namespace pcl
