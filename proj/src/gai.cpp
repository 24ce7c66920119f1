#include "pcl/gai.hpp"

#include <algorithm>
#include <numeric>

namespace pcl {

std::vector<std::pair<std::size_t, std::size_t>> GaiNetwork::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t p = 0; p < neighbors.size(); ++p)
    for (auto q : neighbors[p])
      if (p < q) out.emplace_back(p, q);
  return out;
}

GaiNetwork build_gai_network(const ProblemModel& model) {
  GaiNetwork g;
  g.neighbors.resize(model.num_parts());
  for (std::size_t i = 0; i < model.num_features(); ++i) {
    const auto& ps = model.feature_parts(i);
    for (auto p : ps)
      for (auto q : ps)
        if (p != q) g.neighbors[p].push_back(q);
  }
  for (auto& n : g.neighbors) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return g;
}

std::vector<std::size_t> select_ordering(const GaiNetwork& network) {
  std::vector<std::size_t> order(network.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return network.degree(a) < network.degree(b); });
  return order;
}

GaiDecomposition compute_decomposition(const ProblemModel& model, std::vector<std::size_t> ordering) {
  const std::size_t n = model.num_parts();
  if (ordering.size() != n) throw DomainError("ordering must list every part exactly once");
  GaiDecomposition d;
  d.position.assign(n, SIZE_MAX);
  for (std::size_t k = 0; k < n; ++k) {
    if (ordering[k] >= n || d.position[ordering[k]] != SIZE_MAX)
      throw DomainError("ordering must be a permutation of the parts");
    d.position[ordering[k]] = k;
  }
  d.ordering = std::move(ordering);

  // Feature i belongs to J_k for the latest position k among the parts touching it.
  d.J.assign(n, {});
  for (std::size_t i = 0; i < model.num_features(); ++i) {
    std::size_t last = 0;
    for (auto p : model.feature_parts(i)) last = std::max(last, d.position[p]);
    d.J[last].push_back(i);
  }
  return d;
}

std::size_t GaiDecomposition::overlap_of_part(const ProblemModel& model, std::size_t part) const {
  return model.parts()[part].features.size() - J_of_part(part).size();
}

nlohmann::json gai_to_json(const ProblemModel& model, const GaiNetwork& network,
                           const GaiDecomposition& decomposition) {
  using nlohmann::json;
  json nodes = json::array();
  for (std::size_t p = 0; p < network.size(); ++p) {
    json nb = json::array();
    for (auto q : network.neighbors[p]) nb.push_back(model.parts()[q].name);
    nodes.push_back({{"part", model.parts()[p].name},
                     {"degree", network.degree(p)},
                     {"I", model.parts()[p].features},
                     {"neighbors", std::move(nb)}});
  }
  json order = json::array();
  for (std::size_t k = 0; k < decomposition.ordering.size(); ++k) {
    std::size_t p = decomposition.ordering[k];
    order.push_back({{"position", k + 1},
                     {"part", model.parts()[p].name},
                     {"J", decomposition.J[k]},
                     {"ignored", decomposition.overlap_of_part(model, p)}});
  }
  json edges = json::array();
  for (auto [p, q] : network.edges()) edges.push_back({model.parts()[p].name, model.parts()[q].name});
  json features = json::array();
  for (const auto& f : model.features()) features.push_back(f.name);
  return {{"problem", model.name()},
          {"features", std::move(features)},
          {"D", model.feature_bound()},
          {"S", model.part_feature_bound()},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"ordering", std::move(order)}};
}

}  // namespace pcl
