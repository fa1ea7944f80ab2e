#include "irf/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "irf/errors.hpp"

namespace irf {

namespace {

// Union-find cycle check.
bool edges_acyclic(int d, const std::vector<EdgeParams>& edges) {
  std::vector<int> parent(d + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const EdgeParams& e : edges) {
    const int a = find(e.i), b = find(e.j);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

}  // namespace

Network Network::make(std::vector<NodeParams> nodes,
                      std::vector<EdgeParams> edges,
                      EdgeSwitchConvention convention) {
  const int d = static_cast<int>(nodes.size());
  if (d < 1) throw std::invalid_argument("network needs at least one node");
  for (const NodeParams& n : nodes) {
    if (!(n.rho > 0.0 && n.rho < 1.0)) {
      throw std::invalid_argument("node rho must be in (0, 1)");
    }
    if (!(n.post_change.variance > 0.0) || !(n.pre_change.variance > 0.0)) {
      throw std::invalid_argument("node variances must be positive");
    }
  }
  std::set<std::pair<int, int>> seen;
  for (EdgeParams& e : edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 1 || e.j > d) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.i == e.j) {
      throw std::invalid_argument("explicit self-loops are not allowed");
    }
    if (!seen.insert({e.i, e.j}).second) {
      throw std::invalid_argument("duplicate edge");
    }
    if (!(e.post_change.variance > 0.0) || !(e.pre_change.variance > 0.0)) {
      throw std::invalid_argument("edge variances must be positive");
    }
  }
  Network net;
  net.nodes_ = std::move(nodes);
  net.edges_ = std::move(edges);
  net.convention_ = convention;
  net.acyclic_ = edges_acyclic(d, net.edges_);
  return net;
}

std::vector<double> Network::rhos() const {
  std::vector<double> out;
  out.reserve(nodes_.size());
  for (const NodeParams& n : nodes_) out.push_back(n.rho);
  return out;
}

int Network::stream_count() const {
  return static_cast<int>(nodes_.size() + edges_.size());
}

int ChangeTimes::max_lambda() const {
  return *std::max_element(lambdas.begin(), lambdas.end());
}

ChangeTimes sample_changes(const Network& net, Rng& rng) {
  ChangeTimes changes;
  changes.lambdas.reserve(net.node_count());
  for (const NodeParams& n : net.nodes()) {
    changes.lambdas.push_back(rng.geometric(n.rho));
  }
  return changes;
}

ObservationFrame sample_frame(const Network& net, const ChangeTimes& changes,
                              int t, Rng& rng) {
  if (t < 1) throw std::invalid_argument("time index must be >= 1");
  if (changes.lambdas.size() != static_cast<std::size_t>(net.node_count())) {
    throw std::invalid_argument("change vector does not match network");
  }
  ObservationFrame frame;
  frame.t = t;
  frame.node_values.reserve(net.node_count());
  for (int j = 1; j <= net.node_count(); ++j) {
    const NodeParams& n = net.nodes()[j - 1];
    const bool post = t >= changes.node_lambda(j);
    frame.node_values.push_back((post ? n.post_change : n.pre_change).sample(rng));
  }
  frame.edge_values.reserve(net.edges().size());
  for (const EdgeParams& e : net.edges()) {
    const int lam = changes.edge_lambda(e);
    const bool post = net.edge_convention() == EdgeSwitchConvention::kAfterLambda
                          ? t >= lam + 1
                          : t >= lam;
    frame.edge_values.push_back((post ? e.post_change : e.pre_change).sample(rng));
  }
  return frame;
}

WeightVec likelihood_weights(const Network& net, const ObservationFrame& frame) {
  const int d = net.node_count();
  const std::size_t m = config_count(d);
  if (frame.node_values.size() != static_cast<std::size_t>(d) ||
      frame.edge_values.size() != net.edges().size()) {
    throw std::invalid_argument("frame does not match network");
  }

  std::vector<double> node_llr(d);
  for (int j = 0; j < d; ++j) {
    const NodeParams& n = net.nodes()[j];
    node_llr[j] = n.pre_change.log_density(frame.node_values[j]) -
                  n.post_change.log_density(frame.node_values[j]);
    if (!std::isfinite(node_llr[j])) {
      throw DegenerateObservationError("non-finite log ratio on node " +
                                       std::to_string(j + 1));
    }
  }
  std::vector<double> edge_llr(net.edges().size());
  for (std::size_t k = 0; k < net.edges().size(); ++k) {
    const EdgeParams& e = net.edges()[k];
    edge_llr[k] = e.pre_change.log_density(frame.edge_values[k]) -
                  e.post_change.log_density(frame.edge_values[k]);
    if (!std::isfinite(edge_llr[k])) {
      throw DegenerateObservationError("non-finite log ratio on edge " +
                                       std::to_string(e.i) + "-" +
                                       std::to_string(e.j));
    }
  }

  std::vector<double> logs(m, 0.0);
  for (std::size_t mask = 0; mask < m; ++mask) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      if (((mask >> (d - 1 - j)) & 1u) == 0) acc += node_llr[j];
    }
    for (std::size_t k = 0; k < net.edges().size(); ++k) {
      const EdgeParams& e = net.edges()[k];
      const bool bi = (mask >> (d - e.i)) & 1u;
      const bool bj = (mask >> (d - e.j)) & 1u;
      if (!(bi || bj)) acc += edge_llr[k];
    }
    logs[mask] = acc;
  }
  return WeightVec(d, std::move(logs));
}

InfoStats info_stats(const Network& net, double kappa_bar) {
  InfoStats stats;
  stats.m_count = net.stream_count();
  double i_min = std::numeric_limits<double>::infinity();
  double sigma_max = 0.0;
  for (const NodeParams& n : net.nodes()) {
    i_min = std::min(i_min, kl_gaussian(n.post_change, n.pre_change));
    sigma_max = std::max(sigma_max, llr_stddev(n.post_change, n.pre_change));
  }
  for (const EdgeParams& e : net.edges()) {
    i_min = std::min(i_min, kl_gaussian(e.post_change, e.pre_change));
    sigma_max = std::max(sigma_max, llr_stddev(e.post_change, e.pre_change));
  }
  stats.i_min = i_min;
  stats.sigma_max = sigma_max;
  stats.i_star = i_min - kappa_bar * sigma_max *
                             std::sqrt(std::log(static_cast<double>(stats.m_count)));
  return stats;
}

}  // namespace irf
