#pragma once

#include <string>
#include <vector>

#include "irf/classic.hpp"
#include "irf/rng.hpp"
#include "irf/simplex.hpp"

namespace irf {

// When a shared stream switches from g_e to f_e, relative to
// lambda_e = min of the endpoint change times.
//   kAfterLambda: pre-change for t <= lambda_e (the literal convention,
//                 one step later than the nodes switch).
//   kAtLambda:    pre-change for t <= lambda_e - 1, same as nodes.
// This only affects data generation; inference always places the switch
// at lambda_e, matching the potentials it is built from.
enum class EdgeSwitchConvention { kAfterLambda, kAtLambda };

struct NodeParams {
  double rho = 0.1;
  GaussianSpec post_change;  // f_j
  GaussianSpec pre_change;   // g_j
};

struct EdgeParams {
  int i = 0, j = 0;  // 1-based node ids, i < j after normalization
  GaussianSpec post_change;  // f_e
  GaussianSpec pre_change;   // g_e
};

// Sensor network: d nodes with private streams plus one shared stream per
// edge. The extended edge set (self-loops + edges) is implicit: node j's
// private stream is the self-loop {j}.
class Network {
 public:
  static Network make(std::vector<NodeParams> nodes,
                      std::vector<EdgeParams> edges,
                      EdgeSwitchConvention convention =
                          EdgeSwitchConvention::kAfterLambda);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<NodeParams>& nodes() const { return nodes_; }
  const std::vector<EdgeParams>& edges() const { return edges_; }
  bool is_tree() const { return acyclic_; }  // cycle check; forests qualify
  EdgeSwitchConvention edge_convention() const { return convention_; }
  std::vector<double> rhos() const;
  int stream_count() const;  // |V| + |E|

 private:
  Network() = default;
  std::vector<NodeParams> nodes_;
  std::vector<EdgeParams> edges_;
  EdgeSwitchConvention convention_ = EdgeSwitchConvention::kAfterLambda;
  bool acyclic_ = true;
};

struct ChangeTimes {
  std::vector<int> lambdas;  // per node, values in {1, 2, ...}

  int node_lambda(int j) const { return lambdas[j - 1]; }
  int edge_lambda(const EdgeParams& e) const {
    return std::min(node_lambda(e.i), node_lambda(e.j));
  }
  int max_lambda() const;
};

struct ObservationFrame {
  int t = 0;
  std::vector<double> node_values;  // aligned with Network::nodes()
  std::vector<double> edge_values;  // aligned with Network::edges()
};

// Independent geometric draws per node.
ChangeTimes sample_changes(const Network& net, Rng& rng);

// One time slice of every stream, pre/post change per the network's
// conventions. Node j is post-change from t = lambda_j on.
ObservationFrame sample_frame(const Network& net, const ChangeTimes& changes,
                              int t, Rng& rng);

// The per-step likelihood weight vector: entry at mask l multiplies the
// ratio g/f of every stream that mask leaves unchanged (node j when bit j
// is 0; edge {i,j} when both bits are 0). Anchor entry is exactly 1.
WeightVec likelihood_weights(const Network& net, const ObservationFrame& frame);

struct InfoStats {
  double i_min = 0.0;     // smallest KL divergence over all streams
  double sigma_max = 0.0; // largest log-likelihood-ratio stddev (psi2 proxy)
  double i_star = 0.0;    // i_min - kappa_bar * sigma_max * sqrt(log m_count)
  int m_count = 0;        // |V| + |E|
};

InfoStats info_stats(const Network& net, double kappa_bar);

}  // namespace irf
