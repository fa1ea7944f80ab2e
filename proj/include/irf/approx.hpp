#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "irf/engine.hpp"
#include "irf/linalg.hpp"
#include "irf/network.hpp"
#include "irf/simplex.hpp"

namespace irf {

// Scalar geometric predict on a two-point law: p1 <- rho + (1-rho) p1.
BernoulliPair geometric_predict(const BernoulliPair& pair, double rho);

// Mean-field predict: marginalize each coordinate, predict each marginal,
// re-tensor. A polynomial map of degree d that fixes the anchor.
ProbVec mean_field_predict(const ProbVec& y, std::span<const double> rhos);

// One full-vector step of the approximate algorithm (d <= kMaxFullDim).
ProbVec mean_field_step(const ProbVec& y, const WeightVec& theta,
                        std::span<const double> rhos);

IrfOperator mean_field_predict_operator(std::vector<double> rhos);

// Per-node posterior change probabilities; the whole state of the O(d)
// algorithm.
struct MarginalState {
  std::vector<double> gammas;
  static MarginalState initial(int d) { return {std::vector<double>(d, 0.0)}; }
};

// Step 1 of the marginal recursion: per-node geometric predict.
MarginalState predict_marginals(const MarginalState& state, const Network& net);

// The pairwise model the marginal algorithm marginalizes each step:
// predicted per-node priors, per-node evidence, per-edge evidence, on the
// network topology. All potentials in log domain.
struct PairwiseModel {
  int d = 0;
  std::vector<BernoulliPair> node_priors;           // nu(.; predicted gamma)
  std::vector<std::array<double, 2>> log_node_pot;  // log u_j(z; x_j)
  // log u_e(zi or zj; x_e), indexed [zi][zj], aligned with Network::edges().
  std::vector<std::array<std::array<double, 2>, 2>> log_edge_pot;
};

PairwiseModel build_pairwise_model(const MarginalState& predicted,
                                   const ObservationFrame& frame,
                                   const Network& net);

struct TreeMarginals {
  std::vector<double> node_p1;      // P(Z_j = 1)
  std::vector<double> pair_union;   // P(Z_i = 1 or Z_j = 1) per edge
};

// Exact marginals of a pairwise model by two-pass sum-product on the
// (acyclic) topology; log-domain messages, renormalized every pass.
TreeMarginals sum_product_marginals(const PairwiseModel& model,
                                    const Network& net);

struct MarginalStepResult {
  MarginalState state;              // gamma_j^n[n]
  std::vector<double> pair_union;   // gamma_ij^n[n] per edge
};

// One step of the O(d) algorithm: predict, build the pairwise model from
// the frame, and read node and pair marginals off sum-product.
MarginalStepResult marginal_mp_step(const MarginalState& state,
                                    const ObservationFrame& frame,
                                    const Network& net);

// sum (1 - rho_j); the mean-field predict Lipschitz bound.
double mean_field_lipschitz_bound(std::span<const double> rhos);

// Jacobian of the product-measure assembly H(u) = tensor_j (u_j, 1-u_j),
// an m x d matrix evaluated at u in [0,1]^d.
Matrix tensor_embed_jacobian(std::span<const double> u);

// Jacobian of the per-node predicted marginals y -> (1 - rhobar_j M_j(y)_0);
// constant d x m matrix.
Matrix marginal_predict_jacobian(std::span<const double> rhos);

struct JacobianCheck {
  double max_embed_colsum_dev = 0.0;    // | colsum|J_H| - 2 | over samples
  double max_predict_colsum_dev = 0.0;  // | colsum|J_K + r/2 1^T| - sum/2 |
  double max_product_norm = 0.0;        // ||J_H (J_K + r/2 1^T)||_1
  double bound = 0.0;                   // sum (1 - rho_j)
  bool passed = false;
};

// Verifies the two column-sum identities and the composed-Jacobian bound
// at sampled interior points of P_d.
JacobianCheck mean_field_jacobian_check(std::span<const double> rhos,
                                        int samples, std::uint64_t seed);

}  // namespace irf
