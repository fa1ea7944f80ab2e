#include "irf/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "irf/errors.hpp"

namespace irf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_rhos(std::span<const double> rhos) {
  if (rhos.empty()) throw std::invalid_argument("at least one rho required");
  for (double r : rhos) {
    if (!(r > 0.0 && r < 1.0)) {
      throw std::invalid_argument("rho must be in (0, 1)");
    }
  }
}

double log_or_neg_inf(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

double logsumexp2(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}
}  // namespace

BernoulliPair geometric_predict(const BernoulliPair& pair, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("rho must be in (0, 1)");
  }
  return BernoulliPair(rho + (1.0 - rho) * pair.p1, (1.0 - rho) * pair.p0);
}

ProbVec mean_field_predict(const ProbVec& y, std::span<const double> rhos) {
  check_rhos(rhos);
  if (static_cast<int>(rhos.size()) != y.dim()) {
    throw std::invalid_argument("mean_field_predict: dimension mismatch");
  }
  std::vector<BernoulliPair> pairs;
  pairs.reserve(rhos.size());
  for (int j = 1; j <= y.dim(); ++j) {
    pairs.push_back(geometric_predict(marginal(y, j), rhos[j - 1]));
  }
  return tensor_product(pairs);
}

ProbVec mean_field_step(const ProbVec& y, const WeightVec& theta,
                        std::span<const double> rhos) {
  return bayes_update(mean_field_predict(y, rhos), theta).renormalized();
}

IrfOperator mean_field_predict_operator(std::vector<double> rhos) {
  check_rhos(rhos);
  const int d = static_cast<int>(rhos.size());
  const double bound = mean_field_lipschitz_bound(rhos);
  return IrfOperator{
      d,
      [rhos = std::move(rhos)](const ProbVec& y) {
        return mean_field_predict(y, rhos);
      },
      bound, ProbVec::anchor_point(d)};
}

MarginalState predict_marginals(const MarginalState& state, const Network& net) {
  if (state.gammas.size() != static_cast<std::size_t>(net.node_count())) {
    throw std::invalid_argument("state does not match network");
  }
  MarginalState out;
  out.gammas.reserve(state.gammas.size());
  for (int j = 0; j < net.node_count(); ++j) {
    out.gammas.push_back(prior_predict(state.gammas[j], net.nodes()[j].rho));
  }
  return out;
}

PairwiseModel build_pairwise_model(const MarginalState& predicted,
                                   const ObservationFrame& frame,
                                   const Network& net) {
  const int d = net.node_count();
  if (predicted.gammas.size() != static_cast<std::size_t>(d) ||
      frame.node_values.size() != static_cast<std::size_t>(d) ||
      frame.edge_values.size() != net.edges().size()) {
    throw std::invalid_argument("pairwise model inputs do not match network");
  }
  PairwiseModel model;
  model.d = d;
  model.node_priors.reserve(d);
  model.log_node_pot.reserve(d);
  for (int j = 0; j < d; ++j) {
    const double gamma = predicted.gammas[j];
    model.node_priors.emplace_back(gamma, 1.0 - gamma);
    const NodeParams& node = net.nodes()[j];
    const double lg = node.pre_change.log_density(frame.node_values[j]);
    const double lf = node.post_change.log_density(frame.node_values[j]);
    if (!std::isfinite(lg) || !std::isfinite(lf)) {
      throw DegenerateObservationError("non-finite node potential");
    }
    model.log_node_pot.push_back({lg, lf});  // u_j(0) = g, u_j(1) = f
  }
  model.log_edge_pot.reserve(net.edges().size());
  for (std::size_t k = 0; k < net.edges().size(); ++k) {
    const EdgeParams& e = net.edges()[k];
    const double lg = e.pre_change.log_density(frame.edge_values[k]);
    const double lf = e.post_change.log_density(frame.edge_values[k]);
    if (!std::isfinite(lg) || !std::isfinite(lf)) {
      throw DegenerateObservationError("non-finite edge potential");
    }
    // u_e(zi or zj): g only when both are 0.
    model.log_edge_pot.push_back({{{lg, lf}, {lf, lf}}});
  }
  return model;
}

TreeMarginals sum_product_marginals(const PairwiseModel& model,
                                    const Network& net) {
  if (!net.is_tree()) {
    throw UnsupportedTopologyError("sum-product requires an acyclic topology");
  }
  const int d = model.d;
  if (d != net.node_count()) {
    throw std::invalid_argument("model does not match network");
  }
  const std::size_t ne = net.edges().size();

  // Local factor per node: prior times node evidence.
  std::vector<std::array<double, 2>> phi(d);
  for (int j = 0; j < d; ++j) {
    phi[j] = {log_or_neg_inf(model.node_priors[j].p0) + model.log_node_pot[j][0],
              log_or_neg_inf(model.node_priors[j].p1) + model.log_node_pot[j][1]};
  }

  std::vector<std::vector<std::pair<int, std::size_t>>> adjacency(d);
  for (std::size_t k = 0; k < ne; ++k) {
    const EdgeParams& e = net.edges()[k];
    adjacency[e.i - 1].push_back({e.j - 1, k});
    adjacency[e.j - 1].push_back({e.i - 1, k});
  }

  // Deterministic two-pass schedule, rooted at the lowest-index node of
  // each component.
  std::vector<int> order, parent(d, -1);
  std::vector<std::size_t> parent_edge(d, 0);
  std::vector<bool> seen(d, false);
  order.reserve(d);
  for (int root = 0; root < d; ++root) {
    if (seen[root]) continue;
    std::vector<int> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (const auto& [w, k] : adjacency[v]) {
        if (seen[w]) continue;
        seen[w] = true;
        parent[w] = v;
        parent_edge[w] = k;
        stack.push_back(w);
      }
    }
  }

  // Messages per edge, one per direction: msg_to_i[k] arrives at the lower
  // endpoint, msg_to_j[k] at the higher one.
  std::vector<std::array<double, 2>> msg_to_i(ne, {0.0, 0.0});
  std::vector<std::array<double, 2>> msg_to_j(ne, {0.0, 0.0});

  auto edge_pot = [&](std::size_t k, int from, int z_from, int z_to) {
    const EdgeParams& e = net.edges()[k];
    return from == e.i - 1 ? model.log_edge_pot[k][z_from][z_to]
                           : model.log_edge_pot[k][z_to][z_from];
  };

  auto inbound_sum = [&](int v, std::size_t skip_edge, bool has_skip, int z) {
    double acc = phi[v][z];
    for (const auto& [w, k] : adjacency[v]) {
      if (has_skip && k == skip_edge) continue;
      const EdgeParams& e = net.edges()[k];
      acc += (v == e.i - 1 ? msg_to_i[k] : msg_to_j[k])[z];
    }
    return acc;
  };

  auto send = [&](int from, int to, std::size_t k) {
    std::array<double, 2> out;
    for (int z_to = 0; z_to < 2; ++z_to) {
      out[z_to] = logsumexp2(inbound_sum(from, k, true, 0) + edge_pot(k, from, 0, z_to),
                             inbound_sum(from, k, true, 1) + edge_pot(k, from, 1, z_to));
    }
    const double hi = std::max(out[0], out[1]);
    if (hi == kNegInf) {
      throw DegenerateObservationError("zero message in sum-product");
    }
    out[0] -= hi;
    out[1] -= hi;
    const EdgeParams& e = net.edges()[k];
    (to == e.i - 1 ? msg_to_i[k] : msg_to_j[k]) = out;
  };

  for (auto it = order.rbegin(); it != order.rend(); ++it) {  // leaves up
    if (parent[*it] >= 0) send(*it, parent[*it], parent_edge[*it]);
  }
  for (int v : order) {  // root down
    if (parent[v] >= 0) send(parent[v], v, parent_edge[v]);
  }

  TreeMarginals result;
  result.node_p1.reserve(d);
  for (int v = 0; v < d; ++v) {
    const double b0 = inbound_sum(v, 0, false, 0);
    const double b1 = inbound_sum(v, 0, false, 1);
    const double hi = std::max(b0, b1);
    if (hi == kNegInf) {
      throw DegenerateObservationError("zero belief in sum-product");
    }
    const double w0 = std::exp(b0 - hi), w1 = std::exp(b1 - hi);
    result.node_p1.push_back(w1 / (w0 + w1));
  }
  result.pair_union.reserve(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    const EdgeParams& e = net.edges()[k];
    const int vi = e.i - 1, vj = e.j - 1;
    double logs[2][2];
    double hi = kNegInf;
    for (int zi = 0; zi < 2; ++zi) {
      for (int zj = 0; zj < 2; ++zj) {
        logs[zi][zj] = inbound_sum(vi, k, true, zi) +
                       inbound_sum(vj, k, true, zj) +
                       model.log_edge_pot[k][zi][zj];
        hi = std::max(hi, logs[zi][zj]);
      }
    }
    if (hi == kNegInf) {
      throw DegenerateObservationError("zero pair belief in sum-product");
    }
    double total = 0.0, both_zero = 0.0;
    for (int zi = 0; zi < 2; ++zi) {
      for (int zj = 0; zj < 2; ++zj) {
        const double w = std::exp(logs[zi][zj] - hi);
        total += w;
        if (zi == 0 && zj == 0) both_zero = w;
      }
    }
    result.pair_union.push_back(1.0 - both_zero / total);
  }
  return result;
}

MarginalStepResult marginal_mp_step(const MarginalState& state,
                                    const ObservationFrame& frame,
                                    const Network& net) {
  const MarginalState predicted = predict_marginals(state, net);
  const PairwiseModel model = build_pairwise_model(predicted, frame, net);
  TreeMarginals marginals = sum_product_marginals(model, net);
  return MarginalStepResult{MarginalState{std::move(marginals.node_p1)},
                            std::move(marginals.pair_union)};
}

double mean_field_lipschitz_bound(std::span<const double> rhos) {
  check_rhos(rhos);
  double sum = 0.0;
  for (double r : rhos) sum += 1.0 - r;
  return sum;
}

Matrix tensor_embed_jacobian(std::span<const double> u) {
  const int d = static_cast<int>(u.size());
  const std::size_t m = config_count(d);
  Matrix jac(m, d);
  for (std::size_t i = 0; i < m; ++i) {
    for (int j = 1; j <= d; ++j) {
      double prod = 1.0;
      for (int k = 1; k <= d; ++k) {
        if (k == j) continue;
        const bool on = (i >> (d - k)) & 1u;
        prod *= on ? u[k - 1] : 1.0 - u[k - 1];
      }
      const bool on_j = (i >> (d - j)) & 1u;
      jac(i, j - 1) = on_j ? prod : -prod;
    }
  }
  return jac;
}

Matrix marginal_predict_jacobian(std::span<const double> rhos) {
  check_rhos(rhos);
  const int d = static_cast<int>(rhos.size());
  const std::size_t m = config_count(d);
  Matrix jac(d, m);
  for (int j = 1; j <= d; ++j) {
    for (std::size_t l = 0; l < m; ++l) {
      const bool on = (l >> (d - j)) & 1u;
      jac(j - 1, l) = on ? 0.0 : -(1.0 - rhos[j - 1]);
    }
  }
  return jac;
}

JacobianCheck mean_field_jacobian_check(std::span<const double> rhos,
                                        int samples, std::uint64_t seed) {
  check_rhos(rhos);
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const int d = static_cast<int>(rhos.size());
  const std::size_t m = config_count(d);

  double rhobar_sum = 0.0;
  for (double r : rhos) rhobar_sum += 1.0 - r;

  // J_K + (1/2) rbar 1^T is constant; its absolute column sums must all be
  // rhobar_sum / 2.
  Matrix corrected = marginal_predict_jacobian(rhos);
  for (int j = 0; j < d; ++j) {
    for (std::size_t l = 0; l < m; ++l) {
      corrected(j, l) += 0.5 * (1.0 - rhos[j]);
    }
  }
  JacobianCheck check;
  check.bound = rhobar_sum;
  for (std::size_t l = 0; l < m; ++l) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += std::abs(corrected(j, l));
    check.max_predict_colsum_dev =
        std::max(check.max_predict_colsum_dev, std::abs(s - 0.5 * rhobar_sum));
  }

  Rng rng(seed);
  for (int it = 0; it < samples; ++it) {
    const ProbVec y = sample_simplex(d, rng);
    std::vector<double> u(d);
    for (int j = 1; j <= d; ++j) {
      u[j - 1] = 1.0 - (1.0 - rhos[j - 1]) * marginal(y, j).p0;
    }
    const Matrix embed = tensor_embed_jacobian(u);
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += std::abs(embed(i, j));
      check.max_embed_colsum_dev =
          std::max(check.max_embed_colsum_dev, std::abs(s - 2.0));
    }
    check.max_product_norm =
        std::max(check.max_product_norm,
                 l1_operator_norm(matmul(embed, corrected)));
  }
  check.passed = check.max_embed_colsum_dev <= 1e-9 &&
                 check.max_predict_colsum_dev <= 1e-9 &&
                 check.max_product_norm <= check.bound + 1e-9;
  return check;
}

}  // namespace irf
