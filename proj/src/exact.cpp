#include "irf/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "irf/errors.hpp"

namespace irf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kEnumerationBudget = 4u << 20;  // lambda configurations

void check_rhos(std::span<const double> rhos) {
  if (rhos.empty()) throw std::invalid_argument("at least one rho required");
  for (double r : rhos) {
    if (!(r > 0.0 && r < 1.0)) {
      throw std::invalid_argument("rho must be in (0, 1)");
    }
  }
}
}  // namespace

ExactPredictKernel ExactPredictKernel::build(std::span<const double> rhos) {
  check_rhos(rhos);
  const int d = static_cast<int>(rhos.size());
  const std::size_t m = config_count(d);
  Matrix kernel(m, m, 0.0);

  // Expand the digit-string product one node at a time, keeping the partial
  // column mask and scalar coefficient of every monomial.
  std::vector<std::pair<std::uint32_t, double>> terms, next;
  for (std::size_t row = 0; row < m; ++row) {
    terms.assign(1, {0u, 1.0});
    for (int j = 1; j <= d; ++j) {
      const double rho = rhos[j - 1];
      next.clear();
      const bool changed = (row >> (d - j)) & 1u;
      for (const auto& [mask, coeff] : terms) {
        if (changed) {
          next.emplace_back((mask << 1) | 1u, coeff);  // w1
          next.emplace_back(mask << 1, coeff * rho);   // rho w0
        } else {
          next.emplace_back(mask << 1, coeff * (1.0 - rho));
        }
      }
      std::swap(terms, next);
    }
    for (const auto& [col, coeff] : terms) kernel(row, col) += coeff;
  }
  return ExactPredictKernel(d, std::move(kernel));
}

ProbVec ExactPredictKernel::apply(const ProbVec& y) const {
  if (y.dim() != d_) {
    throw std::invalid_argument("kernel/vector dimension mismatch");
  }
  std::vector<double> w = matvec(matrix_, std::vector<double>(
                                              y.entries().begin(),
                                              y.entries().end()));
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return ProbVec(d_, std::move(w));
}

void ExactPredictKernel::write_csv(std::ostream& os) const {
  const std::size_t m = size();
  char buf[40];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t row = m - 1 - r;
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t col = m - 1 - c;
      std::snprintf(buf, sizeof(buf), "%.17g", matrix_(row, col));
      os << buf << (c + 1 < m ? "," : "\n");
    }
  }
}

ProbVec exact_step(const ProbVec& y, const WeightVec& theta,
                   const ExactPredictKernel& kernel) {
  return bayes_update(kernel.apply(y), theta).renormalized();
}

double jacobian_lipschitz_bound(const Matrix& a, const std::vector<double>& u) {
  return l1_operator_norm(subtract_rank_one(a, u));
}

double exact_predict_lipschitz_bound(std::span<const double> rhos) {
  check_rhos(rhos);
  double prod = 1.0;
  for (double r : rhos) prod *= r;
  return 1.0 - prod;
}

IrfOperator exact_predict_operator(const ExactPredictKernel& kernel) {
  const double bound = [&kernel] {
    // Sharp constant: max over column pairs of half the l1 column gap.
    const std::size_t m = kernel.size();
    double best = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          s += std::abs(kernel.matrix()(i, a) - kernel.matrix()(i, b));
        }
        best = std::max(best, 0.5 * s);
      }
    }
    return best;
  }();
  return IrfOperator{
      kernel.dim(),
      [kernel](const ProbVec& y) { return kernel.apply(y); },
      bound, ProbVec::anchor_point(kernel.dim())};
}

ProbVec enumerated_posterior(const Network& net,
                             std::span<const ObservationFrame> frames) {
  const int d = net.node_count();
  const std::size_t m = config_count(d);
  const int n = static_cast<int>(frames.size());

  double configs = 1.0;
  for (int j = 0; j < d; ++j) configs *= static_cast<double>(n + 1);
  if (configs > static_cast<double>(kEnumerationBudget)) {
    throw ResourceError("enumeration budget exceeded: (n+1)^d too large");
  }

  // Per-stream log likelihood as a function of the switch time v in
  // {1..n+1}: pre-change strictly before v, post-change from v on. The
  // sentinel v = n+1 covers every change time past the data.
  auto stream_table = [n](auto value_at, const GaussianSpec& pre,
                          const GaussianSpec& post) {
    std::vector<double> pre_prefix(n + 1, 0.0), post_suffix(n + 2, 0.0);
    for (int t = 1; t <= n; ++t) {
      pre_prefix[t] = pre_prefix[t - 1] + pre.log_density(value_at(t));
    }
    for (int t = n; t >= 1; --t) {
      post_suffix[t] = post_suffix[t + 1] + post.log_density(value_at(t));
    }
    std::vector<double> table(n + 2, 0.0);
    for (int v = 1; v <= n + 1; ++v) {
      table[v] = pre_prefix[v - 1] + post_suffix[v];
    }
    return table;
  };

  std::vector<std::vector<double>> node_tables(d);
  for (int j = 0; j < d; ++j) {
    const NodeParams& node = net.nodes()[j];
    node_tables[j] = stream_table(
        [&frames, j](int t) { return frames[t - 1].node_values[j]; },
        node.pre_change, node.post_change);
  }
  std::vector<std::vector<double>> edge_tables(net.edges().size());
  for (std::size_t k = 0; k < net.edges().size(); ++k) {
    const EdgeParams& e = net.edges()[k];
    edge_tables[k] = stream_table(
        [&frames, k](int t) { return frames[t - 1].edge_values[k]; },
        e.pre_change, e.post_change);
  }

  // Log prior per node and switch time; sentinel mass is the tail
  // (1-rho)^n.
  std::vector<std::vector<double>> prior_tables(d);
  for (int j = 0; j < d; ++j) {
    const double rho = net.nodes()[j].rho;
    prior_tables[j].assign(n + 2, 0.0);
    for (int v = 1; v <= n; ++v) {
      prior_tables[j][v] = (v - 1) * std::log1p(-rho) + std::log(rho);
    }
    prior_tables[j][n + 1] = n * std::log1p(-rho);
  }

  const std::size_t total = static_cast<std::size_t>(configs);
  std::vector<double> log_weight(total);
  std::vector<std::uint32_t> config_mask(total);
  std::vector<int> lambda(d, 1);
  double max_log = kNegInf;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double acc = 0.0;
    std::uint32_t mask = 0;
    for (int j = 0; j < d; ++j) {
      acc += prior_tables[j][lambda[j]] + node_tables[j][lambda[j]];
      if (lambda[j] <= n) mask |= 1u << (d - 1 - j);
    }
    for (std::size_t k = 0; k < net.edges().size(); ++k) {
      const EdgeParams& e = net.edges()[k];
      const int lam_e = std::min(lambda[e.i - 1], lambda[e.j - 1]);
      acc += edge_tables[k][lam_e];
    }
    log_weight[idx] = acc;
    config_mask[idx] = mask;
    max_log = std::max(max_log, acc);

    for (int j = d - 1; j >= 0; --j) {  // mixed-radix increment
      if (++lambda[j] <= n + 1) break;
      lambda[j] = 1;
    }
  }

  std::vector<double> mass(m, 0.0);
  double total_mass = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const double w = std::exp(log_weight[idx] - max_log);
    mass[config_mask[idx]] += w;
    total_mass += w;
  }
  for (double& v : mass) v /= total_mass;
  return ProbVec(d, std::move(mass));
}

}  // namespace irf
