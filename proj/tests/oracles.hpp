#pragma once

// Test-only reference implementations. Everything here recomputes results
// by direct enumeration or quadrature, independent of the library's
// algorithmic paths, and is deliberately slow and simple.

#include <cmath>
#include <functional>
#include <vector>

#include "irf/approx.hpp"
#include "irf/classic.hpp"
#include "irf/network.hpp"
#include "irf/rng.hpp"
#include "irf/simplex.hpp"

namespace oracle {

// Exhaustive marginalization of a pairwise model over all 2^d
// configurations.
struct EnumeratedMarginals {
  std::vector<double> node_p1;
  std::vector<double> pair_union;
};

inline EnumeratedMarginals enumerate_marginals(const irf::PairwiseModel& model,
                                               const irf::Network& net) {
  const int d = model.d;
  const std::size_t m = std::size_t{1} << d;
  std::vector<double> logp(m, 0.0);
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < m; ++mask) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      const bool on = (mask >> (d - 1 - j)) & 1u;
      const double prior = on ? model.node_priors[j].p1 : model.node_priors[j].p0;
      acc += (prior > 0.0 ? std::log(prior)
                          : -std::numeric_limits<double>::infinity()) +
             model.log_node_pot[j][on ? 1 : 0];
    }
    for (std::size_t k = 0; k < net.edges().size(); ++k) {
      const irf::EdgeParams& e = net.edges()[k];
      const int zi = (mask >> (d - e.i)) & 1u;
      const int zj = (mask >> (d - e.j)) & 1u;
      acc += model.log_edge_pot[k][zi][zj];
    }
    logp[mask] = acc;
    hi = std::max(hi, acc);
  }
  std::vector<double> p(m);
  double total = 0.0;
  for (std::size_t mask = 0; mask < m; ++mask) {
    p[mask] = std::exp(logp[mask] - hi);
    total += p[mask];
  }
  for (double& v : p) v /= total;

  EnumeratedMarginals out;
  for (int j = 1; j <= d; ++j) {
    double on = 0.0;
    for (std::size_t mask = 0; mask < m; ++mask) {
      if ((mask >> (d - j)) & 1u) on += p[mask];
    }
    out.node_p1.push_back(on);
  }
  for (const irf::EdgeParams& e : net.edges()) {
    double both_zero = 0.0;
    for (std::size_t mask = 0; mask < m; ++mask) {
      const bool zi = (mask >> (d - e.i)) & 1u;
      const bool zj = (mask >> (d - e.j)) & 1u;
      if (!zi && !zj) both_zero += p[mask];
    }
    out.pair_union.push_back(1.0 - both_zero);
  }
  return out;
}

// Uniform random recursive tree on d nodes with random Gaussian specs;
// |mean gap| within [min_gap, max_gap], variances in [0.7, 1.5].
inline irf::Network random_tree_network(int d, irf::Rng& rng,
                                        double min_gap = 0.5,
                                        double max_gap = 2.0) {
  auto spec_pair = [&](irf::GaussianSpec& post, irf::GaussianSpec& pre) {
    const double base = 2.0 * rng.uniform01() - 1.0;
    const double gap = min_gap + (max_gap - min_gap) * rng.uniform01();
    const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    post = {base, 0.7 + 0.8 * rng.uniform01()};
    pre = {base + sign * gap, 0.7 + 0.8 * rng.uniform01()};
  };
  std::vector<irf::NodeParams> nodes(d);
  for (irf::NodeParams& n : nodes) {
    n.rho = 0.05 + 0.4 * rng.uniform01();
    spec_pair(n.post_change, n.pre_change);
  }
  std::vector<irf::EdgeParams> edges;
  for (int j = 2; j <= d; ++j) {
    irf::EdgeParams e;
    e.i = 1 + static_cast<int>(rng.uniform01() * (j - 1));
    e.i = std::min(e.i, j - 1);
    e.j = j;
    spec_pair(e.post_change, e.pre_change);
    edges.push_back(e);
  }
  return irf::Network::make(std::move(nodes), std::move(edges));
}

// Simpson quadrature of integrand against the whole real line, windowed to
// +-12 standard deviations around the given center.
inline double simpson(const std::function<double(double)>& f, double center,
                      double sd, int panels = 4000) {
  const double a = center - 12.0 * sd;
  const double b = center + 12.0 * sd;
  const double h = (b - a) / (2 * panels);
  double acc = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) {
    acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

inline double kl_by_quadrature(const irf::GaussianSpec& f,
                               const irf::GaussianSpec& g) {
  return simpson(
      [&](double x) {
        return std::exp(f.log_density(x)) * (f.log_density(x) - g.log_density(x));
      },
      f.mean, std::sqrt(f.variance));
}

inline double llr_stddev_by_quadrature(const irf::GaussianSpec& f,
                                       const irf::GaussianSpec& g) {
  const double mean = -kl_by_quadrature(f, g);
  const double second = simpson(
      [&](double x) {
        const double y = g.log_density(x) - f.log_density(x);
        return std::exp(f.log_density(x)) * y * y;
      },
      f.mean, std::sqrt(f.variance));
  return std::sqrt(second - mean * mean);
}

}  // namespace oracle
