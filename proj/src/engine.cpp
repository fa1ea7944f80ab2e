#include "irf/engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "irf/errors.hpp"

namespace irf {

IrfOperator identity_operator(int d) {
  config_count(d);
  return IrfOperator{d, [](const ProbVec& x) { return x; }, 1.0,
                     ProbVec::anchor_point(d)};
}

IrfOperator constant_anchor_operator(int d) {
  config_count(d);
  return IrfOperator{d, [d](const ProbVec&) { return ProbVec::anchor_point(d); },
                     0.0, ProbVec::anchor_point(d)};
}

IrfOperator geometric_predict_operator(int d, double rho) {
  config_count(d);
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("geometric_predict_operator: rho must be in (0,1)");
  }
  auto apply = [d, rho](const ProbVec& x) {
    std::vector<double> e(x.entries().begin(), x.entries().end());
    for (double& v : e) v *= (1.0 - rho);
    e.back() += rho;
    return ProbVec(d, std::move(e));
  };
  return IrfOperator{d, std::move(apply), 1.0 - rho, ProbVec::anchor_point(d)};
}

bool check_fixed_point(const IrfOperator& op, double tol) {
  const ProbVec image = op.apply(op.declared_fixed_point);
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (std::abs(image[i] - op.declared_fixed_point[i]) > tol) return false;
  }
  return true;
}

IterationTrace iterate(const IrfOperator& op, std::span<const WeightVec> thetas,
                       const ProbVec& x0, int steps) {
  if (steps < 0 || static_cast<std::size_t>(steps) > thetas.size()) {
    throw std::invalid_argument("iterate: step count exceeds provided weights");
  }
  if (x0.dim() != op.d) {
    throw std::invalid_argument("iterate: dimension mismatch");
  }
  IterationTrace trace;
  trace.states.reserve(steps + 1);
  trace.states.push_back(x0);
  trace.distances.push_back(dist_to_anchor(x0));
  for (int k = 1; k <= steps; ++k) {
    const WeightVec& theta = thetas[k - 1];
    if (theta.dim() != op.d) {
      throw std::invalid_argument("iterate: weight dimension mismatch at step " +
                                  std::to_string(k));
    }
    try {
      ProbVec next = bayes_update(op.apply(trace.states.back()), theta);
      trace.states.push_back(next.renormalized());
    } catch (const DegenerateUpdateError& e) {
      throw DegenerateUpdateError("step " + std::to_string(k) + ": " + e.what());
    }
    trace.distances.push_back(dist_to_anchor(trace.states.back()));
    trace.thetas.push_back(theta);
  }
  return trace;
}

double geometric_error_envelope(double x0_anchor, double kappa,
                                double info_rate, double eps, int n) {
  if (x0_anchor == 0.0) {
    throw BoundUndefinedError("envelope requires positive anchor mass at start");
  }
  if (!(x0_anchor > 0.0 && x0_anchor <= 1.0)) {
    throw std::invalid_argument("x0_anchor must be in (0, 1]");
  }
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("kappa must be in [0, 1]");
  }
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  const double base = kappa * std::exp(-info_rate + eps);
  return 2.0 * (1.0 - x0_anchor) / x0_anchor * std::pow(base, n);
}

double anchor_posterior(double theta, double r) {
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be nonnegative");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r must be in [0, 1]");
  const double denom = r + theta * (1.0 - r);
  if (denom == 0.0) {
    throw DegenerateUpdateError("anchor_posterior: 0/0 at theta = 0, r = 0");
  }
  return r / denom;
}

double anchor_posterior_complement(double theta, double r) {
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be nonnegative");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("r must be in [0, 1]");
  const double rbar = 1.0 - r;
  const double denom = (1.0 - rbar) + theta * rbar;
  if (denom == 0.0) {
    throw DegenerateUpdateError("anchor_posterior: 0/0 at theta = 0, r = 0");
  }
  return theta * rbar / denom;
}

double peel_ratio_sup(double kappa, double theta, double gamma) {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("kappa must be in (0, 1]");
  }
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (gamma == 0.0) throw std::invalid_argument("gamma must be nonzero");
  const double eps = 1.0 - theta;
  const double delta = 1.0 - gamma;
  const double corner = std::abs((1.0 - delta) / (1.0 - kappa * eps));
  return theta * kappa / std::abs(gamma) * std::max(1.0, corner);
}

double peel_ratio_sup_grid(double kappa, double theta, double gamma,
                           int grid_size) {
  if (grid_size < 100) {
    throw std::invalid_argument("grid_size must be at least 100");
  }
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("kappa must be in (0, 1]");
  }
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (gamma == 0.0) throw std::invalid_argument("gamma must be nonzero");

  // Grid over the feasible region {(rbar, sbar) : rbar <= kappa * sbar}:
  // sbar on a uniform grid of (0, 1], rbar on a uniform grid of
  // (0, kappa * sbar]. Every grid point is feasible, so the result never
  // exceeds the true supremum.
  const double g = static_cast<double>(grid_size);
  double best = 0.0;
  for (int i = 1; i <= grid_size; ++i) {
    const double sbar = i / g;
    const double denom_s = (1.0 - sbar) + gamma * sbar;
    if (denom_s == 0.0) continue;
    const double gbar_s = gamma * sbar / denom_s;
    if (gbar_s == 0.0) continue;
    for (int k = 1; k <= grid_size; ++k) {
      const double rbar = kappa * sbar * (k / g);
      const double denom_r = (1.0 - rbar) + theta * rbar;
      const double gbar_r = theta * rbar / denom_r;
      best = std::max(best, std::abs(gbar_r) / std::abs(gbar_s));
    }
  }
  return best;
}

ProbVec sample_simplex(int d, Rng& rng) {
  const std::size_t m = config_count(d);
  std::vector<double> e(m);
  double sum = 0.0;
  for (double& v : e) {
    v = rng.exponential();
    sum += v;
  }
  for (double& v : e) v /= sum;
  return ProbVec(d, std::move(e));
}

double empirical_lipschitz(const IrfOperator& op, int num_pairs,
                           std::uint64_t seed) {
  if (num_pairs < 1) throw std::invalid_argument("num_pairs must be >= 1");
  Rng rng(seed);
  double best = 0.0;
  for (int i = 0; i < num_pairs; ++i) {
    const ProbVec x = sample_simplex(op.d, rng);
    const ProbVec y = sample_simplex(op.d, rng);
    const double denom = l1_distance(x, y);
    if (denom == 0.0) continue;
    best = std::max(best, l1_distance(op.apply(x), op.apply(y)) / denom);
  }
  return best;
}

RateFit rate_fit(std::span<const double> distances, int burn_in) {
  if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
  if (distances.size() <= static_cast<std::size_t>(burn_in) + 2) {
    throw std::invalid_argument("rate_fit needs more than burn_in + 2 points");
  }
  RateFit fit;
  std::vector<double> ks, logs;
  for (std::size_t k = burn_in + 1; k < distances.size(); ++k) {
    const double v = distances[k];
    if (v < 0.0) throw std::invalid_argument("distances must be nonnegative");
    if (v == 0.0) {
      fit.exact_convergence_step = static_cast<int>(k);
      return fit;
    }
    ks.push_back(static_cast<double>(k));
    logs.push_back(std::log(v));
  }
  const double n = static_cast<double>(ks.size());
  double kbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    kbar += ks[i];
    ybar += logs[i];
  }
  kbar /= n;
  ybar /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sxx += (ks[i] - kbar) * (ks[i] - kbar);
    sxy += (ks[i] - kbar) * (logs[i] - ybar);
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * kbar;
  return fit;
}

RateFit rate_fit(const IterationTrace& trace, int burn_in) {
  return rate_fit(std::span<const double>(trace.distances), burn_in);
}

}  // namespace irf
