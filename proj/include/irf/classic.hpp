#pragma once

#include <optional>
#include <vector>

#include "irf/rng.hpp"

namespace irf {

struct GaussianSpec {
  double mean = 0.0;
  double variance = 1.0;

  double log_density(double x) const;
  double sample(Rng& rng) const;
};

// KL divergence between Gaussians, integral of f log(f/g).
double kl_gaussian(const GaussianSpec& f, const GaussianSpec& g);

// Standard deviation of log(g(X)/f(X)) with X ~ f; closed form, reported
// as a proxy for the sub-Gaussian norm of the log likelihood ratio.
double llr_stddev(const GaussianSpec& f, const GaussianSpec& g);

// Single stream, single change point: observations are pre_change (g)
// for t <= lambda - 1 and post_change (f) from t = lambda on, with a
// geometric prior on lambda. Identical pre and post laws are accepted
// (the change is then undetectable and callers flag kl == 0).
struct ClassicModel {
  GaussianSpec post_change;  // f
  GaussianSpec pre_change;   // g
  double rho = 0.1;
};

void validate(const ClassicModel& model);

// Geometric draw on {1, 2, ...}: P(k) = (1-rho)^(k-1) rho.
int sample_changepoint(const ClassicModel& model, Rng& rng);

// gamma^{n-1}[n] = rho + (1-rho) gamma^{n-1}[n-1]; the scalar form of the
// predict operator T(x) = rho * anchor + (1-rho) x, Lipschitz 1-rho.
double prior_predict(double gamma, double rho);

// First coordinate of bayes_update((gamma, 1-gamma), (1, g(x)/f(x))).
double posterior_step(double gamma_pred, double x, const ClassicModel& model);

// Same update applied jointly to (gamma, 1 - gamma) given the log ratio
// log g(x) - log f(x). The complement is propagated multiplicatively so it
// stays meaningful long after gamma has rounded to 1.
void posterior_pair_update(double& gamma, double& one_minus_gamma, double llr);

struct ClassicRun {
  std::optional<int> stop_time;          // first n with gamma >= 1 - alpha
  std::vector<double> gammas;            // gamma^n[n], n = 0..horizon
  std::vector<double> one_minus_gammas;  // carried separately for rate fits
  int lambda_true = 0;
};

// Runs the posterior recursion on freshly simulated data and applies the
// posterior threshold rule at level 1 - alpha. alpha > 0; alpha >= 1 makes
// the threshold vacuous and the rule stops at n = 1.
ClassicRun shiryayev_run(const ClassicModel& model, double alpha,
                         int lambda_true, int horizon, Rng& rng);

}  // namespace irf
