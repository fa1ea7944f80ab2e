#include "irf/classic.hpp"

#include <cmath>
#include <stdexcept>

#include "irf/errors.hpp"

namespace irf {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}  // namespace

void posterior_pair_update(double& gamma, double& one_minus_gamma, double llr) {
  const double r = std::exp(llr);
  const double denom = gamma + one_minus_gamma * r;
  if (!(denom > 0.0)) {
    throw DegenerateUpdateError("posterior update with zero total mass");
  }
  const double g = gamma / denom;
  one_minus_gamma = one_minus_gamma * r / denom;
  gamma = g;
}

double GaussianSpec::log_density(double x) const {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("GaussianSpec variance must be positive");
  }
  const double z = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance) + z * z / variance);
}

double GaussianSpec::sample(Rng& rng) const {
  return rng.normal(mean, std::sqrt(variance));
}

double kl_gaussian(const GaussianSpec& f, const GaussianSpec& g) {
  if (!(f.variance > 0.0 && g.variance > 0.0)) {
    throw std::invalid_argument("kl_gaussian: variances must be positive");
  }
  const double dm = f.mean - g.mean;
  return 0.5 * (std::log(g.variance / f.variance) +
                (f.variance + dm * dm) / g.variance - 1.0);
}

double llr_stddev(const GaussianSpec& f, const GaussianSpec& g) {
  // Y = log g(X) - log f(X) = a X^2 + b X + c with X ~ N(mu, s2);
  // Var Y = a^2 (4 mu^2 s2 + 2 s2^2) + b^2 s2 + 4 a b mu s2.
  const double a = 0.5 / f.variance - 0.5 / g.variance;
  const double b = g.mean / g.variance - f.mean / f.variance;
  const double mu = f.mean;
  const double s2 = f.variance;
  const double var =
      a * a * (4.0 * mu * mu * s2 + 2.0 * s2 * s2) + b * b * s2 +
      4.0 * a * b * mu * s2;
  return std::sqrt(std::max(0.0, var));
}

void validate(const ClassicModel& model) {
  if (!(model.rho > 0.0 && model.rho < 1.0)) {
    throw std::invalid_argument("ClassicModel rho must be in (0, 1)");
  }
  if (!(model.post_change.variance > 0.0) || !(model.pre_change.variance > 0.0)) {
    throw std::invalid_argument("ClassicModel variances must be positive");
  }
}

int sample_changepoint(const ClassicModel& model, Rng& rng) {
  validate(model);
  return rng.geometric(model.rho);
}

double prior_predict(double gamma, double rho) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("prior_predict: gamma must be in [0, 1]");
  }
  return rho + (1.0 - rho) * gamma;
}

double posterior_step(double gamma_pred, double x, const ClassicModel& model) {
  if (!(gamma_pred >= 0.0 && gamma_pred <= 1.0)) {
    throw std::invalid_argument("posterior_step: gamma must be in [0, 1]");
  }
  const double llr =
      model.pre_change.log_density(x) - model.post_change.log_density(x);
  if (!std::isfinite(llr)) {
    throw DegenerateObservationError("non-finite log likelihood ratio");
  }
  double gamma = gamma_pred;
  double beta = 1.0 - gamma_pred;
  posterior_pair_update(gamma, beta, llr);
  return gamma;
}

ClassicRun shiryayev_run(const ClassicModel& model, double alpha,
                         int lambda_true, int horizon, Rng& rng) {
  validate(model);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (lambda_true < 1) throw std::invalid_argument("lambda_true must be >= 1");

  const double threshold = 1.0 - alpha;
  ClassicRun run;
  run.lambda_true = lambda_true;
  run.gammas.reserve(horizon + 1);
  run.one_minus_gammas.reserve(horizon + 1);
  run.gammas.push_back(0.0);
  run.one_minus_gammas.push_back(1.0);

  double gamma = 0.0;
  double beta = 1.0;
  for (int n = 1; n <= horizon; ++n) {
    if (gamma > 1.0) gamma = 1.0 - 1e-15;  // floating error guard only
    gamma = prior_predict(gamma, model.rho);
    beta *= (1.0 - model.rho);
    const GaussianSpec& law = n >= lambda_true ? model.post_change : model.pre_change;
    const double x = law.sample(rng);
    const double llr =
        model.pre_change.log_density(x) - model.post_change.log_density(x);
    if (!std::isfinite(llr)) {
      throw DegenerateObservationError("non-finite log likelihood ratio");
    }
    posterior_pair_update(gamma, beta, llr);
    run.gammas.push_back(gamma);
    run.one_minus_gammas.push_back(beta);
    if (!run.stop_time && gamma >= threshold) run.stop_time = n;
  }
  return run;
}

}  // namespace irf
