#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "irf/rng.hpp"
#include "irf/simplex.hpp"

namespace irf {

// A deterministic predict operator on P_d together with its declared
// contraction properties. Every operator in this library fixes the anchor.
struct IrfOperator {
  int d = 1;
  std::function<ProbVec(const ProbVec&)> apply;
  double declared_lipschitz = 1.0;
  ProbVec declared_fixed_point = ProbVec::anchor_point(1);
};

IrfOperator identity_operator(int d);
IrfOperator constant_anchor_operator(int d);
// T(x) = rho * anchor + (1 - rho) * x; the single change point predictor
// when d = 1, Lipschitz with constant 1 - rho.
IrfOperator geometric_predict_operator(int d, double rho);

// apply(fixed point) == fixed point, entrywise within tol.
bool check_fixed_point(const IrfOperator& op, double tol = 1e-10);

struct IterationTrace {
  std::vector<ProbVec> states;      // Q_0 .. Q_n
  std::vector<double> distances;    // dist_to_anchor per state
  std::vector<WeightVec> thetas;    // the consumed weight sequence
  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

// Q_k = bayes_update(T(Q_{k-1}), theta_k), Q_0 = x0.
IterationTrace iterate(const IrfOperator& op, std::span<const WeightVec> thetas,
                       const ProbVec& x0, int steps);

// 2 (1 - a)/a * (kappa e^{-info_rate + eps})^n: the geometric envelope on
// ||Q_n - anchor||_1 that holds with high probability once the average log
// weight drops below -info_rate.
double geometric_error_envelope(double x0_anchor, double kappa,
                                double info_rate, double eps, int n);

// Posterior anchor mass after a two-cell update with flat tail weight:
// r / (r + theta (1 - r)). Identity at theta = 1.
double anchor_posterior(double theta, double r);
double anchor_posterior_complement(double theta, double r);  // 1 - the above

// Supremum of the complement ratio over {rbar <= kappa * sbar}; the
// constant that makes the peeling step tight. Closed form, and a grid
// evaluation converging to it from below.
double peel_ratio_sup(double kappa, double theta, double gamma);
double peel_ratio_sup_grid(double kappa, double theta, double gamma,
                           int grid_size);

// Max sampled ratio ||T(x)-T(y)|| / ||x-y|| over num_pairs pairs drawn
// uniformly from the simplex; a lower bound on the Lipschitz constant.
double empirical_lipschitz(const IrfOperator& op, int num_pairs,
                           std::uint64_t seed);

// Uniform sample from P_d (normalized independent exponentials).
ProbVec sample_simplex(int d, Rng& rng);

struct RateFit {
  // Set when a distance of exactly zero is hit at that step; no slope then.
  std::optional<int> exact_convergence_step;
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares slope of log distances[k] against k for k > burn_in.
RateFit rate_fit(std::span<const double> distances, int burn_in = 5);
RateFit rate_fit(const IterationTrace& trace, int burn_in = 5);

}  // namespace irf
