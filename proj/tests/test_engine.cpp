#include <doctest.h>

#include <cmath>
#include <vector>

#include "irf/classic.hpp"
#include "irf/engine.hpp"
#include "irf/errors.hpp"
#include "irf/rng.hpp"

using namespace irf;

namespace {

WeightVec random_weights(int d, Rng& rng, double lo = 0.05, double hi = 4.0) {
  std::vector<double> w(config_count(d));
  for (double& v : w) v = lo + (hi - lo) * rng.uniform01();
  return WeightVec::from_linear(d, w);
}

}  // namespace

TEST_SUITE_BEGIN("engine");

TEST_CASE("built-in operators fix the anchor") {
  CHECK(check_fixed_point(identity_operator(3)));
  CHECK(check_fixed_point(constant_anchor_operator(2)));
  CHECK(check_fixed_point(geometric_predict_operator(2, 0.3)));
}

TEST_CASE("iterate: identity dynamics with flat weights stays put") {
  Rng rng(11);
  const ProbVec x0 = sample_simplex(2, rng);
  const std::vector<WeightVec> thetas(5, WeightVec::ones(2));
  const IterationTrace trace = iterate(identity_operator(2), thetas, x0, 5);
  REQUIRE(trace.states.size() == 6);
  for (const ProbVec& state : trace.states) {
    for (std::size_t i = 0; i < state.size(); ++i) {
      CHECK(state[i] == doctest::Approx(x0[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("iterate: semigroup collapse under the identity operator") {
  Rng rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 3.999);
    const int n = 50;
    const ProbVec x0 = sample_simplex(d, rng);
    std::vector<WeightVec> thetas;
    for (int k = 0; k < n; ++k) thetas.push_back(random_weights(d, rng, 0.5, 2.0));
    const IterationTrace trace = iterate(identity_operator(d), thetas, x0, n);

    WeightVec product = WeightVec::ones(d);
    for (const WeightVec& t : thetas) product = pointwise_product(product, t);
    const ProbVec collapsed = bayes_update(x0, product);
    for (std::size_t i = 0; i < collapsed.size(); ++i) {
      CHECK(trace.states.back()[i] == doctest::Approx(collapsed[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("iterate: anchor start is absorbing") {
  Rng rng(13);
  const ProbVec e0 = ProbVec::anchor_point(2);
  std::vector<WeightVec> thetas;
  for (int k = 0; k < 10; ++k) thetas.push_back(random_weights(2, rng));
  const IterationTrace trace =
      iterate(geometric_predict_operator(2, 0.2), thetas, e0, 10);
  for (const ProbVec& state : trace.states) {
    CHECK(state.anchor_mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (double dist : trace.distances) CHECK(dist <= 1e-12);
}

TEST_CASE("iterate annotates degenerate updates with the step index") {
  const ProbVec x0 = ProbVec::point_mass(1, 0);
  const std::vector<WeightVec> thetas{
      WeightVec::ones(1),
      WeightVec::from_linear(1, std::vector<double>{0.0, 1.0})};
  try {
    iterate(identity_operator(1), thetas, x0, 2);
    FAIL("expected DegenerateUpdateError");
  } catch (const DegenerateUpdateError& e) {
    CHECK(std::string(e.what()).find("step 2") != std::string::npos);
  }
}

TEST_CASE("geometric_error_envelope values and errors") {
  CHECK(geometric_error_envelope(1.0, 0.9, 0.5, 0.0, 7) == 0.0);
  CHECK(geometric_error_envelope(0.5, 1.0, 0.0, 0.0, 0) == doctest::Approx(2.0));
  // Independent route: exp(n log(kappa) - n I).
  const double expected = 2.0 * std::exp(10.0 * (std::log(0.9) - 0.5));
  CHECK(geometric_error_envelope(0.5, 0.9, 0.5, 0.0, 10) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(geometric_error_envelope(0.0, 0.9, 0.5, 0.0, 1),
                  BoundUndefinedError);
}

TEST_CASE("anchor_posterior closed form") {
  CHECK(anchor_posterior(1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  for (double theta : {0.2, 1.0, 7.0}) {
    CHECK(anchor_posterior(theta, 1.0) == doctest::Approx(1.0));
  }
  CHECK(anchor_posterior(2.0, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(anchor_posterior(0.0, 0.0), DegenerateUpdateError);
  CHECK(anchor_posterior_complement(2.0, 0.5) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("peel_ratio_sup: the matched tail weight gives exactly 1") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const double kappa = 0.05 + 0.95 * rng.uniform01();
    const double theta = 0.1 + 4.0 * rng.uniform01();
    CHECK(peel_ratio_sup(kappa, theta, theta * kappa) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(peel_ratio_sup(1.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(peel_ratio_sup(0.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("peel_ratio_sup_grid converges to the closed form from below") {
  Rng rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    const double kappa = 0.05 + 0.95 * rng.uniform01();
    const double theta = 0.1 + 4.0 * rng.uniform01();
    const double gamma = theta * kappa;
    const double closed = peel_ratio_sup(kappa, theta, gamma);
    const double coarse = peel_ratio_sup_grid(kappa, theta, gamma, 300);
    const double fine = peel_ratio_sup_grid(kappa, theta, gamma, 2000);
    CHECK(coarse <= closed + 1e-9);
    CHECK(fine <= closed + 1e-9);
    CHECK(fine >= coarse - 1e-12);  // refinement only improves
    CHECK(closed - fine <= 1e-3);
  }
  // Off the matched line the grid stays below the closed form too.
  for (int rep = 0; rep < 10; ++rep) {
    const double kappa = 0.05 + 0.95 * rng.uniform01();
    const double theta = 0.1 + 4.0 * rng.uniform01();
    const double gamma = 0.1 + 2.0 * rng.uniform01();
    CHECK(peel_ratio_sup_grid(kappa, theta, gamma, 500) <=
          peel_ratio_sup(kappa, theta, gamma) + 1e-9);
  }
  CHECK(peel_ratio_sup_grid(1.0, 1.0, 1.0, 200) == doctest::Approx(1.0));
}

TEST_CASE("empirical_lipschitz: identity attains 1, constant map gives 0") {
  CHECK(empirical_lipschitz(identity_operator(2), 100, 5) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(empirical_lipschitz(constant_anchor_operator(2), 100, 5) == 0.0);
}

TEST_CASE("peeling inequality under the geometric predictor") {
  // ||q_theta(T(x)) - anchor|| <= ||q_flat(x) - anchor|| with the flat
  // majorant built from T's contraction constant.
  Rng rng(23);
  for (int rep = 0; rep < 10000; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 2.999);
    const double rho = 0.05 + 0.9 * rng.uniform01();
    const IrfOperator op = geometric_predict_operator(d, rho);
    const ProbVec x = sample_simplex(d, rng);
    const WeightVec theta = random_weights(d, rng, 0.01, 6.0);
    const double lhs = dist_to_anchor(bayes_update(op.apply(x), theta));
    const double rhs =
        dist_to_anchor(bayes_update(x, flatten_tail(theta, op.declared_lipschitz)));
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("rate_fit: geometric sequence, constants, exact zero, errors") {
  const std::vector<double> geo{1.0, 0.5, 0.25, 0.125};
  const RateFit g = rate_fit(std::span<const double>(geo), 0);
  CHECK_FALSE(g.exact_convergence_step);
  CHECK(g.slope == doctest::Approx(std::log(0.5)).epsilon(1e-9));

  const std::vector<double> flat{0.7, 0.7, 0.7, 0.7, 0.7};
  CHECK(rate_fit(std::span<const double>(flat), 0).slope ==
        doctest::Approx(0.0).epsilon(1e-12));

  const std::vector<double> hits_zero{1.0, 0.5, 0.0, 0.125};
  const RateFit z = rate_fit(std::span<const double>(hits_zero), 0);
  REQUIRE(z.exact_convergence_step);
  CHECK(*z.exact_convergence_step == 2);

  CHECK_THROWS_AS(rate_fit(std::span<const double>(geo), 2),
                  std::invalid_argument);
}

TEST_CASE("envelope holds on replications whose average log weight is small") {
  // Classic-style d=1 runs: T(x) = rho anchor + (1-rho) x with Gaussian
  // post-change likelihood ratios. On replications where the sampled mean
  // of log theta* is <= -I, the envelope at eps = 2 stderr must hold.
  const double rho = 0.1;
  const GaussianSpec f{0.0, 1.0};
  const GaussianSpec g{1.0, 1.0};
  const double info = kl_gaussian(f, g);
  const int n = 60;
  const IrfOperator op = geometric_predict_operator(1, rho);

  int conditioned = 0, held = 0;
  for (int rep = 0; rep < 200; ++rep) {
    Rng rng(4000 + rep);
    std::vector<WeightVec> thetas;
    std::vector<double> logs;
    for (int k = 0; k < n; ++k) {
      const double x = f.sample(rng);
      const double llr = g.log_density(x) - f.log_density(x);
      thetas.push_back(WeightVec(1, std::vector<double>{llr, 0.0}));
      logs.push_back(llr);
    }
    double mean = 0.0;
    for (double v : logs) mean += v;
    mean /= n;
    if (mean > -info) continue;
    ++conditioned;
    double var = 0.0;
    for (double v : logs) var += (v - mean) * (v - mean);
    var /= (n - 1);
    const double eps = 2.0 * std::sqrt(var / n);
    const IterationTrace trace =
        iterate(op, thetas, ProbVec::uniform(1), n);
    const double bound = geometric_error_envelope(
        0.5, op.declared_lipschitz, info, eps, n);
    if (trace.distances.back() <= bound) ++held;
  }
  REQUIRE(conditioned > 50);
  CHECK(static_cast<double>(held) / conditioned >= 0.9);
}

TEST_SUITE_END();
