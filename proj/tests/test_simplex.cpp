#include <doctest.h>

#include <cmath>
#include <vector>

#include "irf/engine.hpp"
#include "irf/errors.hpp"
#include "irf/rng.hpp"
#include "irf/simplex.hpp"

using namespace irf;

TEST_SUITE_BEGIN("simplex");

TEST_CASE("config_bit reads the d-bit expansion from the left") {
  // 5 = 101 in three bits
  CHECK(config_bit(1, 5, 3) == 1);
  CHECK(config_bit(2, 5, 3) == 0);
  CHECK(config_bit(3, 5, 3) == 1);
  for (int j = 1; j <= 4; ++j) CHECK(config_bit(j, 15, 4) == 1);
  CHECK_THROWS_AS(config_bit(0, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(config_bit(4, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(config_bit(1, 8, 3), std::invalid_argument);
}

TEST_CASE("complement_index is the order-reversing involution") {
  CHECK(complement_index(0, 2) == 3);
  CHECK(complement_index(3, 2) == 0);
  for (std::uint32_t i = 0; i < 16; ++i) {
    CHECK(complement_index(complement_index(i, 4), 4) == i);
  }
  CHECK_THROWS_AS(complement_index(4, 2), std::invalid_argument);
}

TEST_CASE("ProbVec validates the simplex invariants") {
  CHECK_THROWS_AS(ProbVec(2, {0.5, 0.5, 0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVec(2, {1.2, -0.2, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVec(2, {1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVec(0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVec(17, std::vector<double>(1u << 17, 0.0)),
                  std::invalid_argument);
  const ProbVec anchor = ProbVec::anchor_point(3);
  CHECK(anchor.anchor_mass() == 1.0);
  CHECK(anchor[7] == 1.0);
  CHECK(anchor[0] == 0.0);
}

TEST_CASE("bayes_update: identity weights and point mass absorption") {
  const ProbVec x(1, {0.5, 0.5});
  const ProbVec same = bayes_update(x, WeightVec::ones(1));
  CHECK(same[0] == doctest::Approx(0.5).epsilon(1e-15));

  // A point mass on the anchor is fixed under any valid weights.
  const ProbVec e0 = ProbVec::anchor_point(2);
  const WeightVec theta =
      WeightVec::from_linear(2, std::vector<double>{0.3, 2.0, 5.0, 1.0});
  const ProbVec out = bayes_update(e0, theta);
  CHECK(out.anchor_mass() == 1.0);
}

TEST_CASE("bayes_update: hand-evaluated two-cell case") {
  // x = (0.5, 0.5), theta tail 3 against anchor 1: (0.5, 1.5)/2.
  const ProbVec x(1, {0.5, 0.5});
  const WeightVec theta = WeightVec::from_linear(1, std::vector<double>{3.0, 1.0});
  const ProbVec out = bayes_update(x, theta);
  CHECK(out[1] == doctest::Approx(0.25).epsilon(1e-14));  // anchor coordinate
  CHECK(out[0] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("bayes_update: disjoint support raises") {
  const ProbVec x = ProbVec::point_mass(1, 0);
  const WeightVec theta = WeightVec::from_linear(1, std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS(bayes_update(x, theta), DegenerateUpdateError);
}

TEST_CASE("bayes_update is invariant to positive rescaling of the weights") {
  Rng rng(2024);
  for (double beta : {1e-6, 1.0, 1e6}) {
    for (int rep = 0; rep < 20; ++rep) {
      const ProbVec x = sample_simplex(3, rng);
      std::vector<double> w(8), scaled(8);
      for (int i = 0; i < 8; ++i) {
        w[i] = 0.05 + 3.0 * rng.uniform01();
        scaled[i] = beta * w[i];
      }
      const ProbVec a = bayes_update(x, WeightVec::from_linear(3, w));
      const ProbVec b = bayes_update(x, WeightVec::from_linear(3, scaled));
      for (int i = 0; i < 8; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("semigroup: composed updates equal the pointwise product update") {
  Rng rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 3.999);
    const std::size_t m = config_count(d);
    const ProbVec x = sample_simplex(d, rng);
    std::vector<double> w1(m), w2(m);
    for (std::size_t i = 0; i < m; ++i) {
      w1[i] = 0.01 + 5.0 * rng.uniform01();
      w2[i] = 0.01 + 5.0 * rng.uniform01();
    }
    const WeightVec t1 = WeightVec::from_linear(d, w1);
    const WeightVec t2 = WeightVec::from_linear(d, w2);
    const ProbVec two_steps = bayes_update(bayes_update(x, t2), t1);
    const ProbVec one_step = bayes_update(x, pointwise_product(t1, t2));
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(two_steps[i] == doctest::Approx(one_step[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("marginal: uniform, anchor, and a hand-summed case") {
  CHECK(marginal(ProbVec::uniform(2), 1).p1 == doctest::Approx(0.5));
  const BernoulliPair anchor = marginal(ProbVec::anchor_point(3), 2);
  CHECK(anchor.p1 == doctest::Approx(1.0));
  CHECK(anchor.p0 == doctest::Approx(0.0));

  // Display (y3, y2, y1, y0) = (0.4, 0.3, 0.2, 0.1): variable 2 is set in
  // masks 3 and 1.
  const ProbVec y(2, {0.1, 0.2, 0.3, 0.4});
  CHECK(marginal(y, 2).p1 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(marginal(y, 1).p1 == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("tensor_product: point masses, uniform, and a hand product") {
  const ProbVec e0 = tensor_product({BernoulliPair{1.0, 0.0}, {1.0, 0.0}});
  CHECK(e0.anchor_mass() == doctest::Approx(1.0));

  const ProbVec unif = tensor_product(
      {BernoulliPair{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  for (std::size_t i = 0; i < 8; ++i) CHECK(unif[i] == doctest::Approx(0.125));

  // Masks (11, 10, 01, 00) -> (0.14, 0.56, 0.06, 0.24).
  const ProbVec prod = tensor_product({BernoulliPair{0.7, 0.3}, {0.2, 0.8}});
  CHECK(prod[3] == doctest::Approx(0.14).epsilon(1e-14));
  CHECK(prod[2] == doctest::Approx(0.56).epsilon(1e-14));
  CHECK(prod[1] == doctest::Approx(0.06).epsilon(1e-14));
  CHECK(prod[0] == doctest::Approx(0.24).epsilon(1e-14));

  CHECK_THROWS_AS(tensor_product({}), std::invalid_argument);
}

TEST_CASE("marginal recovers tensor_product factors") {
  Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform01() * 5.999);
    std::vector<BernoulliPair> pairs;
    for (int j = 0; j < d; ++j) {
      const double p = rng.uniform01();
      pairs.emplace_back(p, 1.0 - p);
    }
    const ProbVec y = tensor_product(pairs);
    for (int j = 1; j <= d; ++j) {
      CHECK(marginal(y, j).p1 ==
            doctest::Approx(pairs[j - 1].p1).epsilon(1e-12));
    }
  }
}

TEST_CASE("dist_to_anchor agrees with the direct l1 distance") {
  CHECK(dist_to_anchor(ProbVec::anchor_point(2)) == 0.0);
  CHECK(dist_to_anchor(ProbVec::uniform(1)) == doctest::Approx(1.0));
  // Anchor-first display (0.9, 0.06, 0.03, 0.01).
  const ProbVec x(2, {0.01, 0.03, 0.06, 0.9});
  CHECK(dist_to_anchor(x) == doctest::Approx(0.2).epsilon(1e-14));

  Rng rng(55);
  for (int rep = 0; rep < 40; ++rep) {
    const ProbVec y = sample_simplex(3, rng);
    CHECK(dist_to_anchor(y) ==
          doctest::Approx(l1_distance(y, ProbVec::anchor_point(3))).epsilon(1e-12));
  }
}

TEST_CASE("max_off_anchor scans the non-anchor entries") {
  // Superscript display (1, 0.5, 0.3, 0.2): anchor first.
  const WeightVec theta =
      WeightVec::from_linear(2, std::vector<double>{0.2, 0.3, 0.5, 1.0});
  CHECK(max_off_anchor(theta) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(max_off_anchor(WeightVec::ones(3)) == doctest::Approx(1.0));
  const WeightVec zero_tail =
      WeightVec::from_linear(2, std::vector<double>{0.0, 0.0, 0.0, 1.0});
  CHECK(max_off_anchor(zero_tail) == 0.0);
}

TEST_CASE("flatten_tail builds the constant-tail majorant") {
  // Display (1, 2, 3, 4) -> kappa 1 gives (1, 4, 4, 4).
  const WeightVec theta =
      WeightVec::from_linear(2, std::vector<double>{4.0, 3.0, 2.0, 1.0});
  const WeightVec flat = flatten_tail(theta, 1.0);
  CHECK(flat.entry(3) == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i) CHECK(flat.entry(i) == doctest::Approx(4.0).epsilon(1e-14));

  const WeightVec collapsed = flatten_tail(theta, 0.0);
  for (int i = 0; i < 3; ++i) CHECK(collapsed.entry(i) == 0.0);
  CHECK(collapsed.entry(3) == 1.0);

  const WeightVec constant =
      WeightVec::from_linear(2, std::vector<double>{0.7, 0.7, 0.7, 1.0});
  const WeightVec same = flatten_tail(constant, 1.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(same.entry(i) == doctest::Approx(constant.entry(i)).epsilon(1e-14));
  }
}

TEST_CASE("WeightVec anchors itself and rejects bad input") {
  const WeightVec theta = WeightVec(2, std::vector<double>{1.0, 2.0, 3.0, 5.0});
  CHECK(theta.log_entry(3) == 0.0);
  CHECK(theta.log_entry(0) == doctest::Approx(-4.0));
  CHECK_THROWS_AS(
      WeightVec::from_linear(1, std::vector<double>{1.0, 0.0}),  // zero anchor
      std::invalid_argument);
  CHECK_THROWS_AS(WeightVec::from_linear(1, std::vector<double>{-1.0, 1.0}),
                  std::invalid_argument);
}

TEST_SUITE_END();
