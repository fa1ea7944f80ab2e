#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irf/errors.hpp"

namespace irf {

// Full 2^d vectors are capped at this dimension; the marginal-only
// algorithm has no cap.
inline constexpr int kMaxFullDim = 16;

// Number of binary configurations, 2^d, after range-checking d.
std::size_t config_count(int d);

// j-th bit from the left of the d-bit expansion of mask; j in 1..d.
// The mask is the configuration index: bit j is the value of variable j.
int config_bit(int j, std::uint32_t mask, int d);

// Translation between the two coordinate conventions: position i counted
// from one end equals mask m-1-i counted from the other. Involutive.
std::uint32_t complement_index(std::uint32_t i, int d);

// A distribution on {0,1}: (P(1), P(0)).
struct BernoulliPair {
  double p1 = 0.0;
  double p0 = 1.0;
  BernoulliPair() = default;
  BernoulliPair(double p1_, double p0_);
};

// A probability vector on {0,1}^d, stored by configuration mask: entry at
// mask l is the probability of the configuration with bits b_j(l). The
// all-change configuration (mask m-1) is the anchor, the common fixed
// point and convergence target of every predict operator in this library.
class ProbVec {
 public:
  ProbVec(int d, std::vector<double> entries);

  static ProbVec uniform(int d);
  static ProbVec point_mass(int d, std::uint32_t mask);
  static ProbVec anchor_point(int d);  // all mass on mask m-1

  int dim() const { return d_; }
  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t mask) const { return entries_[mask]; }
  std::span<const double> entries() const { return entries_; }
  double anchor_mass() const { return entries_.back(); }

  // Rescale to unit sum; used after every multi-step update to stop drift.
  ProbVec renormalized() const;

 private:
  int d_;
  std::vector<double> entries_;
};

// Per-step likelihood weights, kept in log domain so that products over
// many streams and many steps cannot overflow. The anchor entry is pinned
// to exactly 1 (log 0); the update map is invariant to that rescaling.
class WeightVec {
 public:
  // Anchors by subtracting log_entries[m-1], which must be finite.
  WeightVec(int d, std::vector<double> log_entries);

  static WeightVec ones(int d);
  static WeightVec from_linear(int d, std::span<const double> entries);

  int dim() const { return d_; }
  std::size_t size() const { return log_entries_.size(); }
  double log_entry(std::size_t mask) const { return log_entries_[mask]; }
  double entry(std::size_t mask) const;
  std::span<const double> log_entries() const { return log_entries_; }

 private:
  int d_;
  std::vector<double> log_entries_;
};

// Prior-to-posterior map q_theta(x) = (x o theta) / (x^T theta).
// Invariant to positive rescaling of theta. Throws DegenerateUpdateError
// when the prior support and likelihood support are disjoint.
ProbVec bayes_update(const ProbVec& x, const WeightVec& theta);

// j-th marginal of y, normalized by the actual total mass.
BernoulliPair marginal(const ProbVec& y, int j);

// Product measure with the given per-variable marginals; pairs[j-1] is
// the law of variable j.
ProbVec tensor_product(const std::vector<BernoulliPair>& pairs);

// ||x - anchor||_1, computed as 2 (1 - anchor mass).
double dist_to_anchor(const ProbVec& x);

double l1_distance(const ProbVec& a, const ProbVec& b);

// Largest off-anchor weight (the paper-facing detection statistic of a
// single step); log variant avoids overflow for extreme observations.
double max_off_anchor(const WeightVec& theta);
double log_max_off_anchor(const WeightVec& theta);

// Replace every off-anchor entry by the common value max_off_anchor * kappa.
// This is the majorant used to peel a kappa-Lipschitz predict operator out
// of the iteration; kappa in [0, 1].
WeightVec flatten_tail(const WeightVec& theta, double kappa);

// Semigroup composition: q_{a o b} = q_a . q_b.
WeightVec pointwise_product(const WeightVec& a, const WeightVec& b);

}  // namespace irf
