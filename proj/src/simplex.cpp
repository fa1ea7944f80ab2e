#include "irf/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace irf {

namespace {
constexpr double kSimplexTol = 1e-9;
constexpr double kPairTol = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

std::size_t config_count(int d) {
  if (d < 1 || d > kMaxFullDim) {
    throw std::invalid_argument("dimension must be in [1, " +
                                std::to_string(kMaxFullDim) + "], got " +
                                std::to_string(d));
  }
  return std::size_t{1} << d;
}

int config_bit(int j, std::uint32_t mask, int d) {
  const std::size_t m = config_count(d);
  if (j < 1 || j > d) {
    throw std::invalid_argument("node index out of range: " + std::to_string(j));
  }
  if (mask >= m) {
    throw std::invalid_argument("config mask out of range: " + std::to_string(mask));
  }
  return static_cast<int>((mask >> (d - j)) & 1u);
}

std::uint32_t complement_index(std::uint32_t i, int d) {
  const std::size_t m = config_count(d);
  if (i >= m) {
    throw std::invalid_argument("index out of range: " + std::to_string(i));
  }
  return static_cast<std::uint32_t>(m - 1 - i);
}

BernoulliPair::BernoulliPair(double p1_, double p0_) : p1(p1_), p0(p0_) {
  if (!(p1 >= 0.0) || !(p0 >= 0.0)) {
    throw std::invalid_argument("BernoulliPair entries must be nonnegative");
  }
  if (std::abs(p1 + p0 - 1.0) > kPairTol) {
    throw std::invalid_argument("BernoulliPair must sum to 1");
  }
}

ProbVec::ProbVec(int d, std::vector<double> entries)
    : d_(d), entries_(std::move(entries)) {
  const std::size_t m = config_count(d);
  if (entries_.size() != m) {
    throw std::invalid_argument("ProbVec needs 2^d entries");
  }
  double sum = 0.0;
  for (double v : entries_) {
    if (!(v >= 0.0)) {  // catches negatives and NaN
      throw std::invalid_argument("ProbVec entries must be nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    throw std::invalid_argument("ProbVec entries must sum to 1 (got " +
                                std::to_string(sum) + ")");
  }
}

ProbVec ProbVec::uniform(int d) {
  const std::size_t m = config_count(d);
  return ProbVec(d, std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

ProbVec ProbVec::point_mass(int d, std::uint32_t mask) {
  const std::size_t m = config_count(d);
  if (mask >= m) throw std::invalid_argument("point_mass: mask out of range");
  std::vector<double> e(m, 0.0);
  e[mask] = 1.0;
  return ProbVec(d, std::move(e));
}

ProbVec ProbVec::anchor_point(int d) {
  return point_mass(d, static_cast<std::uint32_t>(config_count(d) - 1));
}

ProbVec ProbVec::renormalized() const {
  const double sum = std::accumulate(entries_.begin(), entries_.end(), 0.0);
  if (!(sum > 0.0)) throw DegenerateUpdateError("cannot renormalize zero vector");
  std::vector<double> e(entries_);
  for (double& v : e) v /= sum;
  return ProbVec(d_, std::move(e));
}

WeightVec::WeightVec(int d, std::vector<double> log_entries)
    : d_(d), log_entries_(std::move(log_entries)) {
  const std::size_t m = config_count(d);
  if (log_entries_.size() != m) {
    throw std::invalid_argument("WeightVec needs 2^d log entries");
  }
  const double anchor = log_entries_.back();
  if (!std::isfinite(anchor)) {
    throw std::invalid_argument("WeightVec anchor entry must be positive and finite");
  }
  for (double& v : log_entries_) {
    v -= anchor;
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("WeightVec log entries must be < +inf and not NaN");
    }
  }
  log_entries_.back() = 0.0;  // exact
}

WeightVec WeightVec::ones(int d) {
  return WeightVec(d, std::vector<double>(config_count(d), 0.0));
}

WeightVec WeightVec::from_linear(int d, std::span<const double> entries) {
  const std::size_t m = config_count(d);
  if (entries.size() != m) {
    throw std::invalid_argument("WeightVec needs 2^d entries");
  }
  std::vector<double> logs(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(entries[i] >= 0.0)) {
      throw std::invalid_argument("WeightVec entries must be nonnegative");
    }
    logs[i] = entries[i] > 0.0 ? std::log(entries[i]) : kNegInf;
  }
  return WeightVec(d, std::move(logs));
}

double WeightVec::entry(std::size_t mask) const {
  return std::exp(log_entries_[mask]);
}

ProbVec bayes_update(const ProbVec& x, const WeightVec& theta) {
  if (x.dim() != theta.dim()) {
    throw std::invalid_argument("bayes_update: dimension mismatch");
  }
  const std::size_t m = x.size();

  // Exponentiate relative to the largest log weight carried by the prior
  // support; a positive rescaling the update is invariant to.
  double shift = kNegInf;
  for (std::size_t i = 0; i < m; ++i) {
    if (x[i] > 0.0) shift = std::max(shift, theta.log_entry(i));
  }
  if (shift == kNegInf) {
    throw DegenerateUpdateError(
        "prior support is disjoint from the likelihood support");
  }

  std::vector<double> prod(m, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (x[i] > 0.0) {
      prod[i] = x[i] * std::exp(theta.log_entry(i) - shift);
      total += prod[i];
    }
  }
  if (!(total > 0.0)) {
    throw DegenerateUpdateError(
        "prior support is disjoint from the likelihood support");
  }
  for (double& v : prod) v /= total;
  return ProbVec(x.dim(), std::move(prod));
}

BernoulliPair marginal(const ProbVec& y, int j) {
  const int d = y.dim();
  if (j < 1 || j > d) {
    throw std::invalid_argument("marginal: node index out of range");
  }
  const std::uint32_t bit = 1u << (d - j);
  double on = 0.0, off = 0.0;
  for (std::size_t mask = 0; mask < y.size(); ++mask) {
    if (mask & bit) {
      on += y[mask];
    } else {
      off += y[mask];
    }
  }
  const double total = on + off;
  return BernoulliPair(on / total, off / total);
}

ProbVec tensor_product(const std::vector<BernoulliPair>& pairs) {
  if (pairs.empty()) {
    throw std::invalid_argument("tensor_product: at least one factor required");
  }
  const int d = static_cast<int>(pairs.size());
  config_count(d);  // range check
  std::vector<double> acc{1.0};
  for (const BernoulliPair& p : pairs) {
    std::vector<double> next(acc.size() * 2);
    for (std::size_t k = 0; k < acc.size(); ++k) {
      next[(k << 1) | 1u] = acc[k] * p.p1;
      next[k << 1] = acc[k] * p.p0;
    }
    acc = std::move(next);
  }
  return ProbVec(d, std::move(acc));
}

double dist_to_anchor(const ProbVec& x) {
  return 2.0 * (1.0 - x.anchor_mass());
}

double l1_distance(const ProbVec& a, const ProbVec& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("l1_distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double max_off_anchor(const WeightVec& theta) {
  return std::exp(log_max_off_anchor(theta));
}

double log_max_off_anchor(const WeightVec& theta) {
  double best = kNegInf;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    best = std::max(best, theta.log_entry(i));
  }
  return best;
}

WeightVec flatten_tail(const WeightVec& theta, double kappa) {
  if (!(kappa >= 0.0) || kappa > 1.0) {
    throw std::invalid_argument("flatten_tail: kappa must be in [0, 1]");
  }
  const double log_tail =
      kappa > 0.0 ? log_max_off_anchor(theta) + std::log(kappa) : kNegInf;
  std::vector<double> logs(theta.size(), log_tail);
  logs.back() = 0.0;
  return WeightVec(theta.dim(), std::move(logs));
}

WeightVec pointwise_product(const WeightVec& a, const WeightVec& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("pointwise_product: dimension mismatch");
  }
  std::vector<double> logs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    logs[i] = a.log_entry(i) + b.log_entry(i);
  }
  return WeightVec(a.dim(), std::move(logs));
}

}  // namespace irf
