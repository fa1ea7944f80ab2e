#pragma once

#include <iosfwd>
#include <span>

#include "irf/engine.hpp"
#include "irf/linalg.hpp"
#include "irf/network.hpp"
#include "irf/simplex.hpp"

namespace irf {

// The exact prior-predict step w_n = K y_{n-1}, a Markov transition kernel
// on P_d (columns sum to 1, the anchor column is the anchor point). Stored
// by configuration mask: entry(row, col) multiplies y[col] in w[row].
class ExactPredictKernel {
 public:
  // Row `mask` is the expansion of the noncommutative product over node
  // positions: a changed node (bit 1) contributes (w1 + rho_j w0), an
  // unchanged node contributes rhobar_j w0; each resulting digit string is
  // the column mask of its coefficient.
  static ExactPredictKernel build(std::span<const double> rhos);

  int dim() const { return d_; }
  std::size_t size() const { return std::size_t{1} << d_; }
  double at(std::uint32_t row_mask, std::uint32_t col_mask) const {
    return matrix_(row_mask, col_mask);
  }
  const Matrix& matrix() const { return matrix_; }

  ProbVec apply(const ProbVec& y) const;

  // Rows and columns written with mask m-1 first (display order).
  void write_csv(std::ostream& os) const;

 private:
  ExactPredictKernel(int d, Matrix matrix) : d_(d), matrix_(std::move(matrix)) {}
  int d_;
  Matrix matrix_;
};

// One step of the exact algorithm: bayes_update(kernel * y, theta).
ProbVec exact_step(const ProbVec& y, const WeightVec& theta,
                   const ExactPredictKernel& kernel);

// Posterior of the change indicators after n frames, by direct enumeration
// of per-node change times over {1..n} plus a "later than n" sentinel that
// carries the tail prior mass and a single representative likelihood.
// Independent of the kernel recursion; this is the oracle it is checked
// against. Budget-guarded: (n+1)^d must stay small.
ProbVec enumerated_posterior(const Network& net,
                             std::span<const ObservationFrame> frames);

// Upper bound on the l1 Lipschitz constant of the restriction to P_d of
// the linear map A: the maximum absolute column sum of A - u 1^T.
double jacobian_lipschitz_bound(const Matrix& a, const std::vector<double>& u);

// 1 - prod rho_j; the kernel's Lipschitz constant (sharp).
double exact_predict_lipschitz_bound(std::span<const double> rhos);

IrfOperator exact_predict_operator(const ExactPredictKernel& kernel);

}  // namespace irf
