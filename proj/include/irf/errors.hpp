#pragma once

#include <stdexcept>
#include <string>

namespace irf {

// Bayes update where the prior support and the likelihood support are
// disjoint (x^T theta == 0); no posterior exists.
class DegenerateUpdateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An observation produced a non-finite log likelihood ratio.
class DegenerateObservationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sum-product was asked to run on a graph with a cycle.
class UnsupportedTopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration or allocation would exceed the configured budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The error envelope is undefined for the given starting point.
class BoundUndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irf
