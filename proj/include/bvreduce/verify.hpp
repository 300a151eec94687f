#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bvreduce/reduce.hpp"

namespace bvreduce {

struct VerifyConfig {
  int n = 2;
  int d = 3;
  /// Largest x-degree of random observables (and of g in xi g).
  int maxdeg = 4;
  int trials = 10;
  std::uint64_t seed = 0;
  int height = 5;
  /// Passed to ReduceOptions::homotopy_sign.
  int homotopy_sign = 1;
  int threads = 0;
};

struct VerifyFailure {
  int trial = 0;
  std::string invariant;
  std::string action;
  /// Minimised input that still violates the invariant.
  std::string input;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  int trials = 0;
  long checks = 0;
  int non_generic = 0;
  std::vector<VerifyFailure> failures;

  bool ok() const noexcept { return failures.empty(); }
};

/// Randomised invariant suite: exactness of the quantum and classical
/// projections, section property, Wick agreement on a quadratic action and
/// the dimension count of the Jacobian ring.  Trials are independent and
/// reproducible from (seed, trial index).
VerifyReport run_verify(const VerifyConfig& config);

/// Greedily drops terms of v while pred(v) stays true.
SuperPoly minimize_terms(const SuperPoly& v, const std::function<bool(const SuperPoly&)>& pred);

}  // namespace bvreduce
