#pragma once

#include <stdexcept>
#include <string>

namespace bvreduce {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in polynomial rings with different variable counts.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed action, observable or problem description.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A per-weight slice of (id - delta*eta) is singular: the action is not
/// generic enough for the chosen homotopy at this weight.
class NotGenericAtWeight : public Error {
 public:
  explicit NotGenericAtWeight(int weight, int degree = 0)
      : Error("not generic at weight " + std::to_string(weight) +
              " (homological degree " + std::to_string(degree) + ")"),
        weight_(weight),
        degree_(degree) {}

  int weight() const noexcept { return weight_; }
  int degree() const noexcept { return degree_; }

 private:
  int weight_;
  int degree_;
};

/// Some diagonal coefficient a_i of the top part vanishes.
class NonDiagonalizableAction : public Error {
 public:
  using Error::Error;
};

/// A Neumann series declared nilpotent failed to terminate.
class NonTerminating : public Error {
 public:
  using Error::Error;
};

/// A square matrix that had to be inverted is singular.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// A contour end ray does not reach the decay region of e^s.
class NotAllowable : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its panel budget.
class ToleranceNotReached : public Error {
 public:
  using Error::Error;
};

}  // namespace bvreduce
