#pragma once

#include "boostsmooth/types.hpp"

namespace boostsmooth {

/// Natural cubic spline machinery on strictly increasing knots, in the
/// value/second-derivative parameterization: a natural spline is determined
/// by its knot values g, and its interior second derivatives are
/// gamma = R^{-1} Q^t g.
class NaturalCubicSpline {
public:
  /// Throws DegenerateDesignError unless knots are strictly increasing and
  /// there are at least three of them.
  explicit NaturalCubicSpline(Vector knots);

  std::size_t size() const { return static_cast<std::size_t>(knots_.size()); }
  const Vector& knots() const { return knots_; }

  /// Roughness penalty matrix Omega with g^t Omega g = integral of g''^2.
  Matrix penalty() const;

  /// Hat matrix of the penalized fit, (I + lambda * Omega)^{-1}, computed
  /// through the banded (n-2)x(n-2) system so that very large lambda stays
  /// well conditioned.
  Matrix smoothing_matrix(double lambda) const;

  /// Row vector e(x) with spline(x) = e(x) . g for every knot-value vector
  /// g. Linear extrapolation outside the knot range.
  Vector interpolation_weights(double x) const;

private:
  Vector knots_;
  Vector gaps_;
  Matrix q_;          // n x (n-2)
  Matrix r_;          // (n-2) x (n-2), symmetric tridiagonal
  Matrix gamma_op_;   // n x n; rows 0 and n-1 are zero (natural ends)
};

}  // namespace boostsmooth
