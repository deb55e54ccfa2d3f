#include "boostsmooth/natural_spline.hpp"

#include <algorithm>

namespace boostsmooth {

NaturalCubicSpline::NaturalCubicSpline(Vector knots) : knots_(std::move(knots)) {
  const Eigen::Index n = knots_.size();
  if (n < 3) {
    throw DegenerateDesignError("natural cubic spline needs at least 3 distinct knots");
  }
  gaps_ = knots_.tail(n - 1) - knots_.head(n - 1);
  if ((gaps_.array() <= 0.0).any()) {
    throw DegenerateDesignError("spline knots must be strictly increasing (duplicate x values?)");
  }

  const Eigen::Index m = n - 2;
  q_ = Matrix::Zero(n, m);
  r_ = Matrix::Zero(m, m);
  for (Eigen::Index j = 1; j <= m; ++j) {
    const double hl = gaps_(j - 1);
    const double hr = gaps_(j);
    q_(j - 1, j - 1) = 1.0 / hl;
    q_(j, j - 1) = -1.0 / hl - 1.0 / hr;
    q_(j + 1, j - 1) = 1.0 / hr;
    r_(j - 1, j - 1) = (hl + hr) / 3.0;
    if (j < m) {
      r_(j - 1, j) = hr / 6.0;
      r_(j, j - 1) = hr / 6.0;
    }
  }

  gamma_op_ = Matrix::Zero(n, n);
  gamma_op_.middleRows(1, m) = r_.llt().solve(q_.transpose());
}

Matrix NaturalCubicSpline::penalty() const {
  return q_ * r_.llt().solve(q_.transpose());
}

Matrix NaturalCubicSpline::smoothing_matrix(double lambda) const {
  const Eigen::Index n = knots_.size();
  const Matrix system = r_ + lambda * q_.transpose() * q_;
  Matrix s = Matrix::Identity(n, n) - lambda * q_ * system.llt().solve(q_.transpose());
  return 0.5 * (s + s.transpose());
}

Vector NaturalCubicSpline::interpolation_weights(double x) const {
  const Eigen::Index n = knots_.size();
  Vector e = Vector::Zero(n);
  if (x <= knots_(0)) {
    // g'(t_0) = (g_1 - g_0)/h_0 - h_0 gamma_1 / 6
    const double h = gaps_(0);
    Vector slope = -h / 6.0 * gamma_op_.row(1).transpose();
    slope(0) -= 1.0 / h;
    slope(1) += 1.0 / h;
    e(0) = 1.0;
    return e + (x - knots_(0)) * slope;
  }
  if (x >= knots_(n - 1)) {
    const double h = gaps_(n - 2);
    Vector slope = h / 6.0 * gamma_op_.row(n - 2).transpose();
    slope(n - 2) -= 1.0 / h;
    slope(n - 1) += 1.0 / h;
    e(n - 1) = 1.0;
    return e + (x - knots_(n - 1)) * slope;
  }
  const auto* begin = knots_.data();
  const auto* it = std::upper_bound(begin, begin + n, x);
  Eigen::Index i = std::max<Eigen::Index>(0, (it - begin) - 1);
  i = std::min<Eigen::Index>(i, n - 2);
  const double h = gaps_(i);
  const double a = x - knots_(i);
  const double b = knots_(i + 1) - x;
  if (a == 0.0) {
    e(i) = 1.0;
    return e;
  }
  e(i) += b / h;
  e(i + 1) += a / h;
  e -= a * b / 6.0 *
       ((1.0 + a / h) * gamma_op_.row(i + 1).transpose() +
        (1.0 + b / h) * gamma_op_.row(i).transpose());
  return e;
}

}  // namespace boostsmooth
