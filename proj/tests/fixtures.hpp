#pragma once

#include "boostsmooth/simulation.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace fixtures {

using boostsmooth::DesignSample;
using boostsmooth::Vector;

// x ~ U[0,1], y = sin(5 pi x) + N(0, sd^2).
inline DesignSample uniform_sample(std::size_t n, std::uint64_t seed, double sd = 0.4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> e(0.0, sd);
  Vector x(static_cast<Eigen::Index>(n));
  Vector y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x(i) = u(rng);
    y(i) = std::sin(5.0 * std::numbers::pi * x(i)) + e(rng);
  }
  return DesignSample(x, y);
}

inline Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> e(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = e(rng);
  return v;
}

inline double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace fixtures
