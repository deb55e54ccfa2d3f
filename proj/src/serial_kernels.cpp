#include "boostsmooth/dense_kernels.hpp"
#include "boostsmooth/kernels.hpp"

#include <algorithm>
#include <numeric>

namespace boostsmooth {

std::vector<std::size_t> nearest_indices(const Vector& design, double q, std::size_t neighbors) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(design.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto closer = [&](std::size_t a, std::size_t b) {
    const double da = std::abs(design(static_cast<Eigen::Index>(a)) - q);
    const double db = std::abs(design(static_cast<Eigen::Index>(b)) - q);
    return da < db || (da == db && a < b);
  };
  const std::size_t k = std::min(neighbors, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
  idx.resize(k);
  return idx;
}

namespace serial {

Matrix kernel_gram(const Vector& queries, const Vector& design, const KernelSpec& spec) {
  Matrix g(queries.size(), design.size());
  for (Eigen::Index i = 0; i < queries.size(); ++i) {
    for (Eigen::Index j = 0; j < design.size(); ++j) {
      g(i, j) = scaled_kernel(spec, queries(i) - design(j));
    }
  }
  return g;
}

void normalize_rows(Matrix& weights) {
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < weights.cols(); ++j) sum += weights(i, j);
    if (!(sum > 0.0)) {
      throw KernelSupportError("kernel weights vanish at query row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < weights.cols(); ++j) weights(i, j) /= sum;
  }
}

void matvec(const Matrix& a, const Vector& x, Vector& out) {
  out.resize(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += a(i, j) * x(j);
    out(i) = acc;
  }
}

Matrix knn_weights(const Vector& queries, const Vector& design, std::size_t neighbors) {
  Matrix w = Matrix::Zero(queries.size(), design.size());
  for (Eigen::Index i = 0; i < queries.size(); ++i) {
    const auto nn = nearest_indices(design, queries(i), neighbors);
    for (std::size_t j : nn) {
      w(i, static_cast<Eigen::Index>(j)) = 1.0 / static_cast<double>(nn.size());
    }
  }
  return w;
}

}  // namespace serial
}  // namespace boostsmooth
