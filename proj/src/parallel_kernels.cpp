#include "boostsmooth/dense_kernels.hpp"
#include "boostsmooth/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace boostsmooth::par {

namespace {
// Below this many matrix entries the fork/join cost dominates.
constexpr Eigen::Index kParallelEntries = 64 * 64;
}  // namespace

Matrix kernel_gram(const Vector& queries, const Vector& design, const KernelSpec& spec) {
  const Eigen::Index rows = queries.size();
  const Eigen::Index cols = design.size();
  Matrix g(rows, cols);
  // column-major: parallelize over columns so each thread writes contiguously
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelEntries)
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double xj = design(j);
    for (Eigen::Index i = 0; i < rows; ++i) {
      g(i, j) = scaled_kernel(spec, queries(i) - xj);
    }
  }
  return g;
}

void normalize_rows(Matrix& weights) {
  const Vector sums = weights.rowwise().sum();
  if ((sums.array() <= 0.0).any() || !sums.allFinite()) {
    Eigen::Index bad = 0;
    (sums.array() <= 0.0).maxCoeff(&bad);
    throw KernelSupportError("kernel weights vanish at query row " + std::to_string(bad));
  }
  const Vector inv = sums.cwiseInverse();
#pragma omp parallel for schedule(static) if (weights.size() >= kParallelEntries)
  for (Eigen::Index j = 0; j < weights.cols(); ++j) {
    weights.col(j).array() *= inv.array();
  }
}

void matvec(const Matrix& a, const Vector& x, Vector& out) {
  out.resize(a.rows());
  if (a.size() < kParallelEntries || omp_get_max_threads() == 1) {
    out.noalias() = a * x;
    return;
  }
#pragma omp parallel
  {
    const int nt = omp_get_num_threads();
    const int t = omp_get_thread_num();
    const Eigen::Index chunk = (a.rows() + nt - 1) / nt;
    const Eigen::Index begin = std::min<Eigen::Index>(a.rows(), chunk * t);
    const Eigen::Index len = std::min<Eigen::Index>(a.rows() - begin, chunk);
    if (len > 0) {
      out.segment(begin, len).noalias() = a.middleRows(begin, len) * x;
    }
  }
}

Matrix knn_weights(const Vector& queries, const Vector& design, std::size_t neighbors) {
  Matrix w = Matrix::Zero(queries.size(), design.size());
#pragma omp parallel for schedule(static) if (queries.size() * design.size() >= kParallelEntries)
  for (Eigen::Index i = 0; i < queries.size(); ++i) {
    const auto nn = nearest_indices(design, queries(i), neighbors);
    for (std::size_t j : nn) {
      w(i, static_cast<Eigen::Index>(j)) = 1.0 / static_cast<double>(nn.size());
    }
  }
  return w;
}

}  // namespace boostsmooth::par
