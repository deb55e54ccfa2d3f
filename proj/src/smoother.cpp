#include "boostsmooth/smoother.hpp"

#include "boostsmooth/dense_kernels.hpp"
#include "boostsmooth/kernels.hpp"

#include <algorithm>
#include <numeric>

namespace boostsmooth {

namespace {

std::vector<std::size_t> sorted_order(const Vector& x) {
  std::vector<std::size_t> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x(static_cast<Eigen::Index>(a)) < x(static_cast<Eigen::Index>(b));
  });
  return order;
}

}  // namespace

LinearSmoother build_smoother(const DesignSample& sample, const SmootherSpec& spec) {
  const std::size_t n = sample.size();
  validate(spec, n);
  LinearSmoother sm(sample, spec);
  const Vector& x = sample.x();
  const auto ni = static_cast<Eigen::Index>(n);

  switch (kind_of(spec)) {
    case SmootherKind::kernel: {
      const auto& kspec = std::get<KernelSmoothing>(spec).kernel;
      Matrix gram = par::kernel_gram(x, x, kspec);
      const Vector row_sums = gram.rowwise().sum();
      if ((row_sums.array() <= 0.0).any()) {
        throw KernelSupportError("kernel smoothing matrix has a row with zero total weight");
      }
      sm.matrix_ = gram;
      par::normalize_rows(sm.matrix_);
      const Vector root_d = row_sums.cwiseInverse().cwiseSqrt();
      Matrix a = root_d.asDiagonal() * gram * root_d.asDiagonal();
      a = 0.5 * (a + a.transpose());
      sm.symmetric_ = SymmetricForm{std::move(a), root_d};
      sm.gram_ = std::move(gram);
      break;
    }
    case SmootherKind::knn: {
      const auto k = std::get<NearestNeighbors>(spec).neighbors;
      sm.matrix_ = par::knn_weights(x, x, k);
      break;
    }
    case SmootherKind::spline: {
      const double lambda = std::get<SmoothingSpline>(spec).lambda;
      sm.order_ = sorted_order(x);
      Vector knots(ni);
      for (Eigen::Index r = 0; r < ni; ++r) knots(r) = x(static_cast<Eigen::Index>(sm.order_[r]));
      sm.spline_ = std::make_shared<const NaturalCubicSpline>(std::move(knots));
      const Matrix sorted = sm.spline_->smoothing_matrix(lambda);
      sm.matrix_.resize(ni, ni);
      for (Eigen::Index a = 0; a < ni; ++a) {
        for (Eigen::Index b = 0; b < ni; ++b) {
          sm.matrix_(static_cast<Eigen::Index>(sm.order_[a]),
                     static_cast<Eigen::Index>(sm.order_[b])) = sorted(a, b);
        }
      }
      sm.symmetric_ = SymmetricForm{sm.matrix_, Vector::Ones(ni)};
      break;
    }
    case SmootherKind::bin: {
      const auto bins = std::get<BinSmoothing>(spec).num_bins;
      const auto order = sorted_order(x);
      sm.bin_of_.assign(n, 0);
      std::vector<std::size_t> bin_size(bins, 0);
      for (std::size_t r = 0; r < n; ++r) {
        const std::size_t b = r * bins / n;
        sm.bin_of_[order[r]] = b;
        ++bin_size[b];
      }
      for (std::size_t b = 0; b + 1 < bins; ++b) {
        const std::size_t last = (b + 1) * n / bins;  // first rank of bin b+1
        const double lo = x(static_cast<Eigen::Index>(order[last - 1]));
        const double hi = x(static_cast<Eigen::Index>(order[last]));
        sm.bin_cuts_.push_back(0.5 * (lo + hi));
      }
      sm.matrix_ = Matrix::Zero(ni, ni);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (sm.bin_of_[i] == sm.bin_of_[j]) {
            sm.matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                1.0 / static_cast<double>(bin_size[sm.bin_of_[i]]);
          }
        }
      }
      sm.symmetric_ = SymmetricForm{sm.matrix_, Vector::Ones(ni)};
      break;
    }
  }
  return sm;
}

Vector LinearSmoother::weights_at(double q) const {
  const Vector& x = sample_.x();
  const Eigen::Index n = x.size();
  switch (kind()) {
    case SmootherKind::kernel: {
      const auto& kspec = std::get<KernelSmoothing>(spec_).kernel;
      Vector w(n);
      for (Eigen::Index j = 0; j < n; ++j) w(j) = scaled_kernel(kspec, q - x(j));
      const double total = w.sum();
      if (!(total > 0.0)) {
        throw KernelSupportError("no design point within kernel support of x = " +
                                 std::to_string(q));
      }
      return w / total;
    }
    case SmootherKind::knn: {
      const auto k = std::get<NearestNeighbors>(spec_).neighbors;
      Vector w = Vector::Zero(n);
      for (std::size_t j : nearest_indices(x, q, k)) {
        w(static_cast<Eigen::Index>(j)) = 1.0 / static_cast<double>(k);
      }
      return w;
    }
    case SmootherKind::spline: {
      const Vector sorted = spline_->interpolation_weights(q);
      Vector e(n);
      for (Eigen::Index r = 0; r < n; ++r) e(static_cast<Eigen::Index>(order_[r])) = sorted(r);
      // spline(q) through the fitted knot values S beta
      return matrix_.transpose() * e;
    }
    case SmootherKind::bin: {
      const auto it = std::upper_bound(bin_cuts_.begin(), bin_cuts_.end(), q);
      const auto b = static_cast<std::size_t>(it - bin_cuts_.begin());
      Vector w = Vector::Zero(n);
      double count = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (bin_of_[static_cast<std::size_t>(j)] == b) {
          w(j) = 1.0;
          count += 1.0;
        }
      }
      return w / count;
    }
  }
  return Vector::Zero(n);
}

Matrix LinearSmoother::weights_at(const Vector& queries) const {
  if (kind() == SmootherKind::kernel) {
    Matrix w = par::kernel_gram(queries, sample_.x(), std::get<KernelSmoothing>(spec_).kernel);
    par::normalize_rows(w);
    return w;
  }
  if (kind() == SmootherKind::knn) {
    return par::knn_weights(queries, sample_.x(), std::get<NearestNeighbors>(spec_).neighbors);
  }
  Matrix w(queries.size(), static_cast<Eigen::Index>(size()));
  for (Eigen::Index q = 0; q < queries.size(); ++q) w.row(q) = weights_at(queries(q)).transpose();
  return w;
}

}  // namespace boostsmooth
