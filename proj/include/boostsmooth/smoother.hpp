#pragma once

#include "boostsmooth/natural_spline.hpp"
#include "boostsmooth/types.hpp"

#include <memory>
#include <optional>

namespace boostsmooth {

/// S = diag(scale) * sym * diag(scale)^{-1} with `sym` symmetric. Exists for
/// kernel smoothers (sym = D^{1/2} K D^{1/2}), splines and bin smoothers
/// (scale = 1). Used for eigen-based traces and closed forms.
struct SymmetricForm {
  Matrix sym;
  Vector scale;
};

/// An explicit n x n smoothing matrix together with the rule producing the
/// weight vector S(x) at arbitrary query points. Immutable after
/// construction.
class LinearSmoother {
public:
  const DesignSample& sample() const { return sample_; }
  const SmootherSpec& spec() const { return spec_; }
  SmootherKind kind() const { return kind_of(spec_); }
  const Matrix& matrix() const { return matrix_; }
  std::size_t size() const { return sample_.size(); }

  const std::optional<SymmetricForm>& symmetric_form() const { return symmetric_; }

  /// Kernel Gram matrix K(i, j) = K_h(X_i - X_j); kernel smoothers only.
  const std::optional<Matrix>& gram() const { return gram_; }

  /// Length-n weights S(x); at x = X_i this reproduces row i of S.
  Vector weights_at(double x) const;

  /// Rows are weights_at(queries(q)).
  Matrix weights_at(const Vector& queries) const;

private:
  friend LinearSmoother build_smoother(const DesignSample&, const SmootherSpec&);

  LinearSmoother(DesignSample sample, SmootherSpec spec)
      : sample_(std::move(sample)), spec_(std::move(spec)) {}

  DesignSample sample_;
  SmootherSpec spec_;
  Matrix matrix_;
  std::optional<SymmetricForm> symmetric_;
  std::optional<Matrix> gram_;

  // spline: knots in sorted order, order_[r] = original index of rank r
  std::shared_ptr<const NaturalCubicSpline> spline_;
  std::vector<std::size_t> order_;
  // bin: bin id per original index, and upper cut points between bins
  std::vector<std::size_t> bin_of_;
  std::vector<double> bin_cuts_;
};

/// Builds the smoothing matrix for `spec` on `sample`.
/// Throws InputError for invalid specs, KernelSupportError when a kernel row
/// has no support, DegenerateDesignError for duplicate x with splines.
LinearSmoother build_smoother(const DesignSample& sample, const SmootherSpec& spec);

}  // namespace boostsmooth
