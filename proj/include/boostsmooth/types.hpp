#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace boostsmooth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error hierarchy. InputError covers malformed user data (CLI exit 2),
// NumericalError covers construction / numerical failures (CLI exit 3).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class KernelSupportError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DegenerateDesignError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotApplicableError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class TraceUnavailableError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DegenerateCriterionError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Univariate regression sample. Both vectors have the same length n >= 3
/// and only finite entries.
class DesignSample {
public:
  DesignSample(Vector x, Vector y);

  const Vector& x() const { return x_; }
  const Vector& y() const { return y_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.size()); }

  /// Sample restricted to the given row indices (in the given order).
  DesignSample subset(const std::vector<std::size_t>& rows) const;

private:
  Vector x_;
  Vector y_;
};

enum class KernelFamily { gaussian, epanechnikov, uniform, triangular };

struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double bandwidth = 0.2;
};

struct KernelSmoothing {
  KernelSpec kernel;
};

struct NearestNeighbors {
  std::size_t neighbors = 10;
};

struct SmoothingSpline {
  double lambda = 0.2;
};

struct BinSmoothing {
  std::size_t num_bins = 5;
};

/// Which linear smoother to build and its single tuning parameter.
using SmootherSpec =
    std::variant<KernelSmoothing, NearestNeighbors, SmoothingSpline, BinSmoothing>;

enum class SmootherKind { kernel, knn, spline, bin };

SmootherKind kind_of(const SmootherSpec& spec);

/// Throws InputError when the spec is invalid, or invalid for n samples.
void validate(const SmootherSpec& spec, std::size_t n);

std::string to_string(KernelFamily family);
std::string to_string(SmootherKind kind);
KernelFamily parse_kernel_family(const std::string& name);
SmootherKind parse_smoother_kind(const std::string& name);

/// Short human-readable description, e.g. "kernel(gaussian,h=0.2)".
std::string describe(const SmootherSpec& spec);

}  // namespace boostsmooth
