#pragma once

#include "boostsmooth/boost.hpp"

#include <array>
#include <optional>

namespace boostsmooth {

enum class Convergence { convergent, divergent, boundary };

std::string to_string(Convergence c);

/// Three design points whose 3x3 principal minor of the kernel Gram matrix
/// is negative, proving the Gram matrix is not positive semidefinite.
struct MinorWitness {
  std::array<std::size_t, 3> indices{};  // ordered by increasing x
  double determinant = 0.0;
};

struct SpectrumReport {
  double mu = 1.0;
  BoostVariant variant = BoostVariant::plain;
  /// Singular values of I - mu S_eff, descending.
  Vector singular_values;
  /// Eigenvalues of the symmetric equivalent of S_eff (A = D^1/2 K D^1/2 for
  /// kernels, S for splines and bins, S S^t when symmetrized), descending.
  std::optional<Vector> symmetric_equivalent_eigenvalues;
  double max_singular = 0.0;
  /// max |eigenvalue| of I - mu S_eff; governs the long-run dynamics.
  double spectral_radius = 0.0;
  Convergence classification = Convergence::boundary;
  std::optional<MinorWitness> witness;
};

/// Tolerance on |rho - 1| for the boundary class.
inline constexpr double kBoundaryTolerance = 1e-8;

/// divergent if rho > 1 + tol, boundary if |rho - 1| <= tol, else convergent.
Convergence classify(double spectral_radius);

SpectrumReport analyze(const LinearSmoother& smoother, double mu = 1.0,
                       BoostVariant variant = BoostVariant::plain);

/// det of the Gram matrix [K_h(x_a - x_b)] over three points.
double minor_determinant(const KernelSpec& kernel, double x1, double x2, double x3);

/// Scans triples (in increasing-x order) for a negative 3x3 principal
/// minor. Throws NotApplicableError for positive definite families.
std::optional<MinorWitness> principal_minor_witness(const DesignSample& sample,
                                                    const KernelSpec& kernel);

}  // namespace boostsmooth
