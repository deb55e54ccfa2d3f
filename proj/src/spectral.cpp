#include "boostsmooth/spectral.hpp"

#include "boostsmooth/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <numeric>

namespace boostsmooth {

std::string to_string(Convergence c) {
  switch (c) {
    case Convergence::convergent: return "convergent";
    case Convergence::divergent: return "divergent";
    case Convergence::boundary: return "boundary";
  }
  return "?";
}

Convergence classify(double spectral_radius) {
  if (spectral_radius > 1.0 + kBoundaryTolerance) return Convergence::divergent;
  if (spectral_radius >= 1.0 - kBoundaryTolerance) return Convergence::boundary;
  return Convergence::convergent;
}

SpectrumReport analyze(const LinearSmoother& smoother, double mu, BoostVariant variant) {
  if (!(mu > 0.0 && mu <= 1.0)) throw InputError("mu must lie in (0, 1]");
  const BoostOperator op(smoother, mu, variant, true);
  const Eigen::Index n = static_cast<Eigen::Index>(op.size());
  const Matrix residual_op = Matrix::Identity(n, n) - op.effective_matrix();

  SpectrumReport rep;
  rep.mu = mu;
  rep.variant = variant;
  Eigen::BDCSVD<Matrix> svd(residual_op);
  rep.singular_values = svd.singularValues();  // already descending
  rep.max_singular = rep.singular_values(0);

  if (const auto& basis = op.basis()) {
    Vector ev = basis->values.reverse();  // solver returns ascending
    rep.spectral_radius = (1.0 - mu * ev.array()).abs().maxCoeff();
    rep.symmetric_equivalent_eigenvalues = std::move(ev);
  } else {
    Eigen::EigenSolver<Matrix> es(residual_op, false);
    rep.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  }
  rep.classification = classify(rep.spectral_radius);

  if (const auto* ks = std::get_if<KernelSmoothing>(&smoother.spec());
      ks != nullptr && !is_positive_definite(ks->kernel.family)) {
    rep.witness = principal_minor_witness(smoother.sample(), ks->kernel);
  }
  return rep;
}

double minor_determinant(const KernelSpec& kernel, double x1, double x2, double x3) {
  const double k0 = scaled_kernel(kernel, 0.0);
  const double k12 = scaled_kernel(kernel, x2 - x1);
  const double k23 = scaled_kernel(kernel, x3 - x2);
  const double k13 = scaled_kernel(kernel, x3 - x1);
  // cofactor expansion along the first row
  return k0 * (k0 * k0 - k23 * k23) - k12 * (k12 * k0 - k23 * k13) + k13 * (k12 * k23 - k0 * k13);
}

std::optional<MinorWitness> principal_minor_witness(const DesignSample& sample,
                                                    const KernelSpec& kernel) {
  if (is_positive_definite(kernel.family)) {
    throw NotApplicableError(to_string(kernel.family) +
                             " kernel is positive definite; no negative principal minor exists");
  }
  const Vector& x = sample.x();
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x(static_cast<Eigen::Index>(a)) < x(static_cast<Eigen::Index>(b));
  });
  const auto at = [&](std::size_t r) { return x(static_cast<Eigen::Index>(order[r])); };

  // A triple spanning 2h or more has a zero off-diagonal pair and a
  // nonnegative minor, so only tighter triples are scanned.
  const double span = 2.0 * kernel.bandwidth;
  const std::size_t n = order.size();
  for (std::size_t a = 0; a + 2 < n; ++a) {
    for (std::size_t b = a + 1; b + 1 < n && at(b) - at(a) < span; ++b) {
      for (std::size_t c = b + 1; c < n && at(c) - at(a) < span; ++c) {
        const double det = minor_determinant(kernel, at(a), at(b), at(c));
        if (det < 0.0) {
          return MinorWitness{{order[a], order[b], order[c]}, det};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace boostsmooth
