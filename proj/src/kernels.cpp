#include "boostsmooth/kernels.hpp"

#include <cmath>
#include <numbers>

namespace boostsmooth {

double kernel_value(KernelFamily family, double u) {
  const double a = std::abs(u);
  switch (family) {
    case KernelFamily::gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    case KernelFamily::epanechnikov:
      return a <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::uniform:
      return a <= 1.0 ? 0.5 : 0.0;
    case KernelFamily::triangular:
      return a <= 1.0 ? 1.0 - a : 0.0;
  }
  return 0.0;
}

double scaled_kernel(const KernelSpec& spec, double t) {
  return kernel_value(spec.family, t / spec.bandwidth) / spec.bandwidth;
}

bool has_compact_support(KernelFamily family) {
  return family != KernelFamily::gaussian;
}

bool is_positive_definite(KernelFamily family) {
  return family == KernelFamily::gaussian || family == KernelFamily::triangular;
}

}  // namespace boostsmooth
