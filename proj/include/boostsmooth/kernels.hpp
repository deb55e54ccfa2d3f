#pragma once

#include "boostsmooth/types.hpp"

namespace boostsmooth {

/// Unscaled kernel K(u). Gaussian has unbounded support, the others vanish
/// outside |u| <= 1.
double kernel_value(KernelFamily family, double u);

/// Scaled kernel K_h(t) = K(t / h) / h.
double scaled_kernel(const KernelSpec& spec, double t);

bool has_compact_support(KernelFamily family);

/// True for families whose Fourier transform is a nonnegative measure
/// (Gaussian, triangular).
bool is_positive_definite(KernelFamily family);

}  // namespace boostsmooth
