#include "boostsmooth/types.hpp"

#include <cmath>
#include <sstream>

namespace boostsmooth {

DesignSample::DesignSample(Vector x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) {
    throw InputError("x and y must have the same length");
  }
  if (x_.size() < 3) {
    throw InputError("a sample needs at least 3 observations");
  }
  if (!x_.allFinite() || !y_.allFinite()) {
    throw InputError("sample contains non-finite values");
  }
}

DesignSample DesignSample::subset(const std::vector<std::size_t>& rows) const {
  Vector xs(static_cast<Eigen::Index>(rows.size()));
  Vector ys(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    xs(static_cast<Eigen::Index>(r)) = x_(static_cast<Eigen::Index>(rows[r]));
    ys(static_cast<Eigen::Index>(r)) = y_(static_cast<Eigen::Index>(rows[r]));
  }
  return DesignSample(std::move(xs), std::move(ys));
}

SmootherKind kind_of(const SmootherSpec& spec) {
  return static_cast<SmootherKind>(spec.index());
}

void validate(const SmootherSpec& spec, std::size_t n) {
  if (const auto* k = std::get_if<KernelSmoothing>(&spec)) {
    if (!(k->kernel.bandwidth > 0.0) || !std::isfinite(k->kernel.bandwidth)) {
      throw InputError("kernel bandwidth must be positive and finite");
    }
  } else if (const auto* nn = std::get_if<NearestNeighbors>(&spec)) {
    if (nn->neighbors < 1 || nn->neighbors > n) {
      throw InputError("knn neighbors must satisfy 1 <= K <= n");
    }
  } else if (const auto* s = std::get_if<SmoothingSpline>(&spec)) {
    if (!(s->lambda > 0.0) || !std::isfinite(s->lambda)) {
      throw InputError("spline lambda must be positive and finite");
    }
  } else if (const auto* b = std::get_if<BinSmoothing>(&spec)) {
    if (b->num_bins < 1 || b->num_bins > n) {
      throw InputError("bin count must satisfy 1 <= bins <= n");
    }
  }
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::triangular: return "triangular";
  }
  return "?";
}

std::string to_string(SmootherKind kind) {
  switch (kind) {
    case SmootherKind::kernel: return "kernel";
    case SmootherKind::knn: return "knn";
    case SmootherKind::spline: return "spline";
    case SmootherKind::bin: return "bin";
  }
  return "?";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  if (name == "uniform") return KernelFamily::uniform;
  if (name == "triangular") return KernelFamily::triangular;
  throw InputError("unknown kernel family: " + name);
}

SmootherKind parse_smoother_kind(const std::string& name) {
  if (name == "kernel") return SmootherKind::kernel;
  if (name == "knn") return SmootherKind::knn;
  if (name == "spline") return SmootherKind::spline;
  if (name == "bin") return SmootherKind::bin;
  throw InputError("unknown smoother kind: " + name);
}

std::string describe(const SmootherSpec& spec) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, KernelSmoothing>) {
          os << "kernel(" << to_string(s.kernel.family) << ",h=" << s.kernel.bandwidth << ")";
        } else if constexpr (std::is_same_v<T, NearestNeighbors>) {
          os << "knn(K=" << s.neighbors << ")";
        } else if constexpr (std::is_same_v<T, SmoothingSpline>) {
          os << "spline(lambda=" << s.lambda << ")";
        } else {
          os << "bin(bins=" << s.num_bins << ")";
        }
      },
      spec);
  return os.str();
}

}  // namespace boostsmooth
