#include "boostsmooth/boost.hpp"

#include "boostsmooth/dense_kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace boostsmooth {

namespace {

// Non-symmetric smoothers get tr(S_k) by carrying (I - mu S)^k along, which
// is O(n^3) per iteration; past this size the trace is reported missing.
constexpr std::size_t kMaxDenseTraceSize = 200;

}  // namespace

std::string to_string(BoostVariant v) {
  return v == BoostVariant::plain ? "plain" : "symmetrized";
}

BoostVariant parse_variant(const std::string& name) {
  if (name == "plain") return BoostVariant::plain;
  if (name == "symmetrized") return BoostVariant::symmetrized;
  throw InputError("unknown boosting variant: " + name);
}

void validate(const BoostConfig& config) {
  if (!(config.mu > 0.0 && config.mu <= 1.0)) {
    throw InputError("mu must lie in (0, 1]");
  }
  if (config.max_iterations < 1) {
    throw InputError("max_iterations must be at least 1");
  }
  if (!(config.divergence_guard > 0.0)) {
    throw InputError("divergence guard must be positive");
  }
}

std::vector<std::size_t> default_checkpoints(std::size_t max_iterations) {
  std::vector<std::size_t> ks;
  const std::size_t dense = std::min<std::size_t>(max_iterations, 200);
  for (std::size_t k = 1; k <= dense; ++k) ks.push_back(k);
  std::size_t k = dense;
  while (k < max_iterations) {
    const std::size_t next = (11 * k + 9) / 10;  // ceil(1.1 k) without rounding error
    k = std::min(max_iterations, std::max(k + 1, next));
    ks.push_back(k);
  }
  return ks;
}

BoostOperator::BoostOperator(const LinearSmoother& smoother, double mu, BoostVariant variant,
                             bool with_spectrum)
    : smoother_(smoother), mu_(mu), variant_(variant) {
  const Matrix& s = smoother_.matrix();
  if (variant_ == BoostVariant::plain) {
    base_ = s;
  } else {
    base_ = s * s.transpose();
    base_ = 0.5 * (base_ + base_.transpose());
  }
  if (!with_spectrum) return;

  if (variant_ == BoostVariant::symmetrized) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(base_);
    basis_ = SpectralBasis{es.eigenvalues(), es.eigenvectors(),
                           Vector::Ones(static_cast<Eigen::Index>(size()))};
  } else if (const auto& form = smoother_.symmetric_form()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(form->sym);
    basis_ = SpectralBasis{es.eigenvalues(), es.eigenvectors(), form->scale};
  }
}

Vector BoostOperator::weights_at(double x) const {
  Vector w = smoother_.weights_at(x);
  if (variant_ == BoostVariant::symmetrized) {
    w = smoother_.matrix() * w;
  }
  return mu_ * w;
}

Matrix BoostOperator::weights_at(const Vector& queries) const {
  Matrix w = smoother_.weights_at(queries);
  if (variant_ == BoostVariant::symmetrized) {
    w = w * smoother_.matrix().transpose();
  }
  return mu_ * w;
}

std::optional<double> BoostOperator::trace(std::size_t k) const {
  if (!basis_) return std::nullopt;
  const double kk = static_cast<double>(k);
  double t = 0.0;
  for (Eigen::Index j = 0; j < basis_->values.size(); ++j) {
    t += 1.0 - std::pow(1.0 - mu_ * basis_->values(j), kk);
  }
  return t;
}

const Checkpoint* BoostTrajectory::at(std::size_t k) const {
  const auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), k,
                                   [](const Checkpoint& c, std::size_t v) { return c.k < v; });
  if (it == checkpoints.end() || it->k != k) return nullptr;
  return &*it;
}

std::vector<std::size_t> BoostTrajectory::recorded_ks() const {
  std::vector<std::size_t> ks;
  ks.reserve(checkpoints.size());
  for (const auto& c : checkpoints) ks.push_back(c.k);
  return ks;
}

BoostTrajectory run_boost(const LinearSmoother& smoother, const Vector& y,
                          const BoostConfig& config) {
  validate(config);
  const BoostOperator op(smoother, config.mu, config.variant, config.compute_trace);
  return run_boost(op, y, config);
}

BoostTrajectory run_boost(const BoostOperator& op, const Vector& y, const BoostConfig& config) {
  validate(config);
  const std::size_t n = op.size();
  if (static_cast<std::size_t>(y.size()) != n) {
    throw InputError("response length does not match smoother size");
  }

  std::vector<std::size_t> schedule =
      config.checkpoints.empty() ? default_checkpoints(config.max_iterations) : config.checkpoints;
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  std::erase_if(schedule, [&](std::size_t k) { return k < 1 || k > config.max_iterations; });
  if (schedule.empty() || schedule.back() != config.max_iterations) {
    schedule.push_back(config.max_iterations);
  }

  BoostTrajectory traj;
  traj.config = config;
  traj.config.checkpoints = schedule;
  traj.n = n;
  traj.response_norm = y.norm();
  traj.residual_norms.reserve(config.max_iterations);
  traj.bias_norms.reserve(config.max_iterations);

  const Matrix& base = op.base();
  const double mu = op.mu();
  const double limit = config.divergence_guard * traj.response_norm;

  // Dense power accumulation for traces of non-symmetric smoothers.
  const bool dense_trace = config.compute_trace && !op.basis() && n <= kMaxDenseTraceSize;
  Matrix power;
  Matrix step;
  if (dense_trace) {
    step = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) - mu * base;
    power = step;
  }

  Vector beta = y;
  Vector smoothed;
  par::matvec(base, y, smoothed);
  Vector fitted = mu * smoothed;
  Vector residual(static_cast<Eigen::Index>(n));
  Vector bias(static_cast<Eigen::Index>(n));
  auto next_cp = schedule.begin();

  for (std::size_t k = 1;; ++k) {
    residual = y - fitted;
    const double rnorm = residual.norm();
    if (!std::isfinite(rnorm) || rnorm > limit) {
      traj.diverged = true;
      traj.diverged_at = k;
      break;
    }
    par::matvec(base, residual, bias);
    traj.residual_norms.push_back(rnorm);
    traj.bias_norms.push_back(bias.norm());
    traj.last_completed_k = k;

    if (next_cp != schedule.end() && *next_cp == k) {
      Checkpoint cp;
      cp.k = k;
      cp.beta = beta;
      cp.fitted = fitted;
      cp.residual_norm = rnorm;
      cp.bias_norm = traj.bias_norms.back();
      if (config.compute_trace) {
        if (dense_trace) {
          cp.trace = static_cast<double>(n) - power.trace();
        } else {
          cp.trace = op.trace(k);
        }
      }
      traj.checkpoints.push_back(std::move(cp));
      ++next_cp;
    }
    if (k == config.max_iterations) break;

    beta += residual;
    fitted += mu * bias;
    if (dense_trace) power = step * power;
  }
  return traj;
}

Matrix residual_operator_power(const Matrix& effective, std::size_t k) {
  const Eigen::Index n = effective.rows();
  Matrix result = Matrix::Identity(n, n);
  Matrix factor = Matrix::Identity(n, n) - effective;
  while (k > 0) {
    if (k & 1U) result = result * factor;
    k >>= 1U;
    if (k > 0) factor = factor * factor;
  }
  return result;
}

Vector closed_form_fit(const LinearSmoother& smoother, const Vector& y, std::size_t k, double mu,
                       BoostVariant variant, ClosedFormMethod method) {
  if (k < 1) throw InputError("k must be at least 1");
  if (static_cast<Eigen::Index>(smoother.size()) != y.size()) {
    throw InputError("response length does not match smoother size");
  }
  const bool want_eigen = method != ClosedFormMethod::powers;
  const BoostOperator op(smoother, mu, variant, want_eigen);

  if (want_eigen && op.basis()) {
    // Eigen form: scale * P diag(1 - (1 - mu lambda)^k) P^t * scale^{-1} y
    const auto& b = *op.basis();
    const double kk = static_cast<double>(k);
    Vector gain(b.values.size());
    for (Eigen::Index j = 0; j < gain.size(); ++j) {
      gain(j) = 1.0 - std::pow(1.0 - mu * b.values(j), kk);
    }
    const Vector z = b.vectors.transpose() * y.cwiseQuotient(b.scale);
    return b.scale.cwiseProduct(b.vectors * gain.cwiseProduct(z));
  }
  if (method == ClosedFormMethod::eigen) {
    throw NotApplicableError("smoother has no symmetric form for the eigen closed form");
  }
  // (I - mu S)^k y by k products, then subtract from y.
  const Matrix eff = op.effective_matrix();
  Vector r = y;
  Vector tmp;
  for (std::size_t i = 0; i < k; ++i) {
    serial::matvec(eff, r, tmp);
    r -= tmp;
  }
  return y - r;
}

double predict_at(const BoostTrajectory& trajectory, const BoostOperator& op, double x,
                  std::size_t k) {
  const Checkpoint* cp = trajectory.at(k);
  if (cp == nullptr) {
    throw InputError("iteration " + std::to_string(k) + " was not recorded");
  }
  return op.weights_at(x).dot(cp->beta);
}

double predict_at(const BoostTrajectory& trajectory, const LinearSmoother& smoother, double x,
                  std::size_t k) {
  const BoostOperator op(smoother, trajectory.config.mu, trajectory.config.variant, false);
  return predict_at(trajectory, op, x, k);
}

BiasVariance exact_bias_variance(const LinearSmoother& smoother, const Vector& m_true,
                                 double sigma2, std::size_t k, double mu, BoostVariant variant) {
  if (static_cast<Eigen::Index>(smoother.size()) != m_true.size()) {
    throw InputError("true mean length does not match smoother size");
  }
  if (sigma2 < 0.0) throw InputError("sigma2 must be nonnegative");
  const BoostOperator op(smoother, mu, variant, false);
  const Matrix p = residual_operator_power(op.effective_matrix(), k);
  const Eigen::Index n = p.rows();
  BiasVariance out;
  out.squared_bias = (p * m_true).squaredNorm();
  out.variance_trace = sigma2 * (Matrix::Identity(n, n) - p).squaredNorm();
  return out;
}

}  // namespace boostsmooth
