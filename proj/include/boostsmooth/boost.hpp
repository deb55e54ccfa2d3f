#pragma once

#include "boostsmooth/smoother.hpp"

#include <optional>

namespace boostsmooth {

enum class BoostVariant { plain, symmetrized };

std::string to_string(BoostVariant v);
BoostVariant parse_variant(const std::string& name);

struct BoostConfig {
  std::size_t max_iterations = 1000;
  double mu = 1.0;
  BoostVariant variant = BoostVariant::plain;
  /// Stop once ||R_k|| > divergence_guard * ||y||.
  double divergence_guard = 1e6;
  /// Iterations whose full state (beta_k, fitted_k) is kept. Empty means
  /// default_checkpoints(max_iterations).
  std::vector<std::size_t> checkpoints;
  /// Track tr(S_k). Refits inside cross-validation switch this off.
  bool compute_trace = true;
};

/// Throws InputError for mu outside (0, 1], zero iterations or a
/// nonpositive guard.
void validate(const BoostConfig& config);

/// Every k <= 200, then geometric spacing k -> ceil(1.1 k) up to and
/// including max_iterations.
std::vector<std::size_t> default_checkpoints(std::size_t max_iterations);

/// Eigen-decomposition of the base smoother (S or S S^t) in symmetric form:
/// base = diag(scale) * vectors * diag(values) * vectors^t * diag(scale)^{-1}.
struct SpectralBasis {
  Vector values;
  Matrix vectors;
  Vector scale;
};

/// The effective smoother mu * S_eff used by the recursion, where S_eff is S
/// (plain) or S S^t (symmetrized), together with its out-of-sample weights.
class BoostOperator {
public:
  BoostOperator(const LinearSmoother& smoother, double mu, BoostVariant variant,
                bool with_spectrum = true);

  const LinearSmoother& smoother() const { return smoother_; }
  double mu() const { return mu_; }
  BoostVariant variant() const { return variant_; }
  std::size_t size() const { return smoother_.size(); }

  /// S or S S^t, without the mu factor.
  const Matrix& base() const { return base_; }

  /// mu * base.
  Matrix effective_matrix() const { return mu_ * base_; }

  /// Present when the base admits a symmetric form (kernel, spline, bin,
  /// or any smoother under the symmetrized variant).
  const std::optional<SpectralBasis>& basis() const { return basis_; }

  /// Weights w(x) with m_k(x) = w(x) . beta_k, including the mu factor.
  Vector weights_at(double x) const;
  Matrix weights_at(const Vector& queries) const;

  /// tr(I - (I - mu S_eff)^k) from the eigenvalues; nullopt without basis.
  std::optional<double> trace(std::size_t k) const;

private:
  LinearSmoother smoother_;
  double mu_;
  BoostVariant variant_;
  Matrix base_;
  std::optional<SpectralBasis> basis_;
};

struct Checkpoint {
  std::size_t k = 0;
  Vector beta;
  Vector fitted;
  double residual_norm = 0.0;
  double bias_norm = 0.0;
  std::optional<double> trace;
};

/// Recorded state of the bias-correction recursion.
struct BoostTrajectory {
  BoostConfig config;
  std::size_t n = 0;
  double response_norm = 0.0;
  std::vector<Checkpoint> checkpoints;
  /// ||R_k|| and ||b_k|| for every completed k (index k - 1).
  std::vector<double> residual_norms;
  std::vector<double> bias_norms;
  bool diverged = false;
  /// Iteration whose residual norm tripped the guard (0 when not diverged).
  std::size_t diverged_at = 0;
  std::size_t last_completed_k = 0;

  /// nullptr when k was not recorded.
  const Checkpoint* at(std::size_t k) const;
  std::vector<std::size_t> recorded_ks() const;
};

/// Runs m_{k+1} = m_k + mu * S_eff (y - m_k) starting from m_1 = mu S_eff y,
/// tracking beta_k with m_k = mu S_eff beta_k. Stops early (diverged flag)
/// when the residual norm exceeds the guard.
BoostTrajectory run_boost(const LinearSmoother& smoother, const Vector& y,
                          const BoostConfig& config);

/// Same as above with a prebuilt operator (reused across stopping rules).
BoostTrajectory run_boost(const BoostOperator& op, const Vector& y, const BoostConfig& config);

enum class ClosedFormMethod { automatic, eigen, powers };

/// [I - (I - mu S_eff)^k] y, either through the eigen form or by k
/// repeated products with (I - mu S_eff).
Vector closed_form_fit(const LinearSmoother& smoother, const Vector& y, std::size_t k,
                       double mu = 1.0, BoostVariant variant = BoostVariant::plain,
                       ClosedFormMethod method = ClosedFormMethod::automatic);

/// m_k(x) = w(x) . beta_k. Throws InputError if k is not recorded.
double predict_at(const BoostTrajectory& trajectory, const BoostOperator& op, double x,
                  std::size_t k);
double predict_at(const BoostTrajectory& trajectory, const LinearSmoother& smoother, double x,
                  std::size_t k);

struct BiasVariance {
  double squared_bias = 0.0;
  double variance_trace = 0.0;
};

/// Squared bias ||(I - S)^k m||^2 and total variance sigma2 ||I - (I - S)^k||_F^2.
BiasVariance exact_bias_variance(const LinearSmoother& smoother, const Vector& m_true,
                                 double sigma2, std::size_t k, double mu = 1.0,
                                 BoostVariant variant = BoostVariant::plain);

/// (I - mu S_eff)^k by repeated squaring.
Matrix residual_operator_power(const Matrix& effective, std::size_t k);

}  // namespace boostsmooth
