#pragma once

#include "boostsmooth/boost.hpp"

#include <cstdint>
#include <map>

namespace boostsmooth {

enum class RuleKind { aic, aic_literal, aicc, gcv, cv, data_split };

std::string to_string(RuleKind kind);

struct StoppingRule {
  RuleKind kind = RuleKind::gcv;
  /// cv: size L of each test fold (L = 1 is leave-one-out).
  std::size_t fold_size = 1;
  /// cv: optional explicit fold label per observation; overrides fold_size.
  std::vector<std::size_t> fold_of;
  /// data_split: share of observations in the test set.
  double test_fraction = 0.5;
  std::uint64_t seed = 0;

  static StoppingRule of(RuleKind kind) {
    StoppingRule r;
    r.kind = kind;
    return r;
  }
  static StoppingRule aic() { return of(RuleKind::aic); }
  static StoppingRule aic_literal() { return of(RuleKind::aic_literal); }
  static StoppingRule aicc() { return of(RuleKind::aicc); }
  static StoppingRule gcv() { return of(RuleKind::gcv); }
  static StoppingRule cv(std::size_t fold_size) {
    StoppingRule r = of(RuleKind::cv);
    r.fold_size = fold_size;
    return r;
  }
  static StoppingRule loocv() { return cv(1); }
  static StoppingRule data_split(double test_fraction, std::uint64_t seed) {
    StoppingRule r = of(RuleKind::data_split);
    r.test_fraction = test_fraction;
    r.seed = seed;
    return r;
  }

  /// Short label: "gcv", "cv5", "loocv", "split", ...
  std::string label() const;
};

/// Parses the CLI spelling: aic | aic-literal | aicc | gcv | cv | loocv | split.
StoppingRule parse_rule(const std::string& name);

/// Throws InputError for fold sizes outside [1, n/2] or split fractions
/// outside (0, 1).
void validate(const StoppingRule& rule, std::size_t n);

bool is_plug_in(RuleKind kind);

struct SelectionResult {
  std::size_t selected_k = 1;
  std::map<std::size_t, double> scores;
  double sigma_hat_sq_at_selected = 0.0;
  StoppingRule rule;
  std::vector<std::string> warnings;
};

/// Plug-in criterion value from sigma_hat^2 = ||y - m_k||^2 / n and tr(S_k).
/// Returns +inf where the criterion is undefined (GCV at tr/n >= 1 - 1e-9,
/// AICc with nonpositive denominator).
double plug_in_score(RuleKind kind, double sigma_hat_sq, double trace, std::size_t n);

/// Argmin over `scores`, smallest k on ties. Throws
/// DegenerateCriterionError when no score is finite.
std::size_t argmin_score(const std::map<std::size_t, double>& scores);

/// Chooses the stopping iteration among the trajectory's recorded
/// (pre-divergence) checkpoints. cv and data_split refit on learning
/// subsets; the plug-in rules need tr(S_k) (TraceUnavailableError otherwise).
SelectionResult select(const BoostTrajectory& trajectory, const LinearSmoother& smoother,
                       const Vector& y, const StoppingRule& rule);

/// Fits the smoother on the complement of `held_out`, boosts to k and
/// predicts at the held-out covariates. With an empty `held_out` the full
/// sample is used and the fitted values at every design point are returned.
Vector cv_refit_predict(const DesignSample& sample, const SmootherSpec& spec,
                        const BoostConfig& config, const std::vector<std::size_t>& held_out,
                        std::size_t k);

/// As cv_refit_predict for several k at once: column j holds predictions at
/// ks[j]; +inf where the refit diverged before ks[j].
Matrix cv_refit_predictions(const DesignSample& sample, const SmootherSpec& spec,
                            const BoostConfig& config, const std::vector<std::size_t>& held_out,
                            const std::vector<std::size_t>& ks);

/// Test folds of the cv rule, each a list of observation indices.
std::vector<std::vector<std::size_t>> cv_folds(const StoppingRule& rule, std::size_t n);

/// Test set of the data_split rule.
std::vector<std::size_t> split_test_set(const StoppingRule& rule, std::size_t n);

}  // namespace boostsmooth
