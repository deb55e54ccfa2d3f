#include "boostsmooth/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace boostsmooth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::aic: return "aic";
    case RuleKind::aic_literal: return "aic_literal";
    case RuleKind::aicc: return "aicc";
    case RuleKind::gcv: return "gcv";
    case RuleKind::cv: return "cv";
    case RuleKind::data_split: return "data_split";
  }
  return "?";
}

std::string StoppingRule::label() const {
  if (kind == RuleKind::cv) {
    return fold_size == 1 && fold_of.empty() ? "loocv" : "cv" + std::to_string(fold_size);
  }
  if (kind == RuleKind::data_split) return "split";
  return to_string(kind);
}

StoppingRule parse_rule(const std::string& name) {
  if (name == "aic") return StoppingRule::aic();
  if (name == "aic-literal" || name == "aic_literal") return StoppingRule::aic_literal();
  if (name == "aicc") return StoppingRule::aicc();
  if (name == "gcv") return StoppingRule::gcv();
  if (name == "loocv") return StoppingRule::loocv();
  if (name == "cv") return StoppingRule::cv(1);
  if (name == "split" || name == "data_split") return StoppingRule::data_split(0.5, 0);
  throw InputError("unknown stopping rule: " + name);
}

void validate(const StoppingRule& rule, std::size_t n) {
  if (rule.kind == RuleKind::cv) {
    if (!rule.fold_of.empty()) {
      if (rule.fold_of.size() != n) throw InputError("fold assignment length differs from n");
    } else if (rule.fold_size < 1 || 2 * rule.fold_size > n) {
      throw InputError("cv fold size must satisfy 1 <= L <= n/2");
    }
  }
  if (rule.kind == RuleKind::data_split &&
      !(rule.test_fraction > 0.0 && rule.test_fraction < 1.0)) {
    throw InputError("data split test fraction must lie in (0, 1)");
  }
}

bool is_plug_in(RuleKind kind) {
  return kind != RuleKind::cv && kind != RuleKind::data_split;
}

double plug_in_score(RuleKind kind, double sigma_hat_sq, double trace, std::size_t n) {
  const double nn = static_cast<double>(n);
  switch (kind) {
    case RuleKind::aic:
      return std::log(sigma_hat_sq) + 2.0 * trace / nn;
    case RuleKind::aic_literal:
      return sigma_hat_sq + 2.0 * trace / nn;
    case RuleKind::gcv:
      if (trace / nn >= 1.0 - 1e-9) return kInf;
      return std::log(sigma_hat_sq) - 2.0 * std::log(1.0 - trace / nn);
    case RuleKind::aicc: {
      const double denom = nn - trace - 2.0;
      if (denom <= 0.0) return kInf;
      return std::log(sigma_hat_sq) + 1.0 + 2.0 * (trace + 1.0) / denom;
    }
    default:
      throw InputError("not a plug-in rule: " + to_string(kind));
  }
}

std::size_t argmin_score(const std::map<std::size_t, double>& scores) {
  std::size_t best_k = 0;
  double best = kInf;
  for (const auto& [k, s] : scores) {
    if (s < best) {  // strict: ties keep the smaller k
      best = s;
      best_k = k;
    }
  }
  if (best_k == 0) throw DegenerateCriterionError("no candidate iteration has a finite score");
  return best_k;
}

std::vector<std::vector<std::size_t>> cv_folds(const StoppingRule& rule, std::size_t n) {
  std::map<std::size_t, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = rule.fold_of.empty() ? i / rule.fold_size : rule.fold_of[i];
    by_label[label].push_back(i);
  }
  std::vector<std::vector<std::size_t>> folds;
  for (auto& [label, members] : by_label) folds.push_back(std::move(members));
  return folds;
}

std::vector<std::size_t> split_test_set(const StoppingRule& rule, std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(rule.seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  auto test = static_cast<std::size_t>(std::lround(rule.test_fraction * static_cast<double>(n)));
  test = std::clamp<std::size_t>(test, 1, n - 3);
  idx.resize(test);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Matrix cv_refit_predictions(const DesignSample& sample, const SmootherSpec& spec,
                            const BoostConfig& config, const std::vector<std::size_t>& held_out,
                            const std::vector<std::size_t>& ks) {
  const std::size_t n = sample.size();
  std::vector<bool> is_test(n, false);
  for (std::size_t i : held_out) {
    if (i >= n) throw InputError("held-out index out of range");
    is_test[i] = true;
  }
  std::vector<std::size_t> train;
  std::vector<std::size_t> test = held_out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_test[i]) train.push_back(i);
  }
  if (held_out.empty()) test = train;
  if (train.size() < 3) throw InputError("learning set needs at least 3 observations");

  const DesignSample learn = sample.subset(train);
  const LinearSmoother sm = build_smoother(learn, spec);
  BoostConfig refit = config;
  refit.compute_trace = false;
  refit.max_iterations = *std::max_element(ks.begin(), ks.end());
  refit.checkpoints = ks;
  const BoostOperator op(sm, refit.mu, refit.variant, false);
  const BoostTrajectory traj = run_boost(op, learn.y(), refit);

  Vector qx(static_cast<Eigen::Index>(test.size()));
  for (std::size_t t = 0; t < test.size(); ++t) {
    qx(static_cast<Eigen::Index>(t)) = sample.x()(static_cast<Eigen::Index>(test[t]));
  }
  const Matrix w = op.weights_at(qx);
  Matrix out(qx.size(), static_cast<Eigen::Index>(ks.size()));
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const Checkpoint* cp = traj.at(ks[j]);
    if (cp == nullptr) {
      out.col(static_cast<Eigen::Index>(j)).setConstant(kInf);
    } else {
      out.col(static_cast<Eigen::Index>(j)) = w * cp->beta;
    }
  }
  return out;
}

Vector cv_refit_predict(const DesignSample& sample, const SmootherSpec& spec,
                        const BoostConfig& config, const std::vector<std::size_t>& held_out,
                        std::size_t k) {
  return cv_refit_predictions(sample, spec, config, held_out, {k}).col(0);
}

namespace {

// Sum of squared prediction errors over the given test sets, per candidate.
std::vector<double> held_out_errors(const DesignSample& sample, const SmootherSpec& spec,
                                    const BoostConfig& config,
                                    const std::vector<std::vector<std::size_t>>& tests,
                                    const std::vector<std::size_t>& ks) {
  std::vector<Matrix> preds(tests.size());
  std::vector<std::string> failures(tests.size());
#pragma omp parallel for schedule(dynamic) if (tests.size() > 1)
  for (std::size_t f = 0; f < tests.size(); ++f) {
    try {
      preds[f] = cv_refit_predictions(sample, spec, config, tests[f], ks);
    } catch (const std::exception& e) {
      failures[f] = e.what();
    }
  }
  for (const auto& msg : failures) {
    if (!msg.empty()) throw NumericalError("cross-validation refit failed: " + msg);
  }
  std::vector<double> err(ks.size(), 0.0);
  for (std::size_t f = 0; f < tests.size(); ++f) {
    for (std::size_t t = 0; t < tests[f].size(); ++t) {
      const double yi = sample.y()(static_cast<Eigen::Index>(tests[f][t]));
      for (std::size_t j = 0; j < ks.size(); ++j) {
        const double d = yi - preds[f](static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
        err[j] += d * d;
      }
    }
  }
  for (double& e : err) {
    if (!std::isfinite(e)) e = kInf;
  }
  return err;
}

}  // namespace

SelectionResult select(const BoostTrajectory& trajectory, const LinearSmoother& smoother,
                       const Vector& y, const StoppingRule& rule) {
  const std::size_t n = smoother.size();
  if (static_cast<std::size_t>(y.size()) != n || trajectory.n != n) {
    throw InputError("trajectory, smoother and response sizes differ");
  }
  validate(rule, n);
  if (trajectory.checkpoints.empty()) {
    throw DegenerateCriterionError("trajectory has no recorded iterations before divergence");
  }

  SelectionResult res;
  res.rule = rule;
  if (trajectory.diverged) {
    res.warnings.push_back("trajectory diverged at k=" + std::to_string(trajectory.diverged_at) +
                           "; candidates truncated");
  }
  const std::vector<std::size_t> ks = trajectory.recorded_ks();

  if (is_plug_in(rule.kind)) {
    std::size_t excluded = 0;
    for (const auto& cp : trajectory.checkpoints) {
      if (!cp.trace) {
        throw TraceUnavailableError("tr(S_k) is not available for this smoother/size");
      }
      const double s2 = cp.residual_norm * cp.residual_norm / static_cast<double>(n);
      const double score = plug_in_score(rule.kind, s2, *cp.trace, n);
      if (!std::isfinite(score) && score > 0.0) ++excluded;
      res.scores[cp.k] = score;
    }
    if (excluded > 0) {
      res.warnings.push_back(std::to_string(excluded) + " candidate(s) excluded: " +
                             to_string(rule.kind) + " undefined for tr(S_k) near n");
    }
    if (excluded == ks.size()) {
      throw DegenerateCriterionError(to_string(rule.kind) + " is undefined for every candidate k");
    }
  } else {
    const DesignSample data(smoother.sample().x(), y);
    BoostConfig config = trajectory.config;
    std::vector<std::vector<std::size_t>> tests;
    if (rule.kind == RuleKind::cv) {
      tests = cv_folds(rule, n);
    } else {
      tests.push_back(split_test_set(rule, n));
    }
    const auto err = held_out_errors(data, smoother.spec(), config, tests, ks);
    for (std::size_t j = 0; j < ks.size(); ++j) res.scores[ks[j]] = err[j];
  }

  res.selected_k = argmin_score(res.scores);
  const double rn = trajectory.at(res.selected_k)->residual_norm;
  res.sigma_hat_sq_at_selected = rn * rn / static_cast<double>(n);
  return res;
}

}  // namespace boostsmooth
