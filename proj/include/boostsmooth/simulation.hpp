#pragma once

#include "boostsmooth/stopping.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace boostsmooth {

enum class TrueFunction { m1, m2, m3 };
enum class ErrorLaw { gaussian, student5 };

std::string to_string(TrueFunction f);
std::string to_string(ErrorLaw e);
TrueFunction parse_true_function(const std::string& name);
ErrorLaw parse_error_law(const std::string& name);

/// m1(x) = sin(5 pi x); m2 a quartic; m3 a two-sided exponential peaked at 1/3.
double true_function(TrueFunction f, double x);

/// Range of f over [0, 1], measured on a 10^4-point grid.
double function_range(TrueFunction f);

/// Error standard deviation 0.2 * range.
double noise_sigma(TrueFunction f);

/// A pilot smoother for the simulation. When target_df is set, the
/// smoother's tuning parameter is re-solved on every sample so that
/// tr(S) = target_df; otherwise `spec` is used as given.
struct PilotSpec {
  SmootherSpec spec;
  std::optional<double> target_df;
  std::size_t max_iterations = 2000;
};

struct SimScenario {
  TrueFunction function = TrueFunction::m1;
  std::size_t n = 50;
  ErrorLaw error_law = ErrorLaw::gaussian;
  std::vector<PilotSpec> pilots;  // smoothest first
  std::vector<StoppingRule> rules;
  std::size_t replications = 100;
  std::uint64_t base_seed = 1;
  std::size_t grid_size = 100;
  double mu = 1.0;
  BoostVariant variant = BoostVariant::plain;
  /// Candidate count for the classically tuned comparison smoother.
  std::size_t comparison_candidates = 25;
  /// Worker threads for replications (0 = OpenMP default).
  int jobs = 0;
};

/// Three pilots of the given family at effective degrees of freedom
/// {2.5, 5, 10}; the smoothest spline pilot gets 20000 iterations, the rest
/// 2000.
std::vector<PilotSpec> default_pilots(SmootherKind family,
                                      KernelFamily kernel = KernelFamily::gaussian);

void validate(const SimScenario& scenario);

struct Replication {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  DesignSample sample;
  Vector truth_at_design;
  Vector grid;
  Vector truth_at_grid;
};

/// Deterministic seed for one replication, independent of thread schedule.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t index);

/// x ~ U[0,1]^n, y = m(x) + eps with sd(eps) = noise_sigma(m).
Replication generate_replication(const SimScenario& scenario, std::size_t index);

/// Regular grid {0, 1/(size-1), ..., 1}.
Vector regular_grid(std::size_t size);

/// Tuning parameter giving tr(S) = df on this sample (bisection for kernel
/// bandwidth and spline lambda; rounding for knn and bins).
SmootherSpec resolve_pilot(const DesignSample& sample, const SmootherSpec& family_spec,
                           double target_df);

/// tr(S) of the smoother built on the sample.
double smoother_trace(const DesignSample& sample, const SmootherSpec& spec);

/// argmin_k sum_i (m(X_i) - m_k(X_i))^2 over recorded checkpoints; ties to
/// the smallest k.
std::size_t oracle_k_opt(const BoostTrajectory& trajectory, const Vector& truth_at_design);

/// (1/G) sum over the regular grid of (m(x) - predict(x))^2.
double grid_mse(const std::function<double(double)>& predict, TrueFunction f,
                std::size_t grid_size = 100);

struct ComparisonFit {
  SmootherSpec spec;
  double criterion = 0.0;
  double grid_mse = 0.0;
};

/// Classically tuned single smoother: spline lambda by GCV, kernel
/// bandwidth by AICc, knn K by GCV, over candidates spanning
/// tr(S) in [2, n/2].
ComparisonFit tuned_single_smoother(const Replication& rep, const SmootherSpec& family_spec,
                                    TrueFunction f, std::size_t candidates);

struct ReplicationRecord {
  std::size_t replication = 0;
  std::size_t pilot = 0;
  std::string rule;
  std::string pilot_spec;
  double pilot_trace = 0.0;
  std::size_t k_hat = 0;
  double mse_k_hat = 0.0;
  double design_sse_k_hat = 0.0;
  std::size_t k_opt = 0;
  double mse_k_opt = 0.0;
  double design_sse_k_opt = 0.0;
  double comparison_mse = 0.0;
  bool diverged = false;
  bool failed = false;
  std::string message;
};

struct CellSummary {
  std::size_t pilot = 0;
  std::string rule;
  std::size_t count = 0;
  double median_k_hat = 0.0;
  double median_mse = 0.0;
  double median_k_opt = 0.0;
  double median_mse_k_opt = 0.0;
};

struct SimSummary {
  SimScenario scenario;
  std::vector<ReplicationRecord> records;
  std::vector<CellSummary> cells;
  double median_comparison_mse = 0.0;
  std::size_t failures = 0;

  const CellSummary* cell(std::size_t pilot, const std::string& rule) const;
};

double median(std::vector<double> values);

SimSummary run_scenario(const SimScenario& scenario);

/// Mean grid MSE of replications that stopped after k_opt versus before it.
struct StopTimingSplit {
  double mean_mse_late = 0.0;
  std::size_t late = 0;
  double mean_mse_early = 0.0;
  std::size_t early = 0;
};

StopTimingSplit stop_timing_split(const SimSummary& summary, std::size_t pilot,
                                  const std::string& rule);

}  // namespace boostsmooth
