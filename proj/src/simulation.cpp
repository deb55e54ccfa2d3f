#include "boostsmooth/simulation.hpp"

#include "boostsmooth/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace boostsmooth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

// Bisection on log(param) for a trace that decreases in param.
double solve_decreasing(const std::function<double(double)>& trace_of, double target,
                        double log_lo, double log_hi) {
  for (int it = 0; it < 200 && log_hi - log_lo > 1e-12; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (trace_of(std::exp(mid)) > target) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }
  return std::exp(0.5 * (log_lo + log_hi));
}

double kernel_trace(const Vector& x, const KernelSpec& kspec) {
  const double self = scaled_kernel(kspec, 0.0);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) row += scaled_kernel(kspec, x(i) - x(j));
    tr += self / row;
  }
  return tr;
}

Vector sorted_copy(const Vector& x) {
  Vector s = x;
  std::sort(s.data(), s.data() + s.size());
  return s;
}

double x_range(const Vector& x) { return x.maxCoeff() - x.minCoeff(); }

}  // namespace

std::string to_string(TrueFunction f) {
  switch (f) {
    case TrueFunction::m1: return "m1";
    case TrueFunction::m2: return "m2";
    case TrueFunction::m3: return "m3";
  }
  return "?";
}

std::string to_string(ErrorLaw e) { return e == ErrorLaw::gaussian ? "gaussian" : "student5"; }

TrueFunction parse_true_function(const std::string& name) {
  if (name == "m1") return TrueFunction::m1;
  if (name == "m2") return TrueFunction::m2;
  if (name == "m3") return TrueFunction::m3;
  throw InputError("unknown regression function: " + name);
}

ErrorLaw parse_error_law(const std::string& name) {
  if (name == "gaussian") return ErrorLaw::gaussian;
  if (name == "student5" || name == "student") return ErrorLaw::student5;
  throw InputError("unknown error law: " + name);
}

double true_function(TrueFunction f, double x) {
  switch (f) {
    case TrueFunction::m1:
      return std::sin(5.0 * std::numbers::pi * x);
    case TrueFunction::m2:
      return 1.0 - 48.0 * x + 218.0 * x * x - 315.0 * x * x * x + 145.0 * x * x * x * x;
    case TrueFunction::m3:
      return x < 1.0 / 3.0 ? std::exp(x - 1.0 / 3.0) : std::exp(-2.0 * (x - 1.0 / 3.0));
  }
  return kNaN;
}

double function_range(TrueFunction f) {
  constexpr int kPoints = 10000;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < kPoints; ++i) {
    const double v = true_function(f, static_cast<double>(i) / (kPoints - 1));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double noise_sigma(TrueFunction f) { return 0.2 * function_range(f); }

std::vector<PilotSpec> default_pilots(SmootherKind family, KernelFamily kernel) {
  SmootherSpec base;
  switch (family) {
    case SmootherKind::spline: base = SmoothingSpline{1.0}; break;
    case SmootherKind::kernel: base = KernelSmoothing{KernelSpec{kernel, 0.1}}; break;
    case SmootherKind::knn: base = NearestNeighbors{10}; break;
    case SmootherKind::bin: base = BinSmoothing{5}; break;
  }
  std::vector<PilotSpec> pilots;
  for (double df : {2.5, 5.0, 10.0}) {
    PilotSpec p{base, df, 2000};
    if (family == SmootherKind::spline && pilots.empty()) p.max_iterations = 20000;
    pilots.push_back(p);
  }
  return pilots;
}

void validate(const SimScenario& s) {
  if (s.n < 5) throw InputError("scenario sample size must be at least 5");
  if (s.replications < 1) throw InputError("scenario needs at least one replication");
  if (s.pilots.empty()) throw InputError("scenario needs at least one pilot smoother");
  if (s.rules.empty()) throw InputError("scenario needs at least one stopping rule");
  if (s.grid_size < 2) throw InputError("grid size must be at least 2");
  if (!(s.mu > 0.0 && s.mu <= 1.0)) throw InputError("mu must lie in (0, 1]");
  for (const auto& p : s.pilots) {
    if (p.max_iterations < 1) throw InputError("pilot max_iterations must be positive");
    if (p.target_df && !(*p.target_df > 1.0 && *p.target_df < static_cast<double>(s.n))) {
      throw InputError("pilot target df must lie in (1, n)");
    }
  }
  for (const auto& r : s.rules) validate(r, s.n);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t index) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(0x5bd1e995ULL + index));
}

Vector regular_grid(std::size_t size) {
  return Vector::LinSpaced(static_cast<Eigen::Index>(size), 0.0, 1.0);
}

Replication generate_replication(const SimScenario& scenario, std::size_t index) {
  const std::uint64_t seed = replication_seed(scenario.base_seed, index);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double sigma = noise_sigma(scenario.function);
  const auto n = static_cast<Eigen::Index>(scenario.n);

  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = unif(rng);
  Vector eps(n);
  if (scenario.error_law == ErrorLaw::gaussian) {
    std::normal_distribution<double> g(0.0, sigma);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = g(rng);
  } else {
    // t_5 has variance 5/3
    std::student_t_distribution<double> t(5.0);
    const double scale = sigma / std::sqrt(5.0 / 3.0);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = scale * t(rng);
  }
  Vector truth(n);
  for (Eigen::Index i = 0; i < n; ++i) truth(i) = true_function(scenario.function, x(i));
  Vector grid = regular_grid(scenario.grid_size);
  Vector truth_grid(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    truth_grid(g) = true_function(scenario.function, grid(g));
  }
  return Replication{index, seed, DesignSample(x, truth + eps), truth, std::move(grid),
                     std::move(truth_grid)};
}

double smoother_trace(const DesignSample& sample, const SmootherSpec& spec) {
  if (const auto* k = std::get_if<KernelSmoothing>(&spec)) {
    validate(spec, sample.size());
    return kernel_trace(sample.x(), k->kernel);
  }
  return build_smoother(sample, spec).matrix().trace();
}

SmootherSpec resolve_pilot(const DesignSample& sample, const SmootherSpec& family_spec,
                           double target_df) {
  const std::size_t n = sample.size();
  const double nn = static_cast<double>(n);
  if (!(target_df > 1.0 && target_df < nn)) {
    throw InputError("target degrees of freedom must lie in (1, n)");
  }
  switch (kind_of(family_spec)) {
    case SmootherKind::spline: {
      if (target_df <= 2.0) throw InputError("spline degrees of freedom must exceed 2");
      const NaturalCubicSpline spline(sorted_copy(sample.x()));
      const Vector kappa = Eigen::SelfAdjointEigenSolver<Matrix>(spline.penalty(),
                                                                Eigen::EigenvaluesOnly)
                               .eigenvalues();
      const auto trace_of = [&](double lambda) {
        double t = 0.0;
        for (Eigen::Index j = 0; j < kappa.size(); ++j) {
          t += 1.0 / (1.0 + lambda * std::max(0.0, kappa(j)));
        }
        return t;
      };
      return SmoothingSpline{solve_decreasing(trace_of, target_df, -60.0, 60.0)};
    }
    case SmootherKind::kernel: {
      KernelSpec k = std::get<KernelSmoothing>(family_spec).kernel;
      const double r = x_range(sample.x());
      const auto trace_of = [&](double h) {
        k.bandwidth = h;
        return kernel_trace(sample.x(), k);
      };
      const double h = solve_decreasing(trace_of, target_df, std::log(1e-6 * r), std::log(1e3 * r));
      k.bandwidth = h;
      return KernelSmoothing{k};
    }
    case SmootherKind::knn: {
      const auto k = static_cast<std::size_t>(std::lround(nn / target_df));
      return NearestNeighbors{std::clamp<std::size_t>(k, 1, n)};
    }
    case SmootherKind::bin: {
      const auto b = static_cast<std::size_t>(std::lround(target_df));
      return BinSmoothing{std::clamp<std::size_t>(b, 1, n)};
    }
  }
  return family_spec;
}

std::size_t oracle_k_opt(const BoostTrajectory& trajectory, const Vector& truth_at_design) {
  if (trajectory.checkpoints.empty()) {
    throw DegenerateCriterionError("trajectory has no recorded iterations");
  }
  std::size_t best_k = trajectory.checkpoints.front().k;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& cp : trajectory.checkpoints) {
    const double sse = (truth_at_design - cp.fitted).squaredNorm();
    if (sse < best) {
      best = sse;
      best_k = cp.k;
    }
  }
  return best_k;
}

double grid_mse(const std::function<double(double)>& predict, TrueFunction f,
                std::size_t grid_size) {
  const Vector grid = regular_grid(grid_size);
  double acc = 0.0;
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double d = true_function(f, grid(g)) - predict(grid(g));
    acc += d * d;
  }
  return acc / static_cast<double>(grid.size());
}

ComparisonFit tuned_single_smoother(const Replication& rep, const SmootherSpec& family_spec,
                                    TrueFunction /*f*/, std::size_t candidates) {
  const auto& sample = rep.sample;
  const std::size_t n = sample.size();
  const double nn = static_cast<double>(n);
  const SmootherKind kind = kind_of(family_spec);
  if (kind == SmootherKind::bin) {
    throw NotApplicableError("no tuned comparison smoother for bin smoothers");
  }
  const RuleKind criterion = kind == SmootherKind::kernel ? RuleKind::aicc : RuleKind::gcv;

  std::vector<SmootherSpec> specs;
  const double df_lo = kind == SmootherKind::spline ? 2.01 : 2.0;
  const SmootherSpec rough = resolve_pilot(sample, family_spec, nn / 2.0);
  const SmootherSpec smooth = resolve_pilot(sample, family_spec, df_lo);
  if (kind == SmootherKind::knn) {
    std::set<std::size_t> ks;
    const double k_lo = static_cast<double>(std::get<NearestNeighbors>(rough).neighbors);
    const double k_hi = static_cast<double>(std::get<NearestNeighbors>(smooth).neighbors);
    for (std::size_t c = 0; c < candidates; ++c) {
      const double t = candidates == 1 ? 0.0 : static_cast<double>(c) / (candidates - 1);
      ks.insert(static_cast<std::size_t>(std::lround(k_lo * std::pow(k_hi / k_lo, t))));
    }
    for (std::size_t k : ks) specs.emplace_back(NearestNeighbors{k});
  } else {
    const auto param = [&](const SmootherSpec& s) {
      return kind == SmootherKind::spline ? std::get<SmoothingSpline>(s).lambda
                                          : std::get<KernelSmoothing>(s).kernel.bandwidth;
    };
    const double lo = std::log(param(rough));
    const double hi = std::log(param(smooth));
    for (std::size_t c = 0; c < candidates; ++c) {
      const double t = candidates == 1 ? 0.0 : static_cast<double>(c) / (candidates - 1);
      const double v = std::exp(lo + t * (hi - lo));
      if (kind == SmootherKind::spline) {
        specs.emplace_back(SmoothingSpline{v});
      } else {
        KernelSpec k = std::get<KernelSmoothing>(family_spec).kernel;
        k.bandwidth = v;
        specs.emplace_back(KernelSmoothing{k});
      }
    }
  }

  std::optional<ComparisonFit> best;
  std::optional<LinearSmoother> best_smoother;
  for (const auto& spec : specs) {
    LinearSmoother sm = build_smoother(sample, spec);
    const Vector fit = sm.matrix() * sample.y();
    const double s2 = (sample.y() - fit).squaredNorm() / nn;
    const double score = plug_in_score(criterion, s2, sm.matrix().trace(), n);
    if (!best || score < best->criterion) {
      best = ComparisonFit{spec, score, 0.0};
      best_smoother = std::move(sm);
    }
  }
  const Vector pred = best_smoother->weights_at(rep.grid) * sample.y();
  best->grid_mse = (rep.truth_at_grid - pred).squaredNorm() / static_cast<double>(rep.grid.size());
  return *best;
}

const CellSummary* SimSummary::cell(std::size_t pilot, const std::string& rule) const {
  for (const auto& c : cells) {
    if (c.pilot == pilot && c.rule == rule) return &c;
  }
  return nullptr;
}

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

std::vector<ReplicationRecord> run_replication(const SimScenario& s, std::size_t index) {
  const Replication rep = generate_replication(s, index);
  const Vector& y = rep.sample.y();
  std::vector<ReplicationRecord> out;

  double comparison = kNaN;
  try {
    comparison = tuned_single_smoother(rep, s.pilots.front().spec, s.function,
                                       s.comparison_candidates)
                     .grid_mse;
  } catch (const NotApplicableError&) {
  }

  for (std::size_t p = 0; p < s.pilots.size(); ++p) {
    const PilotSpec& pilot = s.pilots[p];
    ReplicationRecord base;
    base.replication = index;
    base.pilot = p;
    base.comparison_mse = comparison;
    try {
      const SmootherSpec spec =
          pilot.target_df ? resolve_pilot(rep.sample, pilot.spec, *pilot.target_df) : pilot.spec;
      base.pilot_spec = describe(spec);
      const LinearSmoother sm = build_smoother(rep.sample, spec);
      base.pilot_trace = sm.matrix().trace();
      BoostConfig config;
      config.max_iterations = pilot.max_iterations;
      config.mu = s.mu;
      config.variant = s.variant;
      const BoostOperator op(sm, s.mu, s.variant, true);
      const BoostTrajectory traj = run_boost(op, y, config);
      base.diverged = traj.diverged;

      const Matrix w_grid = op.weights_at(rep.grid);
      const auto mse_at = [&](std::size_t k) {
        const Vector pred = w_grid * traj.at(k)->beta;
        return (rep.truth_at_grid - pred).squaredNorm() / static_cast<double>(rep.grid.size());
      };
      const auto sse_at = [&](std::size_t k) {
        return (rep.truth_at_design - traj.at(k)->fitted).squaredNorm();
      };
      base.k_opt = oracle_k_opt(traj, rep.truth_at_design);
      base.mse_k_opt = mse_at(base.k_opt);
      base.design_sse_k_opt = sse_at(base.k_opt);

      for (const auto& rule0 : s.rules) {
        ReplicationRecord rec = base;
        rec.rule = rule0.label();
        try {
          StoppingRule rule = rule0;
          rule.seed = splitmix64(rule0.seed ^ rep.seed);
          const SelectionResult sel = select(traj, sm, y, rule);
          rec.k_hat = sel.selected_k;
          rec.mse_k_hat = mse_at(rec.k_hat);
          rec.design_sse_k_hat = sse_at(rec.k_hat);
        } catch (const std::exception& e) {
          rec.failed = true;
          rec.message = e.what();
        }
        out.push_back(std::move(rec));
      }
    } catch (const std::exception& e) {
      for (const auto& rule0 : s.rules) {
        ReplicationRecord rec = base;
        rec.rule = rule0.label();
        rec.failed = true;
        rec.message = e.what();
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

}  // namespace

SimSummary run_scenario(const SimScenario& scenario) {
  validate(scenario);
  std::vector<std::vector<ReplicationRecord>> per_rep(scenario.replications);
  const int threads = scenario.jobs > 0 ? scenario.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t r = 0; r < scenario.replications; ++r) {
    per_rep[r] = run_replication(scenario, r);
  }

  SimSummary summary;
  summary.scenario = scenario;
  std::vector<double> comparisons;
  for (auto& recs : per_rep) {
    if (!recs.empty() && std::isfinite(recs.front().comparison_mse)) {
      comparisons.push_back(recs.front().comparison_mse);
    }
    for (auto& rec : recs) {
      if (rec.failed) ++summary.failures;
      summary.records.push_back(std::move(rec));
    }
  }
  summary.median_comparison_mse = median(comparisons);

  for (std::size_t p = 0; p < scenario.pilots.size(); ++p) {
    for (const auto& rule : scenario.rules) {
      CellSummary cell;
      cell.pilot = p;
      cell.rule = rule.label();
      std::vector<double> kh, mse, ko, mseo;
      for (const auto& rec : summary.records) {
        if (rec.pilot != p || rec.rule != cell.rule || rec.failed) continue;
        kh.push_back(static_cast<double>(rec.k_hat));
        mse.push_back(rec.mse_k_hat);
        ko.push_back(static_cast<double>(rec.k_opt));
        mseo.push_back(rec.mse_k_opt);
      }
      cell.count = kh.size();
      cell.median_k_hat = median(kh);
      cell.median_mse = median(mse);
      cell.median_k_opt = median(ko);
      cell.median_mse_k_opt = median(mseo);
      summary.cells.push_back(cell);
    }
  }
  return summary;
}

StopTimingSplit stop_timing_split(const SimSummary& summary, std::size_t pilot,
                                  const std::string& rule) {
  StopTimingSplit out;
  for (const auto& rec : summary.records) {
    if (rec.pilot != pilot || rec.rule != rule || rec.failed) continue;
    if (rec.k_hat > rec.k_opt) {
      out.mean_mse_late += rec.mse_k_hat;
      ++out.late;
    } else if (rec.k_hat < rec.k_opt) {
      out.mean_mse_early += rec.mse_k_hat;
      ++out.early;
    }
  }
  if (out.late > 0) out.mean_mse_late /= static_cast<double>(out.late);
  if (out.early > 0) out.mean_mse_early /= static_cast<double>(out.early);
  return out;
}

}  // namespace boostsmooth
