#include "boostsmooth/cli.hpp"

#include "boostsmooth/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace boostsmooth::cli {

namespace {

struct Options {
  std::string input;
  std::string out;
  std::string smoother = "kernel";
  std::string kernel = "gaussian";
  double bandwidth = 0.2;
  std::size_t neighbors = 10;
  double lambda = 0.2;
  std::size_t bins = 5;
  double mu = 1.0;
  std::size_t max_iter = 1000;
  std::string variant = "plain";
  std::vector<std::string> rules;
  std::size_t folds = 5;
  double split_fraction = 0.5;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::size_t k = 1;
  std::string trajectory;
  std::size_t replications = 0;
};

void add_smoother_flags(CLI::App* app, Options& o) {
  app->add_option("--smoother", o.smoother, "kernel|knn|spline|bin")
      ->check(CLI::IsMember({"kernel", "knn", "spline", "bin"}));
  app->add_option("--kernel", o.kernel, "gaussian|epanechnikov|uniform|triangular")
      ->check(CLI::IsMember({"gaussian", "epanechnikov", "uniform", "triangular"}));
  app->add_option("--bandwidth", o.bandwidth, "kernel bandwidth h");
  app->add_option("--neighbors", o.neighbors, "k-NN neighbourhood size K");
  app->add_option("--lambda", o.lambda, "smoothing spline penalty");
  app->add_option("--bins", o.bins, "number of bins");
}

void add_boost_flags(CLI::App* app, Options& o) {
  app->add_option("--mu", o.mu, "convergence factor in (0, 1]");
  app->add_option("--max-iter", o.max_iter, "maximum iteration M");
  app->add_option("--variant", o.variant, "plain|symmetrized")
      ->check(CLI::IsMember({"plain", "symmetrized"}));
}

void add_rule_flags(CLI::App* app, Options& o) {
  app->add_option("--rule", o.rules, "aic|aic-literal|aicc|gcv|cv|loocv|split")
      ->check(CLI::IsMember({"aic", "aic-literal", "aicc", "gcv", "cv", "loocv", "split"}));
  app->add_option("--folds", o.folds, "number of folds for cv");
  app->add_option("--split-fraction", o.split_fraction, "test share for split");
  app->add_option("--seed", o.seed, "seed for split");
}

SmootherSpec smoother_spec(const Options& o) {
  switch (parse_smoother_kind(o.smoother)) {
    case SmootherKind::kernel:
      return KernelSmoothing{KernelSpec{parse_kernel_family(o.kernel), o.bandwidth}};
    case SmootherKind::knn: return NearestNeighbors{o.neighbors};
    case SmootherKind::spline: return SmoothingSpline{o.lambda};
    case SmootherKind::bin: return BinSmoothing{o.bins};
  }
  return SmoothingSpline{};
}

BoostConfig boost_config(const Options& o) {
  BoostConfig c;
  c.max_iterations = o.max_iter;
  c.mu = o.mu;
  c.variant = parse_variant(o.variant);
  validate(c);
  return c;
}

std::vector<StoppingRule> rules(const Options& o, std::size_t n) {
  std::vector<StoppingRule> out;
  for (const auto& name : o.rules) {
    StoppingRule r = parse_rule(name);
    if (name == "cv") {
      if (o.folds < 2) throw InputError("--folds must be at least 2");
      r.fold_size = (n + o.folds - 1) / o.folds;
    }
    if (r.kind == RuleKind::data_split) {
      r.test_fraction = o.split_fraction;
      r.seed = o.seed;
    }
    validate(r, n);
    out.push_back(r);
  }
  return out;
}

// Writes to --out when given, otherwise to `fallback`.
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  write(f);
}

std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void warn_divergence(const BoostTrajectory& traj, std::ostream& err) {
  if (!traj.diverged) return;
  err << "warning: {\"event\":\"diverged\",\"k\":" << traj.diverged_at
      << ",\"last_completed_k\":" << traj.last_completed_k << "}\n";
}

int cmd_fit(const Options& o, std::ostream& out) {
  const DesignSample sample = io::read_sample_csv(o.input);
  const LinearSmoother sm = build_smoother(sample, smoother_spec(o));
  const Vector fitted = o.k <= 1 ? Vector(sm.matrix() * sample.y())
                                 : closed_form_fit(sm, sample.y(), o.k, o.mu,
                                                   parse_variant(o.variant));
  emit(o.out, out, [&](std::ostream& s) { io::write_fitted_csv(s, sample, fitted); });
  return 0;
}

int cmd_boost(const Options& o, std::ostream& out, std::ostream& err) {
  const DesignSample sample = io::read_sample_csv(o.input);
  const LinearSmoother sm = build_smoother(sample, smoother_spec(o));
  const auto rs = rules(o, sample.size());
  BoostConfig config = boost_config(o);
  const bool needs_trace =
      std::any_of(rs.begin(), rs.end(), [](const StoppingRule& r) { return is_plug_in(r.kind); });
  config.compute_trace = needs_trace || sm.symmetric_form().has_value() ||
                         sample.size() <= 200;
  const BoostTrajectory traj = run_boost(sm, sample.y(), config);
  warn_divergence(traj, err);
  emit(o.out, out, [&](std::ostream& s) { io::write_trajectory_csv(s, traj); });

  for (const auto& rule : rs) {
    const SelectionResult sel = select(traj, sm, sample.y(), rule);
    for (const auto& w : sel.warnings) err << "warning: " << w << '\n';
    const std::string tag = rs.size() > 1 ? "." + rule.label() : "";
    if (o.out.empty()) {
      err << io::selection_json(sel, sample.size(), false) << '\n';
      continue;
    }
    std::ofstream js(sibling(o.out, tag + ".selection.json"));
    js << io::selection_json(sel, sample.size()) << '\n';
    std::ofstream fit(sibling(o.out, tag + ".fitted.csv"));
    io::write_fitted_csv(fit, sample, traj.at(sel.selected_k)->fitted);
  }
  return 0;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
  const DesignSample sample = io::read_sample_csv(o.input);
  const LinearSmoother sm = build_smoother(sample, smoother_spec(o));
  const SpectrumReport report = analyze(sm, o.mu, parse_variant(o.variant));
  emit(o.out, out, [&](std::ostream& s) { s << io::spectrum_json(report) << '\n'; });
  return 0;
}

int cmd_select(const Options& o, std::ostream& out, std::ostream& err) {
  const DesignSample sample = io::read_sample_csv(o.input);
  const LinearSmoother sm = build_smoother(sample, smoother_spec(o));
  auto rs = rules(o, sample.size());
  if (rs.empty()) rs.push_back(StoppingRule::gcv());
  const BoostConfig config = boost_config(o);
  const BoostTrajectory traj = o.trajectory.empty()
                                   ? run_boost(sm, sample.y(), config)
                                   : io::read_trajectory_csv(o.trajectory, sample.size(), config);
  warn_divergence(traj, err);

  std::vector<SelectionResult> sels;
  nlohmann::json report = nlohmann::json::array();
  for (const auto& rule : rs) {
    sels.push_back(select(traj, sm, sample.y(), rule));
    for (const auto& w : sels.back().warnings) err << "warning: " << w << '\n';
    report.push_back(nlohmann::json::parse(io::selection_json(sels.back(), sample.size())));
  }
  emit(o.out, out, [&](std::ostream& s) { s << report.dump(2) << '\n'; });
  if (!o.out.empty()) {
    std::ofstream scores(sibling(o.out, ".scores.csv"));
    io::write_scores_csv(scores, sels);
  }
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  SimScenario scenario = io::read_scenario(o.input);
  if (o.replications > 0) scenario.replications = o.replications;
  if (o.jobs > 0) scenario.jobs = o.jobs;
  const SimSummary summary = run_scenario(scenario);
  if (summary.failures > 0) {
    err << "warning: " << summary.failures << " replication record(s) failed\n";
  }
  if (o.out.empty()) {
    io::write_table_csv(out, summary);
    return 0;
  }
  std::filesystem::create_directories(o.out);
  std::ofstream table(std::filesystem::path(o.out) / "table.csv");
  std::ofstream records(std::filesystem::path(o.out) / "records.csv");
  if (!table || !records) throw InputError("cannot write into " + o.out);
  io::write_table_csv(table, summary);
  io::write_records_csv(records, summary);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterated bias correction (L2 boosting) of linear smoothers"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "fit the pilot smoother (or its k-th boost)");
  fit->add_option("data", o.input, "CSV with columns x,y")->required()->check(CLI::ExistingFile);
  add_smoother_flags(fit, o);
  fit->add_option("--k", o.k, "boosting iteration");
  fit->add_option("--mu", o.mu, "convergence factor in (0, 1]");
  fit->add_option("--variant", o.variant, "plain|symmetrized");
  fit->add_option("--out", o.out, "output CSV");

  auto* boost = app.add_subcommand("boost", "run the boosting recursion");
  boost->add_option("data", o.input)->required()->check(CLI::ExistingFile);
  add_smoother_flags(boost, o);
  add_boost_flags(boost, o);
  add_rule_flags(boost, o);
  boost->add_option("--out", o.out, "trajectory CSV");

  auto* spectrum = app.add_subcommand("spectrum", "spectral convergence diagnostics");
  spectrum->add_option("data", o.input)->required()->check(CLI::ExistingFile);
  add_smoother_flags(spectrum, o);
  spectrum->add_option("--mu", o.mu, "convergence factor in (0, 1]");
  spectrum->add_option("--variant", o.variant, "plain|symmetrized");
  spectrum->add_option("--out", o.out, "output JSON");

  auto* sel = app.add_subcommand("select", "choose the stopping iteration");
  sel->add_option("data", o.input)->required()->check(CLI::ExistingFile);
  add_smoother_flags(sel, o);
  add_boost_flags(sel, o);
  add_rule_flags(sel, o);
  sel->add_option("--trajectory", o.trajectory, "re-score a written trajectory CSV")
      ->check(CLI::ExistingFile);
  sel->add_option("--out", o.out, "output JSON");

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo simulation scenario");
  sim->add_option("scenario", o.input, "scenario JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--replications", o.replications, "override replication count");
  sim->add_option("--jobs", o.jobs, "worker threads");
  sim->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_s;
    std::ostringstream e_s;
    const int code = app.exit(e, o_s, e_s);
    out << o_s.str();
    err << e_s.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit) return cmd_fit(o, out);
    if (*boost) return cmd_boost(o, out, err);
    if (*spectrum) return cmd_spectrum(o, out);
    if (*sel) return cmd_select(o, out, err);
    if (*sim) return cmd_simulate(o, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace boostsmooth::cli
