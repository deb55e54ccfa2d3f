#include "boostsmooth/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace boostsmooth::io {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw InputError("line " + std::to_string(line_no) + ": cannot parse number '" + field + "'");
  }
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

// Fixed full-precision formatting for numeric CSV fields.
std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

DesignSample read_sample_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw InputError("empty CSV input");
  std::size_t xi = header.size();
  std::size_t yi = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "x") xi = c;
    if (header[c] == "y") yi = c;
  }
  if (xi == header.size() || yi == header.size()) {
    throw InputError("CSV header must name columns x and y");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    xs.push_back(parse_double(fields[xi], line_no));
    ys.push_back(parse_double(fields[yi], line_no));
  }
  if (xs.empty()) throw InputError("CSV has no data rows");
  return DesignSample(Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                      Eigen::Map<const Vector>(ys.data(), static_cast<Eigen::Index>(ys.size())));
}

DesignSample read_sample_csv(const std::string& path) {
  auto in = open_input(path);
  return read_sample_csv(in);
}

void write_fitted_csv(std::ostream& out, const DesignSample& sample, const Vector& fitted) {
  out << "x,y,fitted\n";
  for (Eigen::Index i = 0; i < fitted.size(); ++i) {
    out << num(sample.x()(i)) << ',' << num(sample.y()(i)) << ',' << num(fitted(i)) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const BoostTrajectory& traj) {
  out << "k,residual_norm,bias_norm,trace,checkpoint\n";
  auto cp = traj.checkpoints.begin();
  for (std::size_t i = 0; i < traj.residual_norms.size(); ++i) {
    const std::size_t k = i + 1;
    const bool is_cp = cp != traj.checkpoints.end() && cp->k == k;
    out << k << ',' << num(traj.residual_norms[i]) << ',' << num(traj.bias_norms[i]) << ',';
    if (is_cp && cp->trace) out << num(*cp->trace);
    out << ',' << (is_cp ? 1 : 0) << '\n';
    if (is_cp) ++cp;
  }
}

BoostTrajectory read_trajectory_csv(std::istream& in, std::size_t n, const BoostConfig& config) {
  std::string line;
  if (!std::getline(in, line) || split_fields(line).size() < 5) {
    throw InputError("trajectory CSV needs header k,residual_norm,bias_norm,trace,checkpoint");
  }
  BoostTrajectory traj;
  traj.config = config;
  traj.config.checkpoints.clear();
  traj.n = n;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() < 5) throw InputError("line " + std::to_string(line_no) + ": expected 5 fields");
    const auto k = static_cast<std::size_t>(parse_double(f[0], line_no));
    const double rn = parse_double(f[1], line_no);
    traj.residual_norms.push_back(rn);
    traj.bias_norms.push_back(parse_double(f[2], line_no));
    traj.last_completed_k = k;
    if (f[4] == "1") {
      Checkpoint cp;
      cp.k = k;
      cp.residual_norm = rn;
      cp.bias_norm = traj.bias_norms.back();
      if (!f[3].empty()) cp.trace = parse_double(f[3], line_no);
      traj.checkpoints.push_back(std::move(cp));
      traj.config.checkpoints.push_back(k);
    }
  }
  if (traj.checkpoints.empty()) throw InputError("trajectory CSV has no checkpoints");
  traj.config.max_iterations = traj.last_completed_k;
  return traj;
}

BoostTrajectory read_trajectory_csv(const std::string& path, std::size_t n,
                                    const BoostConfig& config) {
  auto in = open_input(path);
  return read_trajectory_csv(in, n, config);
}

std::string selection_json(const SelectionResult& sel, std::size_t n, bool with_scores) {
  json j;
  j["rule"] = sel.rule.label();
  j["selected_k"] = sel.selected_k;
  j["sigma_hat_sq"] = sel.sigma_hat_sq_at_selected;
  j["n"] = n;
  j["warnings"] = sel.warnings;
  if (with_scores) {
    json scores = json::array();
    for (const auto& [k, s] : sel.scores) scores.push_back({{"k", k}, {"score", finite_or_null(s)}});
    j["scores"] = scores;
  }
  return j.dump(2);
}

std::string spectrum_json(const SpectrumReport& r, std::size_t top) {
  json j;
  j["mu"] = r.mu;
  j["variant"] = to_string(r.variant);
  j["max_singular"] = r.max_singular;
  j["spectral_radius"] = r.spectral_radius;
  j["classification"] = to_string(r.classification);
  std::vector<double> sv;
  for (Eigen::Index i = 0; i < r.singular_values.size() && sv.size() < top; ++i) {
    sv.push_back(r.singular_values(i));
  }
  j["singular_values"] = sv;
  if (r.symmetric_equivalent_eigenvalues) {
    const Vector& e = *r.symmetric_equivalent_eigenvalues;
    j["smoother_eigenvalue_range"] = {e.minCoeff(), e.maxCoeff()};
  }
  if (r.witness) {
    j["witness"] = {{"indices", r.witness->indices}, {"determinant", r.witness->determinant}};
  } else {
    j["witness"] = nullptr;
  }
  return j.dump(2);
}

void write_scores_csv(std::ostream& out, const std::vector<SelectionResult>& selections) {
  out << 'k';
  for (const auto& s : selections) out << ',' << s.rule.label();
  out << '\n';
  if (selections.empty()) return;
  for (const auto& [k, first] : selections.front().scores) {
    out << k;
    for (const auto& s : selections) {
      const auto it = s.scores.find(k);
      out << ',' << (it == s.scores.end() ? std::string() : num(it->second));
    }
    out << '\n';
  }
}

namespace {

SmootherSpec spec_from_json(const json& j, SmootherKind kind, KernelFamily kernel) {
  switch (kind) {
    case SmootherKind::kernel:
      return KernelSmoothing{KernelSpec{kernel, j.value("bandwidth", 0.2)}};
    case SmootherKind::knn:
      return NearestNeighbors{j.value("neighbors", std::size_t{10})};
    case SmootherKind::spline:
      return SmoothingSpline{j.value("lambda", 0.2)};
    case SmootherKind::bin:
      return BinSmoothing{j.value("bins", std::size_t{5})};
  }
  return SmoothingSpline{};
}

}  // namespace

SimScenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("scenario JSON must be an object");
  try {
    SimScenario s;
    s.function = parse_true_function(j.value("function", std::string("m1")));
    s.n = j.value("n", s.n);
    s.error_law = parse_error_law(j.value("error_law", std::string("gaussian")));
    s.replications = j.value("replications", s.replications);
    s.base_seed = j.value("base_seed", s.base_seed);
    s.grid_size = j.value("grid_size", s.grid_size);
    s.mu = j.value("mu", s.mu);
    s.variant = parse_variant(j.value("variant", std::string("plain")));
    s.comparison_candidates = j.value("comparison_candidates", s.comparison_candidates);
    s.jobs = j.value("jobs", s.jobs);

    const SmootherKind kind = parse_smoother_kind(j.value("smoother", std::string("spline")));
    const KernelFamily kernel = parse_kernel_family(j.value("kernel", std::string("gaussian")));
    if (j.contains("pilots")) {
      for (const auto& p : j.at("pilots")) {
        PilotSpec ps{spec_from_json(p, kind, kernel), std::nullopt, 2000};
        if (p.contains("df")) ps.target_df = p.at("df").get<double>();
        ps.max_iterations = p.value("max_iterations", ps.max_iterations);
        s.pilots.push_back(ps);
      }
    } else {
      s.pilots = default_pilots(kind, kernel);
      if (j.contains("pilot_df")) {
        const auto dfs = j.at("pilot_df").get<std::vector<double>>();
        auto base = s.pilots;
        s.pilots.clear();
        for (std::size_t i = 0; i < dfs.size(); ++i) {
          PilotSpec ps = base[std::min(i, base.size() - 1)];
          if (i > 0) ps.max_iterations = 2000;
          ps.target_df = dfs[i];
          s.pilots.push_back(ps);
        }
      }
    }
    if (j.contains("max_iterations")) {
      const auto ms = j.at("max_iterations").get<std::vector<std::size_t>>();
      if (ms.size() != s.pilots.size()) {
        throw InputError("max_iterations must list one value per pilot");
      }
      for (std::size_t i = 0; i < ms.size(); ++i) s.pilots[i].max_iterations = ms[i];
    }

    const auto folds = j.value("folds", std::size_t{5});
    const auto rules = j.value("rules", std::vector<std::string>{"gcv"});
    for (const auto& name : rules) {
      StoppingRule r = parse_rule(name);
      if (name == "cv") {
        if (folds < 2) throw InputError("folds must be at least 2");
        r.fold_size = (s.n + folds - 1) / folds;
      }
      if (r.kind == RuleKind::data_split) {
        r.test_fraction = j.value("split_fraction", 0.5);
        r.seed = j.value("seed", s.base_seed);
      }
      s.rules.push_back(r);
    }
    validate(s);
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario JSON: ") + e.what());
  }
}

SimScenario read_scenario(const std::string& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void write_table_csv(std::ostream& out, const SimSummary& summary) {
  const auto& s = summary.scenario;
  out << "function,n,error,rule";
  for (std::size_t p = 0; p < s.pilots.size(); ++p) {
    out << ",k_hat_" << p + 1 << ",mse_" << p + 1;
  }
  out << ",comparison_mse,failures\n";
  for (const auto& rule : s.rules) {
    out << to_string(s.function) << ',' << s.n << ',' << to_string(s.error_law) << ','
        << rule.label();
    for (std::size_t p = 0; p < s.pilots.size(); ++p) {
      const CellSummary* c = summary.cell(p, rule.label());
      out << ',' << num(c ? c->median_k_hat : NAN) << ',' << num(c ? c->median_mse : NAN);
    }
    out << ',' << num(summary.median_comparison_mse) << ',' << summary.failures << '\n';
  }
}

void write_records_csv(std::ostream& out, const SimSummary& summary) {
  out << "replication,pilot,pilot_spec,pilot_trace,rule,k_hat,mse_k_hat,design_sse_k_hat,"
         "k_opt,mse_k_opt,design_sse_k_opt,log_k_ratio,comparison_mse,diverged,failed,message\n";
  for (const auto& r : summary.records) {
    const double ratio = r.failed || r.k_opt == 0 || r.k_hat == 0
                             ? NAN
                             : std::log(static_cast<double>(r.k_hat) /
                                        static_cast<double>(r.k_opt));
    std::string msg = r.message;
    for (char& c : msg) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << r.replication << ',' << r.pilot + 1 << ",\"" << r.pilot_spec << "\"," << num(r.pilot_trace)
        << ',' << r.rule << ',' << r.k_hat << ',' << num(r.mse_k_hat) << ','
        << num(r.design_sse_k_hat) << ',' << r.k_opt << ',' << num(r.mse_k_opt) << ','
        << num(r.design_sse_k_opt) << ',' << num(ratio) << ',' << num(r.comparison_mse) << ','
        << (r.diverged ? 1 : 0) << ',' << (r.failed ? 1 : 0) << ',' << msg << '\n';
  }
}

}  // namespace boostsmooth::io
