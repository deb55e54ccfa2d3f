#include "boostsmooth/cli.hpp"
#include "boostsmooth/io.hpp"

#include "fixtures.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace boostsmooth;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "boostsmooth");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "boostsmooth_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_sample(const std::string& name, const DesignSample& s) {
  const auto path = (scratch() / name).string();
  std::ofstream f(path);
  f.precision(17);
  f << "x,y\n";
  for (Eigen::Index i = 0; i < s.x().size(); ++i) f << s.x()(i) << ',' << s.y()(i) << '\n';
  return path;
}

std::string write_text(const std::string& name, const std::string& text) {
  const auto path = (scratch() / name).string();
  std::ofstream(path) << text;
  return path;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) row.push_back(f);
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fit with three neighbours on three points returns the mean") {
  const auto path = write_text("three.csv", "x,y\n0,1\n0.5,2\n1,6\n");
  const auto r = run({"fit", path, "--smoother", "knn", "--neighbors", "3"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "fitted"});
  for (int i = 1; i <= 3; ++i) CHECK(std::stod(rows[static_cast<std::size_t>(i)][2]) == doctest::Approx(3.0));
}

TEST_CASE("input errors exit with 2, construction errors with 3") {
  CHECK(run({"fit", write_text("empty.csv", "")}).code == 2);
  CHECK(run({"fit", write_text("header.csv", "x,y\n")}).code == 2);
  CHECK(run({"fit", write_text("bad.csv", "x,y\n0,1\n0.5,abc\n1,2\n")}).code == 2);
  CHECK(run({"fit", (scratch() / "missing.csv").string()}).code == 2);
  CHECK(run({"fit", write_text("two.csv", "x,y\n0,1\n1,2\n")}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"fit", write_text("ok.csv", "x,y\n0,1\n0.5,2\n1,6\n"), "--smoother", "tree"}).code == 2);
  const auto dup = write_text("dup.csv", "x,y\n0,1\n0.5,2\n0.5,3\n1,6\n");
  const auto r = run({"fit", dup, "--smoother", "spline"});
  CHECK(r.code == 3);
  CHECK(r.err.find("error") != std::string::npos);
  const auto far = write_text("far.csv", "x,y\n0,1\n0.5,2\n10,6\n");
  CHECK(run({"fit", far, "--kernel", "uniform", "--bandwidth", "0.1"}).code == 0);
  CHECK(run({"boost", far, "--max-iter", "0"}).code == 2);
  CHECK(run({"boost", far, "--mu", "2"}).code == 2);
}

TEST_CASE("gaussian h = 0.2 pilot nearly flattens the m1 signal") {
  const auto s = fixtures::uniform_sample(50, 2024);
  const auto r = run({"fit", write_sample("m1.csv", s), "--bandwidth", "0.2"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(r.out);
  double lo = 1e300;
  double hi = -1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    lo = std::min(lo, std::stod(rows[i][2]));
    hi = std::max(hi, std::stod(rows[i][2]));
  }
  CHECK(hi - lo < 0.25 * (s.y().maxCoeff() - s.y().minCoeff()));
}

TEST_CASE("boosting knn reports divergence and exits 0") {
  const auto s = fixtures::uniform_sample(50, 7);
  const auto path = write_sample("knn.csv", s);
  const auto r = run({"boost", path, "--smoother", "knn", "--neighbors", "10", "--max-iter", "5000"});
  CHECK(r.code == 0);
  CHECK(r.err.find("diverged") != std::string::npos);
}

TEST_CASE("projection smoother gives a constant residual column") {
  const auto s = fixtures::uniform_sample(40, 8);
  const auto r = run({"boost", write_sample("bin.csv", s), "--smoother", "bin", "--bins", "4",
                      "--max-iter", "30"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(r.out);
  REQUIRE(rows.size() == 31);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][1]) == doctest::Approx(std::stod(rows[1][1])).epsilon(1e-12));
  }
}

TEST_CASE("boost with a rule writes selection and fitted files that re-score exactly") {
  const auto s = fixtures::uniform_sample(50, 9);
  const auto data = write_sample("gauss.csv", s);
  const auto traj = (scratch() / "traj.csv").string();
  for (const char* rule : {"gcv", "aic", "aicc", "aic-literal"}) {
    const auto r = run({"boost", data, "--bandwidth", "0.1", "--max-iter", "400", "--rule", rule,
                        "--out", traj});
    REQUIRE(r.code == 0);
    const auto sel = nlohmann::json::parse(slurp((scratch() / "traj.selection.json").string()));
    CHECK(sel["selected_k"].get<std::size_t>() >= 1);
    CHECK(fs::exists(scratch() / "traj.fitted.csv"));

    const auto again = run({"select", data, "--bandwidth", "0.1", "--max-iter", "400",
                            "--trajectory", traj, "--rule", rule});
    REQUIRE(again.code == 0);
    const auto re = nlohmann::json::parse(again.out).at(0);
    CHECK(re["selected_k"] == sel["selected_k"]);
    const auto& a = sel["scores"];
    const auto& b = re["scores"];
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i]["k"] == b[i]["k"]);
      const double x = a[i]["score"].get<double>();
      const double y = b[i]["score"].get<double>();
      CHECK(std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("select runs cross-validation rules and writes a score table") {
  const auto s = fixtures::uniform_sample(30, 10);
  const auto data = write_sample("sel.csv", s);
  const auto out = (scratch() / "sel.json").string();
  const auto r = run({"select", data, "--smoother", "spline", "--lambda", "0.01", "--max-iter",
                      "100", "--rule", "loocv", "--rule", "cv", "--folds", "5", "--rule", "split",
                      "--seed", "4", "--out", out});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  REQUIRE(j.size() == 3);
  CHECK(j[0]["rule"] == "loocv");
  CHECK(j[1]["rule"] == "cv6");
  CHECK(j[2]["rule"] == "split");
  const auto table = read_csv(slurp((scratch() / "sel.scores.csv").string()));
  CHECK(table[0] == std::vector<std::string>{"k", "loocv", "cv6", "split"});
  CHECK(table.size() == 101);
  const auto again = run({"select", data, "--smoother", "spline", "--lambda", "0.01",
                          "--max-iter", "100", "--rule", "split", "--seed", "4"});
  CHECK(nlohmann::json::parse(again.out)[0]["selected_k"] == j[2]["selected_k"]);
}

TEST_CASE("spectrum report") {
  const auto s = fixtures::uniform_sample(50, 11);
  const auto data = write_sample("spec.csv", s);
  auto r = run({"spectrum", data, "--kernel", "epanechnikov", "--bandwidth", "0.15"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["classification"] == "divergent");
  CHECK(j["max_singular"].get<double>() > 1.0);
  CHECK(j["witness"]["determinant"].get<double>() < 0.0);
  CHECK(j["singular_values"].size() == 20);
  r = run({"spectrum", data, "--smoother", "knn", "--variant", "symmetrized"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["classification"] != "divergent");
  CHECK(j["witness"].is_null());
}

TEST_CASE("simulate writes the table and per-replication records") {
  const auto scen = write_text("scenario.json", R"({
    "function": "m1", "n": 30, "error_law": "student5", "smoother": "kernel",
    "pilot_df": [2.5, 5], "max_iterations": [200, 200],
    "rules": ["gcv", "aicc"], "replications": 10, "base_seed": 3
  })");
  const auto dir = (scratch() / "sim").string();
  const auto r = run({"simulate", scen, "--replications", "2", "--jobs", "2", "--out", dir});
  REQUIRE(r.code == 0);
  const auto table = read_csv(slurp(dir + "/table.csv"));
  CHECK(table[0] == std::vector<std::string>{"function", "n", "error", "rule", "k_hat_1",
                                             "mse_1", "k_hat_2", "mse_2", "comparison_mse",
                                             "failures"});
  REQUIRE(table.size() == 3);
  CHECK(table[1][2] == "student5");
  const auto records = read_csv(slurp(dir + "/records.csv"));
  CHECK(records.size() == 1 + 2 * 2 * 2);
  CHECK(run({"simulate", write_text("bad.json", "{\"n\": ")}).code == 2);
  CHECK(run({"simulate", write_text("bad2.json", "{\"rules\": [\"bic\"]}")}).code == 2);
}

TEST_CASE("scenario parsing") {
  const auto s = io::parse_scenario(R"({"smoother": "spline", "rules": ["gcv", "cv"], "folds": 10})");
  CHECK(s.pilots.size() == 3);
  CHECK(s.pilots[0].max_iterations == 20000);
  CHECK(*s.pilots[2].target_df == 10.0);
  CHECK(s.rules[1].fold_size == 5);
  CHECK(s.replications == 100);
}
