#include "boostsmooth/stopping.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace boostsmooth;

namespace {

void check_argmin(const SelectionResult& sel) {
  for (const auto& [k, s] : sel.scores) {
    CHECK(sel.scores.at(sel.selected_k) <= s);
    if (s == sel.scores.at(sel.selected_k)) CHECK(sel.selected_k <= k);
  }
}

}  // namespace

TEST_CASE("plug-in criteria formulas") {
  const double s2 = 0.3;
  const double tr = 4.0;
  const std::size_t n = 20;
  CHECK(plug_in_score(RuleKind::aic, s2, tr, n) == doctest::Approx(std::log(0.3) + 0.4));
  CHECK(plug_in_score(RuleKind::aic_literal, s2, tr, n) == doctest::Approx(0.3 + 0.4));
  CHECK(plug_in_score(RuleKind::gcv, s2, tr, n) ==
        doctest::Approx(std::log(0.3) - 2.0 * std::log(0.8)));
  CHECK(plug_in_score(RuleKind::aicc, s2, tr, n) ==
        doctest::Approx(std::log(0.3) + 1.0 + 2.0 * 5.0 / 14.0));
  CHECK(std::isinf(plug_in_score(RuleKind::gcv, s2, 20.0, n)));
  CHECK(std::isinf(plug_in_score(RuleKind::aicc, s2, 18.0, n)));
  CHECK_THROWS_AS(plug_in_score(RuleKind::cv, s2, tr, n), InputError);
}

TEST_CASE("argmin prefers the smallest k on ties") {
  CHECK(argmin_score({{1, 2.0}, {2, 1.0}, {3, 1.0}}) == 2);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(argmin_score({{1, inf}, {2, inf}}), DegenerateCriterionError);
}

TEST_CASE("rule parsing and validation") {
  CHECK(parse_rule("aic-literal").kind == RuleKind::aic_literal);
  CHECK(parse_rule("loocv").label() == "loocv");
  CHECK(StoppingRule::cv(5).label() == "cv5");
  CHECK_THROWS_AS(parse_rule("bic"), InputError);
  CHECK_THROWS_AS(validate(StoppingRule::cv(11), 20), InputError);
  CHECK_NOTHROW(validate(StoppingRule::cv(10), 20));
  CHECK_THROWS_AS(validate(StoppingRule::data_split(1.0, 0), 20), InputError);
  const auto folds = cv_folds(StoppingRule::cv(3), 7);
  REQUIRE(folds.size() == 3);
  CHECK(folds[2] == std::vector<std::size_t>{6});
  const auto test = split_test_set(StoppingRule::data_split(0.5, 42), 20);
  CHECK(test.size() == 10);
  CHECK(test == split_test_set(StoppingRule::data_split(0.5, 42), 20));
}

TEST_CASE("leave-one-out on five points matches the hand computation") {
  Vector x(5);
  x << 0.0, 0.2, 0.45, 0.7, 1.0;
  Vector y(5);
  y << 1.0, -0.5, 2.0, 0.3, 1.4;
  const DesignSample s(x, y);
  const KernelSpec k{KernelFamily::gaussian, 0.3};
  BoostConfig c;
  c.max_iterations = 1;
  for (std::size_t i = 0; i < 5; ++i) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      if (j == i) continue;
      const double u = (x(static_cast<Eigen::Index>(i)) - x(static_cast<Eigen::Index>(j))) / 0.3;
      const double w = std::exp(-0.5 * u * u);
      num += w * y(static_cast<Eigen::Index>(j));
      den += w;
    }
    const Vector p = cv_refit_predict(s, KernelSmoothing{k}, c, {i}, 1);
    REQUIRE(p.size() == 1);
    CHECK(p(0) == doctest::Approx(num / den).epsilon(1e-13));
  }
}

TEST_CASE("empty held-out set returns the full fit") {
  const auto s = fixtures::uniform_sample(20, 1);
  const SmootherSpec spec = KernelSmoothing{KernelSpec{KernelFamily::gaussian, 0.1}};
  BoostConfig c;
  c.max_iterations = 4;
  const Vector p = cv_refit_predict(s, spec, c, {}, 4);
  CHECK(fixtures::rel_err(p, closed_form_fit(build_smoother(s, spec), s.y(), 4)) <= 1e-10);
}

TEST_CASE("knn folds recompute neighbours inside the learning set") {
  const auto s = fixtures::uniform_sample(30, 2);
  BoostConfig c;
  c.max_iterations = 1;
  const std::size_t i = 11;
  const Vector p = cv_refit_predict(s, NearestNeighbors{4}, c, {i}, 1);
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t j = 0; j < 30; ++j) {
    if (j != i) {
      d.emplace_back(std::abs(s.x()(static_cast<Eigen::Index>(j)) -
                              s.x()(static_cast<Eigen::Index>(i))), j);
    }
  }
  std::sort(d.begin(), d.end());
  double mean = 0.0;
  for (int r = 0; r < 4; ++r) mean += s.y()(static_cast<Eigen::Index>(d[static_cast<std::size_t>(r)].second)) / 4.0;
  CHECK(p(0) == doctest::Approx(mean).epsilon(1e-13));
  const double full = build_smoother(s, NearestNeighbors{4}).matrix().row(static_cast<Eigen::Index>(i)).dot(s.y());
  CHECK(p(0) != doctest::Approx(full));
}

TEST_CASE("selection picks the argmin for every rule") {
  const auto s = fixtures::uniform_sample(40, 3);
  const auto sm = build_smoother(s, SmoothingSpline{0.05});
  BoostConfig c;
  c.max_iterations = 300;
  const auto traj = run_boost(sm, s.y(), c);
  for (const auto& rule : {StoppingRule::aic(), StoppingRule::aic_literal(), StoppingRule::aicc(),
                           StoppingRule::gcv(), StoppingRule::loocv(), StoppingRule::cv(4),
                           StoppingRule::data_split(0.5, 9)}) {
    const auto sel = select(traj, sm, s.y(), rule);
    CHECK(sel.scores.size() == traj.checkpoints.size());
    CHECK(sel.selected_k >= 1);
    check_argmin(sel);
  }
}

TEST_CASE("spline residual variance falls and trace grows with k") {
  const auto s = fixtures::uniform_sample(40, 4);
  const auto sm = build_smoother(s, SmoothingSpline{0.5});
  BoostConfig c;
  c.max_iterations = 500;
  const auto traj = run_boost(sm, s.y(), c);
  for (std::size_t i = 1; i < traj.checkpoints.size(); ++i) {
    CHECK(traj.checkpoints[i].residual_norm <= traj.checkpoints[i - 1].residual_norm + 1e-12);
    CHECK(*traj.checkpoints[i].trace >= *traj.checkpoints[i - 1].trace - 1e-12);
  }
}

TEST_CASE("gcv never selects an interpolating iteration") {
  const auto s = fixtures::uniform_sample(30, 5);
  const auto sm = build_smoother(s, KernelSmoothing{KernelSpec{KernelFamily::gaussian, 0.02}});
  BoostConfig c;
  c.max_iterations = 2000;
  const auto traj = run_boost(sm, s.y(), c);
  const auto sel = select(traj, sm, s.y(), StoppingRule::gcv());
  CHECK(*traj.at(sel.selected_k)->trace / 30.0 < 1.0 - 1e-9);
}

TEST_CASE("projection smoother with data split selects the first iteration") {
  Vector x = Vector::LinSpaced(40, 0.0, 1.0);
  Vector y = x.array().square();
  const DesignSample s(x, y);
  const auto sm = build_smoother(s, BinSmoothing{4});
  BoostConfig c;
  c.max_iterations = 50;
  const auto traj = run_boost(sm, y, c);
  CHECK(select(traj, sm, y, StoppingRule::data_split(0.5, 3)).selected_k == 1);
}

TEST_CASE("cv score does not depend on observation order") {
  const auto s = fixtures::uniform_sample(24, 6);
  std::vector<std::size_t> fold(24);
  for (std::size_t i = 0; i < 24; ++i) fold[i] = (i * 7) % 4;
  StoppingRule rule = StoppingRule::cv(1);
  rule.fold_of = fold;
  const SmootherSpec spec = KernelSmoothing{KernelSpec{KernelFamily::gaussian, 0.1}};
  BoostConfig c;
  c.max_iterations = 30;
  const auto sm = build_smoother(s, spec);
  const auto a = select(run_boost(sm, s.y(), c), sm, s.y(), rule);

  std::vector<Eigen::Index> perm(24);
  for (Eigen::Index i = 0; i < 24; ++i) perm[static_cast<std::size_t>(i)] = (i * 5 + 3) % 24;
  Vector px(24);
  Vector py(24);
  StoppingRule prule = rule;
  for (std::size_t i = 0; i < 24; ++i) {
    px(static_cast<Eigen::Index>(i)) = s.x()(perm[i]);
    py(static_cast<Eigen::Index>(i)) = s.y()(perm[i]);
    prule.fold_of[i] = fold[static_cast<std::size_t>(perm[i])];
  }
  const DesignSample ps(px, py);
  const auto psm = build_smoother(ps, spec);
  const auto b = select(run_boost(psm, py, c), psm, py, prule);
  for (const auto& [k, v] : a.scores) CHECK(b.scores.at(k) == doctest::Approx(v).epsilon(1e-10));
}

TEST_CASE("plug-in rules need traces") {
  const auto s = fixtures::uniform_sample(210, 7);
  const auto sm = build_smoother(s, NearestNeighbors{30});
  BoostConfig c;
  c.max_iterations = 3;
  const auto traj = run_boost(sm, s.y(), c);
  CHECK_THROWS_AS(select(traj, sm, s.y(), StoppingRule::gcv()), TraceUnavailableError);
  CHECK_NOTHROW(select(traj, sm, s.y(), StoppingRule::cv(21)));
}

TEST_CASE("selection after divergence uses the recorded prefix") {
  const auto s = fixtures::uniform_sample(50, 8);
  const auto sm = build_smoother(s, NearestNeighbors{10});
  BoostConfig c;
  c.max_iterations = 3000;
  const auto traj = run_boost(sm, s.y(), c);
  REQUIRE(traj.diverged);
  const auto sel = select(traj, sm, s.y(), StoppingRule::gcv());
  CHECK(sel.selected_k < traj.diverged_at);
  CHECK_FALSE(sel.warnings.empty());
}
