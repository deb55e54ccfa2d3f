#include "boostsmooth/spectral.hpp"

#include "fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <doctest.h>

using namespace boostsmooth;

TEST_CASE("classification thresholds") {
  CHECK(classify(0.99) == Convergence::convergent);
  CHECK(classify(1.0 + 5e-9) == Convergence::boundary);
  CHECK(classify(1.0 - 5e-9) == Convergence::boundary);
  CHECK(classify(1.001) == Convergence::divergent);
}

TEST_CASE("uniform kernel minor oracle") {
  const KernelSpec k{KernelFamily::uniform, 1.0};
  CHECK(minor_determinant(k, 0.0, 0.6, 1.2) == doctest::Approx(-0.125).epsilon(1e-12));
  Vector x(3);
  x << 1.2, 0.0, 0.6;
  const auto w = principal_minor_witness(DesignSample(x, x), k);
  REQUIRE(w);
  CHECK(w->indices == std::array<std::size_t, 3>{1, 2, 0});
  CHECK(std::abs(w->determinant + 0.125) <= 1e-12);
}

TEST_CASE("positive definite kernels have no witness") {
  const auto s = fixtures::uniform_sample(20, 1);
  CHECK_THROWS_AS(principal_minor_witness(s, KernelSpec{KernelFamily::gaussian, 0.2}),
                  NotApplicableError);
  CHECK_THROWS_AS(principal_minor_witness(s, KernelSpec{KernelFamily::triangular, 0.2}),
                  NotApplicableError);
}

TEST_CASE("epanechnikov triples inside one bandwidth have negative minors") {
  const KernelSpec k{KernelFamily::epanechnikov, 1.0};
  for (double a : {0.1, 0.4, 0.9}) {
    for (double b : {0.05, 0.3}) {
      if (a + b < 1.0) CHECK(minor_determinant(k, 0.0, a, a + b) < 0.0);
    }
  }
}

TEST_CASE("spectrum of A matches the spectrum of S") {
  const auto s = fixtures::uniform_sample(50, 2);
  const auto sm = build_smoother(s, KernelSmoothing{KernelSpec{KernelFamily::epanechnikov, 0.15}});
  Vector a = Eigen::SelfAdjointEigenSolver<Matrix>(sm.symmetric_form()->sym).eigenvalues();
  Eigen::EigenSolver<Matrix> es(sm.matrix());
  Vector b = es.eigenvalues().real();
  CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() <= 1e-8);
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("known classifications") {
  const auto s = fixtures::uniform_sample(50, 3);
  const auto knn = analyze(build_smoother(s, NearestNeighbors{10}));
  CHECK(knn.max_singular > 1.0);
  CHECK(knn.classification == Convergence::divergent);

  const auto epa =
      analyze(build_smoother(s, KernelSmoothing{KernelSpec{KernelFamily::epanechnikov, 0.15}}));
  CHECK(epa.max_singular > 1.0);
  CHECK(epa.witness.has_value());

  // On random designs the Gaussian Gram matrix has eigenvalues at rounding
  // level, so only the sign bound is checked there.
  const auto gau =
      analyze(build_smoother(s, KernelSmoothing{KernelSpec{KernelFamily::gaussian, 0.05}}));
  REQUIRE(gau.symmetric_equivalent_eigenvalues);
  CHECK(gau.symmetric_equivalent_eigenvalues->minCoeff() > -1e-12);
  CHECK(gau.symmetric_equivalent_eigenvalues->maxCoeff() <= 1.0 + 1e-12);
  CHECK(gau.classification != Convergence::divergent);
  CHECK_FALSE(gau.witness.has_value());

  const Vector grid = Vector::LinSpaced(50, 0.0, 1.0);
  const auto reg = analyze(build_smoother(
      DesignSample(grid, grid), KernelSmoothing{KernelSpec{KernelFamily::gaussian, 0.5 / 49.0}}));
  CHECK(reg.symmetric_equivalent_eigenvalues->minCoeff() > 1e-3);
  CHECK(reg.classification == Convergence::convergent);
  CHECK(reg.max_singular < 1.0);

  // lines pass through a spline unchanged, so I - S has eigenvalue 0 and
  // the smallest eigenvalues of S are numerically zero
  const auto spl = analyze(build_smoother(s, SmoothingSpline{0.2}));
  CHECK(spl.symmetric_equivalent_eigenvalues->minCoeff() >= -1e-8);
  CHECK(spl.symmetric_equivalent_eigenvalues->maxCoeff() <= 1.0 + 1e-8);
  CHECK(spl.classification != Convergence::divergent);

  const auto bin = analyze(build_smoother(s, BinSmoothing{5}));
  CHECK(bin.classification == Convergence::boundary);
}

TEST_CASE("classification predicts the boosting dynamics") {
  const auto s = fixtures::uniform_sample(50, 4);
  const std::vector<SmootherSpec> specs = {
      KernelSmoothing{KernelSpec{KernelFamily::gaussian, 0.05}},
      KernelSmoothing{KernelSpec{KernelFamily::gaussian, 0.1}},
      KernelSmoothing{KernelSpec{KernelFamily::epanechnikov, 0.15}},
      KernelSmoothing{KernelSpec{KernelFamily::uniform, 0.1}},
      NearestNeighbors{10}, NearestNeighbors{4}};
  for (const auto& spec : specs) {
    const auto sm = build_smoother(s, spec);
    const auto rep = analyze(sm);
    BoostConfig c;
    c.max_iterations = 500;
    c.compute_trace = false;
    const auto traj = run_boost(sm, s.y(), c);
    const auto& r = traj.residual_norms;
    if (rep.classification == Convergence::divergent) {
      const bool grows = traj.diverged || r.back() > r[r.size() - 100];
      CHECK_MESSAGE(grows, describe(spec));
    } else if (rep.classification == Convergence::convergent) {
      bool mono = true;
      for (std::size_t i = 1; i < r.size(); ++i) mono = mono && r[i] <= r[i - 1];
      CHECK_MESSAGE(mono, describe(spec));
    }
  }
}

TEST_CASE("negative minor implies a singular value above one") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = fixtures::uniform_sample(40, 100 + seed);
    for (auto fam : {KernelFamily::uniform, KernelFamily::epanechnikov}) {
      const KernelSpec k{fam, 0.15};
      const auto w = principal_minor_witness(s, k);
      if (w) CHECK(analyze(build_smoother(s, KernelSmoothing{k})).max_singular > 1.0);
    }
  }
}

TEST_CASE("symmetrized variant") {
  const auto s = fixtures::uniform_sample(50, 5);
  // contractions: I - S S^t has spectrum in [0, 1]
  for (const SmootherSpec& spec : {SmootherSpec{SmoothingSpline{0.05}}, SmootherSpec{BinSmoothing{5}}}) {
    const auto sm = build_smoother(s, spec);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(
                          Matrix::Identity(50, 50) - sm.matrix() * sm.matrix().transpose())
                          .eigenvalues();
    CHECK(ev.minCoeff() >= -1e-8);
    CHECK(ev.maxCoeff() <= 1.0 + 1e-8);
    CHECK(analyze(sm, 1.0, BoostVariant::symmetrized).classification != Convergence::divergent);
  }
  // Row-stochastic smoothers that are not doubly stochastic have
  // ||S||_2 > 1, so I - S S^t dips below zero; it stays above -1 here, which
  // is what keeps the symmetrized recursion bounded.
  for (const SmootherSpec& spec :
       {SmootherSpec{NearestNeighbors{10}},
        SmootherSpec{KernelSmoothing{KernelSpec{KernelFamily::epanechnikov, 0.15}}}}) {
    const auto sm = build_smoother(s, spec);
    const Eigen::JacobiSVD<Matrix> svd(sm.matrix());
    const double smax = svd.singularValues()(0);
    CHECK(smax > 1.0);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(
                          Matrix::Identity(50, 50) - sm.matrix() * sm.matrix().transpose())
                          .eigenvalues();
    CHECK(ev.minCoeff() == doctest::Approx(1.0 - smax * smax).epsilon(1e-9));
    CHECK(ev.minCoeff() > -1.0);
    CHECK(ev.maxCoeff() <= 1.0 + 1e-8);
    const auto rep = analyze(sm, 1.0, BoostVariant::symmetrized);
    CHECK(rep.classification != Convergence::divergent);
  }
}
