#include "crlab/hessfield.hpp"
#include "crlab/jacobi.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace crlab;
using namespace crlab::elliptic;
using namespace crlab::hessfield;

namespace {

// Q diag(d) Q^T with Q a product of plane rotations.
std::vector<double> rotated(const std::vector<double>& d, oracle::Rng& rng) {
  const std::size_t n = d.size();
  std::vector<double> q(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t r = p + 1; r < n; ++r) {
      const double t = rng.real(0, 6.28), c = std::cos(t), s = std::sin(t);
      for (std::size_t k = 0; k < n; ++k) {
        const double a = q[k * n + p], b = q[k * n + r];
        q[k * n + p] = c * a - s * b;
        q[k * n + r] = s * a + c * b;
      }
    }
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m[i * n + j] += q[i * n + k] * d[k] * q[j * n + k];
  return m;
}

GridField sampled(int dim, double h, const PointFunction& f) {
  return GridField::sample(Grid::box(dim, -1, 1, h), f);
}

GridField solved(const Nonlinearity& nl, int dim, double h, const PointFunction& bc) {
  const Grid g = Grid::box(dim, -1, 1, h);
  SolveResult r = solve(nl, g, bc, harmonic_extension(g, bc));
  EXPECT_TRUE(r.report.converged);
  return r.u;
}

}  // namespace

TEST(Jacobi, KnownSpectrum) {
  oracle::Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 6));
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i) d.push_back(rng.real(-5, 5));
    const auto m = rotated(d, rng);
    const SymmetricEigen e = jacobi_eigen(m, n);
    std::sort(d.begin(), d.end());
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(e.values[i], d[i], 1e-12 * (1 + e.norm));
      trace += m[i * n + i];
    }
    EXPECT_LE(e.off_norm, 1e-13 * e.norm);
    double sum = 0.0;
    for (double v : e.values) sum += v;
    EXPECT_NEAR(sum, trace, 1e-12 * std::max(1.0, e.norm));
  }
  EXPECT_THROW(jacobi_eigen({1, 2, 3}, 2), std::invalid_argument);
}

TEST(Jacobi, DeterminantInvariant) {
  oracle::Rng rng(32);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3;
    std::vector<double> m(9);
    oracle::Matrix qm(3, std::vector<Rational>(3));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const Rational x = rng.any();
        qm[i][j] = qm[j][i] = x;
        m[i * n + j] = m[j * n + i] = x.get_d();
      }
    const SymmetricEigen e = jacobi_eigen(m, n);
    EXPECT_NEAR(e.values[0] * e.values[1] * e.values[2], oracle::gauss_det(qm).get_d(),
                1e-11 * std::pow(1 + e.norm, 3));
  }
}

TEST(Hessian, QuadraticIsExact) {
  const GridField u = sampled(2, 0.125, [](const Point& x) { return x[0] * x[0]; });
  const HessianSample s = hessian_at(u, {5, 9, 0});
  EXPECT_NEAR(s.h(0, 0), 2, 1e-12);
  EXPECT_NEAR(s.h(1, 1), 0, 1e-12);
  EXPECT_NEAR(s.h(0, 1), 0, 1e-12);
  EXPECT_EQ(s.numeric_rank, 1);
}

TEST(Hessian, ZeroFieldRankZero) {
  const HessianSample s = hessian_at(sampled(3, 0.25, [](const Point&) { return 0.0; }), {2, 2, 2});
  EXPECT_EQ(s.numeric_rank, 0);
  for (double v : s.eigenvalues) EXPECT_EQ(v, 0.0);
}

TEST(Hessian, LnCoshAtCenterLine) {
  const double h = 1.0 / 64;
  const GridField u = sampled(2, h, [](const Point& x) { return exact_profile(x[1]); });
  const HessianSample s = hessian_at(u, {64, 64, 0});
  EXPECT_NEAR(s.h(1, 1), 1.0, h * h);
  EXPECT_NEAR(s.h(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(s.sigma[1], 0.0, h * h);
  EXPECT_EQ(s.numeric_rank, 1);
}

TEST(Hessian, BoundaryNodeRejected) {
  const GridField u = sampled(2, 0.25, [](const Point&) { return 0.0; });
  EXPECT_THROW(hessian_at(u, {0, 3, 0}), std::invalid_argument);
}

TEST(Hessian, MinorSumsMatchEigenvalues) {
  oracle::Rng rng(33);
  const GridField u = sampled(3, 0.125, [](const Point& x) {
    return std::exp(0.3 * x[0] - 0.2 * x[1]) + x[0] * x[2] + std::sin(x[1] * x[2]);
  });
  for (int t = 0; t < 50; ++t) {
    const Index idx{static_cast<std::size_t>(rng.integer(1, 15)), static_cast<std::size_t>(rng.integer(1, 15)),
                    static_cast<std::size_t>(rng.integer(1, 15))};
    const HessianSample s = hessian_at(u, idx);
    EXPECT_LE(s.minor_discrepancy(), 1e-10);
    std::vector<double> ev = s.eigenvalues;
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(s.sigma[k - 1], oracle::subset_sigma(ev, k), 1e-12);
  }
}

TEST(Hessian, RankInvariantUnderAxisSwap) {
  const PointFunction f = [](const Point& x) { return std::cosh(x[0]) + 0.3 * x[1] * x[1] * x[1]; };
  const PointFunction g = [&](const Point& x) { return f({x[1], x[0], 0}); };
  const GridField a = sampled(2, 0.0625, f), b = sampled(2, 0.0625, g);
  for (std::size_t i = 1; i < 32; ++i)
    for (std::size_t j = 1; j < 32; ++j)
      EXPECT_EQ(hessian_at(a, {i, j, 0}).numeric_rank, hessian_at(b, {j, i, 0}).numeric_rank);
}

TEST(SigmaMapTest, ConstantHessians) {
  const GridField bowl = sampled(2, 0.125, [](const Point& x) { return (x[0] * x[0] + x[1] * x[1]) / 2; });
  const SigmaMap m = sigma_fieldmap(bowl, 2);
  for (const auto& s : m.samples) EXPECT_NEAR(s.sigma[1], 1.0, 1e-12);
  const GridField slab = sampled(2, 0.125, [](const Point& x) { return x[0] * x[0] / 2; });
  for (const auto& s : sigma_fieldmap(slab, 2).samples) EXPECT_NEAR(s.sigma[1], 0.0, 1e-12);
  EXPECT_THROW(sigma_fieldmap(bowl, 3), std::invalid_argument);
  EXPECT_THROW(sigma_fieldmap(bowl, 0), std::invalid_argument);
}

TEST(SigmaMapTest, RankOneFieldSmall) {
  for (double h : {1.0 / 16, 1.0 / 32}) {
    const GridField u = sampled(2, h, [](const Point& x) { return exact_profile(x[1]); });
    double sup = 0.0;
    for (const auto& s : sigma_fieldmap(u, 2).samples) sup = std::max(sup, std::abs(s.sigma[1]));
    EXPECT_LE(sup, 10 * h * h);
  }
}

TEST(Minima, Definitions) {
  const GridField flat = sampled(2, 0.25, [](const Point&) { return 3.0; });
  EXPECT_EQ(find_local_minima(flat).minima.size(), 7u * 7u);
  const MinimaReport bowl = find_local_minima(sampled(2, 0.25, [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; }));
  ASSERT_EQ(bowl.minima.size(), 1u);
  EXPECT_EQ(bowl.minima[0].first, (Index{4, 4, 0}));
  EXPECT_TRUE(bowl.has_interior);
  const MinimaReport cap = find_local_minima(sampled(2, 0.25, [](const Point& x) { return -(x[0] * x[0] + x[1] * x[1]); }));
  EXPECT_TRUE(cap.minima.empty());
  EXPECT_LT(cap.boundary_min, cap.interior_min);
}

TEST(Minima, MaskedMargin) {
  const GridField bowl = sampled(2, 0.25, [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; });
  std::vector<std::uint8_t> valid(bowl.values.size(), 0);
  for (std::size_t i = 0; i < valid.size(); ++i) valid[i] = bowl.grid.depth(bowl.grid.multi(i)) >= 1;
  const MinimaReport r = find_local_minima(bowl, valid, "bowl");
  EXPECT_EQ(r.minima.size(), 1u);
  EXPECT_EQ(r.to_certificate().claim_id, "minima:bowl");
}

TEST(Probe, RankOneFieldNearZero) {
  const Nonlinearity nl = exp_family(2);
  const double h = 1.0 / 32;
  const GridField u = solved(nl, 2, h, [](const Point& x) { return exact_profile(x[1]); });
  for (std::size_t i = 2; i < 63; i += 7)
    for (std::size_t j = 2; j < 63; j += 5) EXPECT_LE(std::abs(probe_inequality(u, nl, 2, {i, j, 0})), 10 * h);
  EXPECT_THROW(probe_inequality(u, nl, 2, {1, 5, 0}), std::invalid_argument);
}

TEST(Probe, SampledProfileIsSecondOrder) {
  // phi of the exact profile vanishes identically, so the discrete probe is pure truncation.
  const Nonlinearity nl = exp_family(2);
  std::vector<double> sups;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    const GridField u = sampled(2, h, [](const Point& x) { return exact_profile(x[1]); });
    double sup = 0.0;
    const std::size_t n = u.grid.counts[0];
    for (std::size_t i = 2; i + 2 < n; ++i)
      for (std::size_t j = 2; j + 2 < n; ++j) sup = std::max(sup, std::abs(probe_inequality(u, nl, 2, {i, j, 0})));
    sups.push_back(sup);
  }
  EXPECT_LE(sups[1], 1e-10 + sups[0] / 3);
}

TEST(Conclusions, LnCoshDegenerateBranch) {
  const Nonlinearity nl = exp_family(2);
  const double h = 1.0 / 32;
  const GridField u = solved(nl, 2, h, [](const Point& x) { return exact_profile(x[1]); });
  const ConclusionVerdict v = verify_conclusions(u, nl, default_tol(h));
  EXPECT_TRUE(v.applicable);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.min_rank, 1);
  EXPECT_EQ(v.max_rank, 1);
  EXPECT_TRUE(v.sigma2.dichotomy);
  EXPECT_EQ(v.records().back().verdict, Verdict::pass);
}

TEST(Conclusions, StrictlyConvexMinimumOnMargin) {
  const Nonlinearity nl = power_family(2);
  const RadialProfile p(nl, 2, 1.0, 1.5);
  const double h = 1.0 / 32;
  const GridField u = solved(nl, 2, h, [&](const Point& x) { return p(std::hypot(x[0], x[1])); });
  const ConclusionVerdict v = verify_conclusions(u, nl, default_tol(h));
  EXPECT_TRUE(v.applicable);
  EXPECT_GT(v.min_eigenvalue, 0.1);
  EXPECT_TRUE(v.sigma2.min_on_margin);
  EXPECT_TRUE(v.sigma2.no_positive_interior_min);
  EXPECT_TRUE(v.pass);
}

TEST(Conclusions, SaddleInapplicable) {
  const Nonlinearity nl = power_family(2);
  const double h = 1.0 / 16;
  const GridField u = solved(nl, 2, h, [](const Point& x) { return 2 + 0.5 * (x[0] * x[0] - x[1] * x[1]); });
  const ConclusionVerdict v = verify_conclusions(u, nl, default_tol(h));
  EXPECT_FALSE(v.applicable);
  EXPECT_EQ(v.records().back().verdict, Verdict::inapplicable);
}

TEST(Conclusions, ThreeDimensionalRankOne) {
  const Nonlinearity nl = exp_family(2);
  const double h = 1.0 / 8;
  const GridField u = solved(nl, 3, h, [](const Point& x) { return exact_profile(x[2]); });
  const ConclusionVerdict v = verify_conclusions(u, nl, default_tol(h));
  EXPECT_TRUE(v.applicable);
  EXPECT_EQ(v.max_rank, 1);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.sigman.k, 3);
}

TEST(Conclusions, OneDimensionRejected) {
  const GridField u = sampled(1, 0.125, [](const Point&) { return 0.0; });
  EXPECT_THROW(verify_conclusions(u, exp_family(2), 1e-8), std::invalid_argument);
}

TEST(Tolerance, Default) {
  EXPECT_DOUBLE_EQ(default_tol(1.0 / 64), 10.0 / 4096);
  EXPECT_DOUBLE_EQ(default_tol(1e-6), 1e-8);
}
