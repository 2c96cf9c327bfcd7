#include "crlab/certify.hpp"
#include "crlab/suites.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace crlab;
using namespace crlab::certify;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

RSpectrum spec(std::initializer_list<Rational> v) { return RSpectrum(std::vector<Rational>(v)); }

// (1 + 2q) B_i(q) written out by hand.
std::pair<Rational, Rational> cleared_by_hand(const Rational& x, const Rational& A) {
  const Rational d = 1 + 2 * x;
  return {d * (-4 * x * x - 2 * x) + A * x, d * (-4 * x * x - 6 * x - 2) + A * (1 + x)};
}

Rational horner(const std::array<Rational, 4>& c, const Rational& x) {
  Rational v(0);
  for (const auto& a : c) v = v * x + a;
  return v;
}

}  // namespace

// ---- dimension two -------------------------------------------------------

TEST(EvalB, Values) {
  EXPECT_EQ(eval_B(q(0), q(2)), std::make_pair(q(0), q(0)));
  EXPECT_EQ(eval_B(q(1), q(2)), std::make_pair(q(-16, 3), q(-32, 3)));
  EXPECT_EQ(eval_B(q(0), q(21, 10)), std::make_pair(q(0), q(1, 10)));
  EXPECT_THROW(eval_B(q(-1), q(2)), std::invalid_argument);
}

TEST(ClearedB, CoefficientsAtTwo) {
  const ClearedB c = cleared_B_polynomials(q(2));
  EXPECT_EQ(c.p1, (std::array<Rational, 4>{q(-8), q(-8), q(0), q(0)}));
  EXPECT_EQ(c.p2, (std::array<Rational, 4>{q(-8), q(-16), q(-8), q(0)}));
}

TEST(ClearedB, MatchesEvaluationAtFivePoints) {
  for (const Rational& A : {q(0), q(1), q(2), q(21, 10), q(3)}) {
    const ClearedB c = cleared_B_polynomials(A);
    for (const Rational& x : {q(0), q(1, 3), q(1), q(5, 2), q(7)}) {
      const auto [p1, p2] = cleared_by_hand(x, A);
      EXPECT_EQ(horner(c.p1, x), p1);
      EXPECT_EQ(horner(c.p2, x), p2);
    }
  }
}

TEST(CertifyB, PassesUpToTwoAndWitnessAbove) {
  for (const Rational& A : {q(0), q(1, 2), q(1), q(3, 2), q(2)})
    EXPECT_EQ(certify_B_nonpositive(A).verdict, Verdict::pass) << A;
  for (const Rational& A : {q(201, 100), q(21, 10), q(5, 2), q(3)}) {
    const Certificate c = certify_B_nonpositive(A);
    ASSERT_EQ(c.verdict, Verdict::sharpness_witness) << A;
    ASSERT_TRUE(c.witness);
    EXPECT_EQ(std::get<Rational>((*c.witness)[0]), 0);
    EXPECT_EQ(std::get<Rational>((*c.witness)[2]), A - 2);
    EXPECT_GT(cleared_by_hand(q(0), A).second, 0);
  }
}

TEST(Dim2Identity, Examples) {
  const Certificate a = verify_dim2_gradient_identity({q(1), q(2), q(1), q(-1), q(1), q(0)});
  EXPECT_EQ(a.verdict, Verdict::pass);
  EXPECT_EQ(std::get<Rational>(*a.find("direct")), 7);  // (1+1)^2 + 3

  const Certificate b = verify_dim2_gradient_identity({q(0), q(2), q(1), q(-1), q(0), q(0)});
  EXPECT_EQ(b.verdict, Verdict::pass);
  EXPECT_EQ(std::get<Rational>(*b.find("direct")), 0);

  // q = 2, G' = -3, Du = (1, 1): weights (1+q)^2 + 3q^2 = 21 on u1^2 and
  // 3(1+q)^2 + q^2 = 31 on u2^2, so |D^3u|^2 = 9 (21 + 31) = 468.
  const Certificate c = verify_dim2_gradient_identity({q(2), q(2), q(1), q(-3), q(1), q(1)});
  EXPECT_EQ(c.verdict, Verdict::pass);
  EXPECT_EQ(std::get<Rational>(*c.find("direct")), 468);
  EXPECT_EQ(std::get<Rational>(*c.find("isotropic_form_residual")), 468 - 378);
}

TEST(Dim2Identity, ThirdDerivativesBySquares) {
  oracle::Rng rng(21);
  for (int t = 0; t < 300; ++t) {
    AnsatzPoint2D pt{rng.positive(), q(2), rng.positive(), -rng.positive(), rng.any(), rng.any()};
    const auto d = dim2_third_derivatives(pt);
    const Rational direct = d.u111 * d.u111 + 3 * d.u112 * d.u112 + 3 * d.u122 * d.u122 + d.u222 * d.u222;
    const Certificate c = verify_dim2_gradient_identity(pt);
    ASSERT_EQ(c.verdict, Verdict::pass);
    ASSERT_EQ(std::get<Rational>(*c.find("direct")), direct);
  }
}

TEST(Dim2Inequality, RoutesAgreeOnExamples) {
  const auto a = dim2_inequality_routes({q(1), q(2), q(1), q(-1), q(1), q(0)});
  EXPECT_EQ(a.chain, q(-32, 3));
  EXPECT_EQ(a.b_form, q(-32, 3));
  const auto b = dim2_inequality_routes({q(1), q(2), q(1), q(-1), q(0), q(1)});
  EXPECT_EQ(b.chain, q(-64, 3));
  EXPECT_EQ(b.b_form, q(-64, 3));
  const auto z = dim2_inequality_routes({q(1), q(2), q(1), q(-1), q(0), q(0)});
  EXPECT_EQ(z.chain, 0);
}

TEST(Dim2Inequality, RouteEquivalenceAndSign) {
  oracle::Rng rng(22);
  for (int t = 0; t < 1000; ++t) {
    const Rational A = rng.integer(0, 1) ? q(2) : make_rational(rng.integer(0, 20), 10);
    AnsatzPoint2D pt{rng.positive(), A, rng.positive(), -rng.positive(), rng.any(), rng.any()};
    const auto r = dim2_inequality_routes(pt);
    ASSERT_EQ(r.chain, r.b_form);
    ASSERT_LE(r.chain, 0);
    ASSERT_TRUE(assemble_dim2_inequality(pt).ok());
  }
}

TEST(Dim2Inequality, PositiveJustAboveTwo) {
  // q near 0 with u2 != 0 gives 2 u2^2 G'^2 B2(q) > 0 once A > 2.
  const auto r = dim2_inequality_routes({q(1, 1000), q(21, 10), q(1), q(-1), q(0), q(1)});
  EXPECT_GT(r.chain, 0);
  EXPECT_EQ(r.chain, r.b_form);
}

// ---- sigma_2 --------------------------------------------------------------

TEST(Sigma2, ZeroThirdDerivatives) {
  const Sigma2Pieces p = sigma2_pieces(0, std::vector<Rational>{0, 0, 0}, spec({q(1), q(2), q(3)}));
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(p.defining[t], 0);
    EXPECT_EQ(p.rewritten[t], 0);
  }
}

TEST(Sigma2, SmallExample) {
  const Sigma2Pieces p = sigma2_pieces(0, std::vector<Rational>{0, 1, -1}, spec({q(1), q(1), q(1)}));
  EXPECT_EQ(p.defining[0], p.rewritten[0]);
  EXPECT_EQ(verify_sigma2_sos(0, std::vector<Rational>{0, 1, -1}, spec({q(1), q(1), q(1)})).verdict, Verdict::pass);
}

TEST(Sigma2, RandomIdentityAndSign) {
  oracle::Rng rng(23);
  for (int n = 3; n <= 6; ++n) {
    for (int t = 0; t < 250; ++t) {
      const RSpectrum lam(rng.vec(static_cast<std::size_t>(n), true));
      const auto third = rng.vec(static_cast<std::size_t>(n));
      const auto i = static_cast<std::size_t>(rng.integer(0, n - 1));
      const Sigma2Pieces p = sigma2_pieces(i, third, lam);
      for (int k = 0; k < 3; ++k) {
        ASSERT_EQ(p.defining[k], p.rewritten[k]);
        ASSERT_LE(p.rewritten[k], 0);
      }
      ASSERT_EQ(p.bracket_raw, p.bracket_expanded);
      ASSERT_EQ(verify_sigma2_sos(i, third, lam).verdict, Verdict::pass);
    }
  }
}

TEST(Sigma2, CoefficientExpansions) {
  const Certificate two = certify_sigma2_coefficient_expansions(spec({q(1), q(1)}), 0, 1, std::nullopt, q(2));
  EXPECT_EQ(two.verdict, Verdict::pass);
  EXPECT_EQ(std::get<Rational>(*two.find("diagonal")), -8);
  const Certificate zero =
      certify_sigma2_coefficient_expansions(spec({q(0), q(0), q(0), q(0)}), 0, 1, 2, q(2));
  EXPECT_EQ(std::get<Rational>(*zero.find("diagonal")), 0);
  EXPECT_EQ(std::get<Rational>(*zero.find("mixed")), 0);
  const Certificate four =
      certify_sigma2_coefficient_expansions(spec({q(1), q(2), q(3), q(4)}), 0, 1, 2, q(2));
  EXPECT_EQ(four.residual, ScalarValue(Rational(0)));
  // Diagonal coefficient by hand: G = 10, -2 * 10 * (20 - 3) + 2 * 1 = -338.
  EXPECT_EQ(std::get<Rational>(*four.find("diagonal")), -338);
}

// ---- sigma_n --------------------------------------------------------------

TEST(Completion, Examples) {
  const auto s = complete_third_derivatives(spec({q(1), q(1), q(1)}), 2, {q(1), q(1)}, 3);
  EXPECT_EQ(s.completed_ummm, -2);
  const auto z = complete_third_derivatives(spec({q(1), q(2), q(3)}), 0, {q(0), q(0)}, 3);
  EXPECT_EQ(z.completed_ummm, 0);
  EXPECT_NO_THROW(complete_third_derivatives(spec({q(1), q(0), q(3)}), 1, {q(1), q(1)}, 3));
  EXPECT_THROW(complete_third_derivatives(spec({q(0), q(1), q(0)}), 1, {q(1), q(1)}, 3), SingularConstraint);
}

TEST(Completion, SatisfiesConstraint) {
  oracle::Rng rng(24);
  for (int t = 0; t < 200; ++t) {
    const int n = static_cast<int>(rng.integer(3, 6));
    const auto v = rng.vec(static_cast<std::size_t>(n), true);
    const auto m = static_cast<std::size_t>(rng.integer(0, n - 1));
    const auto b = rng.vec(static_cast<std::size_t>(n - 1));
    const auto s = complete_third_derivatives(RSpectrum(v), m, b, n);
    // sum_i sigma_{n-1}(lambda|i) u_iim = 0, minors by subsets.
    Rational total(0);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::vector<Rational> rest;
      for (std::size_t j = 0; j < v.size(); ++j)
        if (j != i) rest.push_back(v[j]);
      const Rational u = i == m ? s.completed_ummm : b[slot++];
      total += oracle::subset_sigma(rest, n - 1) * u;
    }
    ASSERT_EQ(total, 0);
  }
}

TEST(ACoefficients, Examples) {
  const auto s1 = complete_third_derivatives(spec({q(1), q(1), q(5)}), 2, {q(1), q(-1)}, 3);
  EXPECT_EQ(eval_a_coefficients(s1, q(3, 2)).a1, -2);
  const auto s2 = complete_third_derivatives(spec({q(1), q(1), q(5)}), 2, {q(1), q(1)}, 3);
  EXPECT_EQ(eval_a_coefficients(s2, q(3, 2)).a1, 0);
  const auto s0 = complete_third_derivatives(spec({q(1), q(2), q(3)}), 1, {q(0), q(0)}, 3);
  const ACoefficients a = eval_a_coefficients(s0, q(3, 2));
  EXPECT_EQ(a.a1, 0);
  EXPECT_EQ(a.a2, 0);
  EXPECT_EQ(a.a3, 0);
}

TEST(ACoefficients, ExpansionIdentity) {
  oracle::Rng rng(25);
  for (int t = 0; t < 200; ++t) {
    const int n = static_cast<int>(rng.integer(3, 6));
    const RSpectrum lam(rng.vec(static_cast<std::size_t>(n), true));
    const auto m = static_cast<std::size_t>(rng.integer(0, n - 1));
    const auto s = complete_third_derivatives(lam, m, rng.vec(static_cast<std::size_t>(n - 1)), n);
    ASSERT_EQ(verify_a_expansion(s, make_rational(n, n - 1)).verdict, Verdict::pass);
  }
}

TEST(MinorFormula, GaussianEliminationAgrees) {
  oracle::Rng rng(26);
  for (int t = 0; t < 100; ++t) {
    const Rational alpha = rng.any(30, 11);
    for (int k = 1; k <= 8; ++k) {
      const auto m = threshold_matrix(alpha, static_cast<std::size_t>(k));
      // L_k = (alpha + 1) I - J.
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) ASSERT_EQ(m[i][j], (i == j ? alpha : Rational(-1)));
      const Rational det = oracle::gauss_det(m);
      ASSERT_EQ(det, closed_form_minor(alpha, k));
      ASSERT_EQ(det, cofactor_determinant(m));
    }
    ASSERT_EQ(certify_minor_formula(alpha, 8).verdict, Verdict::pass);
  }
}

TEST(MinorFormula, CofactorOnRandomMatrices) {
  oracle::Rng rng(27);
  for (int t = 0; t < 50; ++t) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 7));
    oracle::Matrix m(n, std::vector<Rational>(n));
    for (auto& row : m)
      for (auto& x : row) x = rng.any();
    ASSERT_EQ(cofactor_determinant(m), oracle::gauss_det(m));
  }
}

TEST(A1Threshold, Examples) {
  EXPECT_EQ(certify_a1_threshold(3, q(3, 2)).verdict, Verdict::pass);
  EXPECT_EQ(certify_a1_threshold(4, q(4, 3)).verdict, Verdict::pass);
  EXPECT_EQ(closed_form_minor(q(2), 3), 0);
  const Certificate c = certify_a1_threshold(3, q(8, 5));
  ASSERT_EQ(c.verdict, Verdict::fail);
  ASSERT_TRUE(c.witness);
  EXPECT_EQ(c.witness->size(), 2u);
  for (const auto& w : *c.witness) EXPECT_EQ(std::get<Rational>(w), 1);
}

TEST(A1Threshold, ExactlyUpToNOverNMinusOne) {
  for (int n = 3; n <= 6; ++n)
    for (int s = 21; s <= 39; ++s) {
      const Rational A = q(s, 20);
      const Certificate c = certify_a1_threshold(n, A);
      EXPECT_EQ(c.verdict == Verdict::pass, A <= q(n, n - 1)) << n << " " << A;
    }
}

TEST(A2, Examples) {
  const std::vector<Rational> zero{0, 0, 0}, p{q(1, 3), q(1, 3), q(1, 3)};
  const A2Forms z = a2_forms(zero, p, q(7, 5));
  EXPECT_EQ(z.reduced, 0);
  EXPECT_EQ(z.completed, 0);
  const std::vector<Rational> y{1, -1, 0};
  const A2Forms f = a2_forms(y, p, q(7, 5));
  ASSERT_TRUE(f.direct);
  EXPECT_EQ(*f.direct, f.reduced);
  EXPECT_EQ(f.reduced, f.completed);
  EXPECT_GE(f.reduced, 0);
  EXPECT_EQ(verify_a2_identity_and_sign(y, p, q(7, 5)).verdict, Verdict::pass);
}

TEST(A2, SymmetrizedMatrixAtHalf) {
  // [[2+5p, 1+3p], [1+3p', 2+5p']] at p = p' = 1/2, symmetrized.
  const Rational p = q(1, 2);
  const Rational d = 2 + 5 * p, off = (1 + 3 * p + 1 + 3 * p) / 2;
  EXPECT_EQ(d, q(9, 2));
  EXPECT_EQ(off, q(5, 2));
  EXPECT_EQ(d * d - off * off, 14);
  EXPECT_EQ(certify_a2_n3_definiteness(q(3, 2), 100).verdict, Verdict::pass);
}

TEST(A2, RandomIdentity) {
  oracle::Rng rng(28);
  for (int t = 0; t < 500; ++t) {
    const auto r = static_cast<std::size_t>(rng.integer(2, 5));
    const auto y = rng.vec(r);
    auto w = rng.vec(r, true);
    Rational total(0);
    for (const auto& x : w) total += x;
    for (auto& x : w) x /= total;
    const Rational A = make_rational(rng.integer(10, 14), 10);
    const A2Forms f = a2_forms(y, w, A);
    ASSERT_TRUE(f.direct);
    ASSERT_EQ(*f.direct, f.reduced);
    ASSERT_EQ(f.reduced, f.completed);
    if (A * A <= 2) ASSERT_GE(f.reduced, 0);
  }
}

TEST(A3, Examples) {
  const std::vector<Rational> b0{0, 0}, l1{1, 1}, l2{1, 4}, b1{1, 1};
  EXPECT_EQ(a3_forms(l1, b0, q(2)).first, 0);
  const auto [d1, p1] = a3_forms(l1, b1, q(2));
  EXPECT_EQ(d1, 0);
  EXPECT_EQ(p1, 0);
  // Over ordered pairs i != j: -2(4/1 + 1/4) + 2 * 2 = -9/2.
  const auto [d2, p2] = a3_forms(l2, b1, q(2));
  EXPECT_EQ(d2, q(-9, 2));
  EXPECT_EQ(p2, q(-9, 2));
}

TEST(A3, DefiningFormByHand) {
  oracle::Rng rng(29);
  for (int t = 0; t < 2000; ++t) {
    const auto r = static_cast<std::size_t>(rng.integer(2, 5));
    const auto lam = rng.vec(r, true);
    const auto b = rng.vec(r);
    Rational total(0), value(0);
    for (const auto& x : lam) total += x;
    for (std::size_t i = 0; i < r; ++i) {
      value += -2 * b[i] * b[i] * (total - lam[i]) / lam[i];
      for (std::size_t j = 0; j < r; ++j)
        if (j != i) value += 2 * b[i] * b[j];
    }
    const auto [d, p] = a3_forms(lam, b, q(2));
    ASSERT_EQ(d, value);
    ASSERT_EQ(p, value);
    ASSERT_LE(value, 0);
  }
}

TEST(Combined, QuadraticInLambdaM) {
  const ACoefficients a{q(-1), q(-2), q(-3)};
  EXPECT_EQ(combined_sigman_value(a, q(2)), -4 - 4 - 3);
}

// ---- suites ----------------------------------------------------------------

TEST(Suites, DefaultsAllAccepted) {
  suites::SuiteOptions o;
  o.seed = 5;
  o.quick = true;
  for (const auto& c : suites::run_suite("all", o)) EXPECT_TRUE(c.ok()) << c.claim_id << ": " << c.notes;
}

TEST(Suites, LiouvilleCaseAccepted) {
  suites::SuiteOptions o;
  o.quick = true;
  o.A = q(1);
  for (const auto& c : suites::run_suite("all", o)) EXPECT_TRUE(c.ok()) << c.claim_id;
}

TEST(Suites, ThresholdFailsAboveThreeHalves) {
  suites::SuiteOptions o;
  o.quick = true;
  o.n = 3;
  o.A = q(8, 5);
  bool a1_failed = false;
  for (const auto& c : suites::run_suite("sigman", o))
    if (c.claim_id == "sigman-a1-threshold") a1_failed = c.verdict == Verdict::fail;
  EXPECT_TRUE(a1_failed);
}

TEST(Suites, UnknownSuiteRejected) {
  EXPECT_THROW(suites::run_suite("dim4", {}), std::invalid_argument);
  suites::SuiteOptions o;
  o.n = 2;
  EXPECT_THROW(suites::sigman_dimensions(o), std::invalid_argument);
}

TEST(Suites, QuickDividesTrials) {
  suites::SuiteOptions full, quick;
  quick.quick = true;
  const auto trials = [](const Certificate& c) { return std::get<std::int64_t>(*c.find("trials")); };
  EXPECT_EQ(trials(suites::dim2_inequality(full)), 10 * trials(suites::dim2_inequality(quick)));
}

TEST(Suites, SeedDeterminism) {
  suites::SuiteOptions a, b, c;
  a.seed = b.seed = 77;
  c.seed = 78;
  a.quick = b.quick = c.quick = true;
  const auto ra = suites::run_suite("sigman", a), rb = suites::run_suite("sigman", b),
             rc = suites::run_suite("sigman", c);
  ASSERT_EQ(ra.size(), rc.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(to_json(ra[i]).dump(), to_json(rb[i]).dump());
    EXPECT_EQ(ra[i].verdict, rc[i].verdict);
  }
}

TEST(Records, JsonRoundTrip) {
  Certificate c("x");
  c.with("r", q(3, 4)).with("f", 0.25).with("i", std::int64_t{3}).with("s", std::string("t")).with("b", true);
  c.witness = std::vector<ScalarValue>{q(1, 3), 2.5};
  c.residual = q(0);
  c.verdict = Verdict::sharpness_witness;
  const Certificate back = certificate_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_TRUE(std::holds_alternative<Rational>((*back.witness)[0]));
  EXPECT_TRUE(std::holds_alternative<double>((*back.witness)[1]));
}
