#include "crlab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crlab::certify {

namespace {

// Dense polynomial in q, index = degree.
using Poly = std::vector<Rational>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

Rational evaluate(const Poly& p, const Rational& q) {
  Rational acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * q + *it;
  return acc;
}

std::array<Rational, 4> highest_first(Poly p) {
  p.resize(4, Rational(0));
  return {p[3], p[2], p[1], p[0]};
}

Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }

}  // namespace

void AnsatzPoint2D::validate() const {
  if (q < 0) throw std::invalid_argument("ansatz point requires q >= 0");
  if (G <= 0) throw std::invalid_argument("ansatz point requires G > 0");
  if (Gp >= 0) throw std::invalid_argument("ansatz point requires G' < 0");
}

ClearedB cleared_B_polynomials(const Rational& A) {
  const Poly one_plus_2q{Rational(1), Rational(2)};
  // (1+2q) B1 = (1+2q)(-4q^2 - 2q) + A q
  Poly p1 = add(multiply(one_plus_2q, Poly{Rational(0), Rational(-2), Rational(-4)}), Poly{Rational(0), A});
  // (1+2q) B2 = (1+2q)(-4q^2 - 6q - 2) + A (1 + q)
  Poly p2 = add(multiply(one_plus_2q, Poly{Rational(-2), Rational(-6), Rational(-4)}), Poly{A, A});
  return {highest_first(p1), highest_first(p2)};
}

Certificate certify_B_nonpositive(const Rational& A) {
  Certificate cert("dim2-B-nonpositive");
  cert.with("A", A);
  const ClearedB cb = cleared_B_polynomials(A);

  // The expansion must agree with (1+2q) B(q) at several rational points.
  Poly p1{cb.p1[3], cb.p1[2], cb.p1[1], cb.p1[0]};
  Poly p2{cb.p2[3], cb.p2[2], cb.p2[1], cb.p2[0]};
  Rational residual(0);
  for (const Rational& q : {make_rational(0), make_rational(1, 3), make_rational(1), make_rational(5, 2),
                            make_rational(17)}) {
    auto [b1, b2] = eval_B(q, A);
    Rational w = Rational(1) + Rational(2) * q;
    residual = std::max(residual, abs_value(evaluate(p1, q) - w * b1));
    residual = std::max(residual, abs_value(evaluate(p2, q) - w * b2));
  }
  cert.residual = residual;

  std::vector<ScalarValue> coeffs;
  bool all_nonpositive = true;
  for (const auto* c : {&cb.p1, &cb.p2})
    for (const Rational& x : *c) {
      coeffs.emplace_back(x);
      all_nonpositive = all_nonpositive && x <= 0;
    }

  if (residual != 0) {
    cert.verdict = Verdict::fail;
    cert.witness = coeffs;
    cert.notes = "cleared polynomials disagree with (1+2q)B(q)";
    return cert;
  }

  // Secondary smoke test on a float grid of q in [0, 1e3].
  double sample_max = -1e300;
  for (int s = 0; s <= 400; ++s) {
    double q = s == 0 ? 0.0 : std::pow(10.0, -4.0 + 7.0 * (s - 1) / 399.0);
    auto [b1, b2] = eval_B(q, to_double(A));
    sample_max = std::max({sample_max, b1, b2});
  }
  cert.with("sample_max", sample_max);

  if (all_nonpositive) {
    cert.verdict = Verdict::pass;
    cert.witness = coeffs;
    cert.notes = "coefficients of (1+2q)B1 and (1+2q)B2, degree 3..0, all <= 0";
    return cert;
  }

  // Look for a q >= 0 with a positive B, starting at q = 0.
  for (int s = 0; s <= 200; ++s) {
    Rational q = make_rational(s, 20);
    auto [b1, b2] = eval_B(q, A);
    if (b1 > 0 || b2 > 0) {
      cert.verdict = Verdict::sharpness_witness;
      cert.witness = std::vector<ScalarValue>{q, b1, b2};
      cert.notes = "witness (q, B1(q), B2(q)) with a positive entry";
      return cert;
    }
  }
  cert.verdict = Verdict::fail;
  cert.witness = coeffs;
  cert.notes = "positive coefficient but no witness on the search grid";
  return cert;
}

ThirdDerivatives2D dim2_third_derivatives(const AnsatzPoint2D& pt) {
  const Rational a = Rational(1) + pt.q;
  return {a * pt.Gp * pt.u1, a * pt.Gp * pt.u2, -pt.q * pt.Gp * pt.u1, -pt.q * pt.Gp * pt.u2};
}

namespace {

Certificate equal_eigenvalue_branch(const AnsatzPoint2D& pt) {
  Certificate cert("dim2-equal-eigenvalues");
  cert.with("G", pt.G).with("Gp", pt.Gp).with("u1", pt.u1).with("u2", pt.u2);
  // With u11 = u22 = G/2 the critical-point relation u11 u22i + u22 u11i = 0
  // gives u11i + u22i = 0, while the differentiated equation gives
  // u11i + u22i = G' u_i. The residual is the mismatch (G/2) G' u_i.
  const Rational half_g = pt.G / 2;
  Rational r1 = half_g * pt.Gp * pt.u1;
  Rational r2 = half_g * pt.Gp * pt.u2;
  const Rational residual = std::max(abs_value(r1), abs_value(r2));
  cert.residual = residual;
  if (residual == 0) {
    cert.verdict = Verdict::pass;
    cert.notes = "gradient forced to vanish; Delta phi - 2 G' phi = -2|D^3 u|^2 <= 0";
  } else {
    cert.verdict = Verdict::fail;
    cert.witness = std::vector<ScalarValue>{pt.u1, pt.u2, r1, r2};
    cert.notes = "nonzero gradient is inconsistent with the critical-point constraints";
  }
  return cert;
}

}  // namespace

Certificate verify_dim2_gradient_identity(const AnsatzPoint2D& pt) {
  pt.validate();
  if (pt.equal_eigenvalues) return equal_eigenvalue_branch(pt);

  Certificate cert("dim2-gradient-identity");
  cert.with("q", pt.q).with("Gp", pt.Gp).with("u1", pt.u1).with("u2", pt.u2);

  const auto t = dim2_third_derivatives(pt);
  const Rational direct = t.u111 * t.u111 + 3 * t.u112 * t.u112 + 3 * t.u122 * t.u122 + t.u222 * t.u222;

  const Rational a = Rational(1) + pt.q;
  const Rational gp2 = pt.Gp * pt.Gp;
  const Rational w1 = a * a + 3 * pt.q * pt.q;
  const Rational w2 = 3 * a * a + pt.q * pt.q;
  const Rational weighted = gp2 * (w1 * pt.u1 * pt.u1 + w2 * pt.u2 * pt.u2);
  const Rational isotropic = gp2 * w1 * (pt.u1 * pt.u1 + pt.u2 * pt.u2);

  // The representation must satisfy both critical-point relations,
  // u11 u22i + u22 u11i = 0 and u11i + u22i = G' u_i.
  const Rational u11 = a * pt.G / (1 + 2 * pt.q);
  const Rational u22 = pt.q * pt.G / (1 + 2 * pt.q);
  Rational constraint = abs_value(u11 * t.u122 + u22 * t.u111) + abs_value(u11 * t.u222 + u22 * t.u112) +
                        abs_value(t.u111 + t.u122 - pt.Gp * pt.u1) + abs_value(t.u112 + t.u222 - pt.Gp * pt.u2);

  const Rational residual = abs_value(direct - weighted) + constraint;
  cert.residual = residual;
  cert.with("direct", direct).with("weighted", weighted);
  cert.with("isotropic_form_residual", Rational(direct - isotropic));
  cert.verdict = residual == 0 ? Verdict::pass : Verdict::fail;
  if (cert.verdict == Verdict::fail) cert.witness = std::vector<ScalarValue>{pt.q, pt.Gp, pt.u1, pt.u2};
  cert.notes =
      "|D^3u|^2 = G'^2(((1+q)^2+3q^2) u1^2 + (3(1+q)^2+q^2) u2^2); the single-weight form "
      "((1+q)^2+3q^2) G'^2 |Du|^2 holds only when u2 = 0";
  return cert;
}

Dim2Routes dim2_inequality_routes(const AnsatzPoint2D& pt) {
  pt.validate();
  if (pt.equal_eigenvalues) throw std::invalid_argument("inequality assembly needs u11 != u22");
  const Rational gpp = pt.A * pt.Gp * pt.Gp / pt.G;
  const Rational u11 = (1 + pt.q) * pt.G / (1 + 2 * pt.q);
  const Rational u22 = pt.q * pt.G / (1 + 2 * pt.q);
  const Rational phi = 2 * u11 * u22;

  // u_11i = G' u11 u_i / (u11 - u22), u_22i = G' u22 u_i / (u22 - u11).
  const Rational gap = u11 - u22;
  const Rational u111 = pt.Gp * u11 * pt.u1 / gap;
  const Rational u112 = pt.Gp * u11 * pt.u2 / gap;
  const Rational u122 = pt.Gp * u22 * pt.u1 / (-gap);
  const Rational u222 = pt.Gp * u22 * pt.u2 / (-gap);
  const Rational d3 = u111 * u111 + 3 * u112 * u112 + 3 * u122 * u122 + u222 * u222;

  const Rational grad2 = pt.u1 * pt.u1 + pt.u2 * pt.u2;
  const Rational hess_grad = u11 * pt.u1 * pt.u1 + u22 * pt.u2 * pt.u2;
  const Rational lap_phi =
      (2 * pt.Gp * pt.Gp + 2 * pt.G * gpp) * grad2 + 2 * pt.Gp * phi - 2 * d3 - 2 * gpp * hess_grad;

  auto [b1, b2] = eval_B(pt.q, pt.A);
  const Rational gp2 = pt.Gp * pt.Gp;
  return {lap_phi - 2 * pt.Gp * phi, 2 * pt.u1 * pt.u1 * gp2 * b1 + 2 * pt.u2 * pt.u2 * gp2 * b2};
}

Certificate assemble_dim2_inequality(const AnsatzPoint2D& pt) {
  Certificate cert("dim2-inequality");
  cert.with("q", pt.q).with("A", pt.A).with("G", pt.G).with("Gp", pt.Gp).with("u1", pt.u1).with("u2", pt.u2);
  const Dim2Routes r = dim2_inequality_routes(pt);
  const Rational residual = abs_value(r.chain - r.b_form);
  cert.residual = residual;
  cert.with("value", r.chain);
  if (residual != 0) {
    cert.verdict = Verdict::fail;
    cert.witness = std::vector<ScalarValue>{r.chain, r.b_form};
    cert.notes = "evaluation routes disagree";
  } else if (r.chain > 0) {
    cert.verdict = pt.A > 2 ? Verdict::sharpness_witness : Verdict::fail;
    cert.witness = std::vector<ScalarValue>{pt.q, pt.u1, pt.u2, r.chain};
    cert.notes = "Delta phi - 2 G' phi > 0 at the critical point";
  } else {
    cert.verdict = Verdict::pass;
  }
  return cert;
}

}  // namespace crlab::certify
