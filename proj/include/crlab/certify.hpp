#pragma once

// Exact checks of the algebraic facts behind the stronger constant rank
// theorems: the two-dimensional B-polynomial argument, the sigma_2 SOS
// rewritings, and the sigma_n coefficient analysis (a1, a2, a3).
// All arithmetic is over the rationals.

#include "crlab/certificate.hpp"
#include "crlab/scalar.hpp"
#include "crlab/symfun.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace crlab::certify {

using RSpectrum = symfun::Spectrum<Rational>;

/// Raised when the constraint sum_i sigma_{k-1}(lambda|i) u_iim = 0 cannot
/// be solved for u_mmm because sigma_{k-1}(lambda|m) vanishes.
class SingularConstraint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Dimension two.

/// Critical point of phi = 2 det D^2u in the plane, with D^2u = diag(u11, u22)
/// parametrized by q = u22 / (u11 - u22). When `equal_eigenvalues` is set the
/// point is the degenerate branch u11 = u22 = G/2 and q is ignored.
struct AnsatzPoint2D {
  Rational q;
  Rational A;
  Rational G;
  Rational Gp;
  Rational u1;
  Rational u2;
  bool equal_eigenvalues = false;

  void validate() const;
};

template <Scalar T>
std::pair<T, T> eval_B(const T& q, const T& A) {
  if (q < T(0)) throw std::invalid_argument("eval_B requires q >= 0");
  const T denom = T(1) + T(2) * q;
  T b1 = T(-4) * q * q - T(2) * q + A * q / denom;
  T b2 = T(-4) * q * q - T(6) * q - T(2) + A * (T(1) + q) / denom;
  return {b1, b2};
}

/// Coefficients of (1+2q) B_1(q) and (1+2q) B_2(q), highest degree first.
struct ClearedB {
  std::array<Rational, 4> p1;
  std::array<Rational, 4> p2;
};

ClearedB cleared_B_polynomials(const Rational& A);

Certificate certify_B_nonpositive(const Rational& A);

/// Third derivatives at the critical point, indices (1,1,1), (1,1,2),
/// (1,2,2), (2,2,2).
struct ThirdDerivatives2D {
  Rational u111, u112, u122, u222;
};

ThirdDerivatives2D dim2_third_derivatives(const AnsatzPoint2D& pt);

Certificate verify_dim2_gradient_identity(const AnsatzPoint2D& pt);

/// Delta phi - 2 G' phi at the critical point, two ways.
struct Dim2Routes {
  Rational chain;   // from the Laplacian of phi and the third-derivative representation
  Rational b_form;  // 2 u1^2 G'^2 B1(q) + 2 u2^2 G'^2 B2(q)
};

Dim2Routes dim2_inequality_routes(const AnsatzPoint2D& pt);

Certificate assemble_dim2_inequality(const AnsatzPoint2D& pt);

// ---------------------------------------------------------------------------
// sigma_2 in n dimensions.

/// The three pieces I', II', III' of the bracket at a fixed index i, each in
/// its expanded form and its sum-of-squares form.
struct Sigma2Pieces {
  std::array<Rational, 3> defining;
  std::array<Rational, 3> rewritten;
  Rational bracket_raw;       // bracket with the A = 2 coefficients before expansion
  Rational bracket_expanded;  // bracket after expanding both coefficients
};

/// `third[j]` is u_jji; the entry at j == i is ignored.
Sigma2Pieces sigma2_pieces(std::size_t i, std::span<const Rational> third, const RSpectrum& lam);

Certificate verify_sigma2_sos(std::size_t i, std::span<const Rational> third, const RSpectrum& lam);

/// Diagonal coefficient -2G(2 Delta u - u_ii - u_jj) + A (u_jj - u_ii)^2 and
/// mixed coefficient G(u_jj + u_ll - Delta u - u_ii) + 2 (u_jj - u_ii)(u_ll - u_ii),
/// with G = Delta u = sum(lambda), checked against their expansions.
/// `l` may be omitted for n = 2.
Certificate certify_sigma2_coefficient_expansions(const RSpectrum& lam, std::size_t i, std::size_t j,
                                                  std::optional<std::size_t> l, const Rational& A);

// ---------------------------------------------------------------------------
// sigma_n in n dimensions.

/// u_iim for i != m (stored in increasing i, skipping m) and the completed u_mmm.
struct ThirdDerivativeSlice {
  std::size_t m = 0;
  std::vector<Rational> b;
  RSpectrum lam;
  int k = 0;
  Rational completed_ummm;

  /// lambda with the m-th entry removed, aligned with b.
  std::vector<Rational> lam_without_m() const;
};

ThirdDerivativeSlice complete_third_derivatives(const RSpectrum& lam, std::size_t m, std::vector<Rational> b, int k);

struct ACoefficients {
  Rational a1, a2, a3;
};

ACoefficients eval_a_coefficients(const ThirdDerivativeSlice& slice, const Rational& A);

/// Returns (I, II) of the sigma_k bracket at distinguished index m, with
/// G = sum(lambda), built from sigma minors rather than closed forms.
std::pair<Rational, Rational> sigmak_bracket(const ThirdDerivativeSlice& slice, const Rational& A);

/// I + II equals sigma_n^2 / lambda_m^2 (a1 lambda_m^2 + a2 lambda_m + a3), k = n.
Certificate verify_a_expansion(const ThirdDerivativeSlice& slice, const Rational& A);

/// Determinant by cofactor expansion along the first row.
Rational cofactor_determinant(const std::vector<std::vector<Rational>>& m);

/// k x k matrix with alpha on the diagonal and -1 off it.
std::vector<std::vector<Rational>> threshold_matrix(const Rational& alpha, std::size_t k);

/// (alpha + 1)^(k-1) (alpha + 1 - k).
Rational closed_form_minor(const Rational& alpha, int k);

Certificate certify_minor_formula(const Rational& alpha, int kmax);

Certificate certify_a1_threshold(int n, const Rational& A);

/// -a2/lambda for the slice y_i = b_i / lambda_i, p_i = lambda_i / lambda, three ways.
struct A2Forms {
  std::optional<Rational> direct;  // from the a2 formula; needs every p_i > 0
  Rational reduced;                // the (y, p) form
  Rational completed;              // the completed-square form
};

A2Forms a2_forms(std::span<const Rational> y, std::span<const Rational> p, const Rational& A);

Certificate verify_a2_identity_and_sign(std::span<const Rational> y, std::span<const Rational> p, const Rational& A);

/// n = 3: the symmetrized 2x2 form of -a2/lambda is positive definite on a
/// simplex grid p = (t, 1 - t), t = 0, 1/steps, ..., 1.
Certificate certify_a2_n3_definiteness(const Rational& A, int steps);

/// a3 from its defining formula and from the paired form.
std::pair<Rational, Rational> a3_forms(std::span<const Rational> lam, std::span<const Rational> b, const Rational& A);

Certificate verify_a3_sign(std::span<const Rational> lam, std::span<const Rational> b, const Rational& A);

/// a1 lambda_m^2 + a2 lambda_m + a3.
Rational combined_sigman_value(const ACoefficients& a, const Rational& lambda_m);

}  // namespace crlab::certify
