#include "crlab/certify.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace crlab::certify {

namespace {

Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }

Rational sum_of(std::span<const Rational> xs) { return std::accumulate(xs.begin(), xs.end(), Rational(0)); }

// a1, a2, a3 from the eigenvalues lam_i (i != m) and b_i = u_iim.
ACoefficients a_coefficients(std::span<const Rational> lam, std::span<const Rational> b, const Rational& A) {
  const std::size_t r = lam.size();
  for (const auto& x : lam)
    if (x == 0) throw std::invalid_argument("precondition violated: zero eigenvalue among i != m");
  const Rational total = sum_of(lam);

  ACoefficients a{Rational(0), Rational(0), Rational(0)};
  for (std::size_t i = 0; i < r; ++i) {
    const Rational s_i = total - lam[i];
    const Rational bi2 = b[i] * b[i];
    a.a1 += (A - 2) / (lam[i] * lam[i]) * bi2;
    a.a2 -= (2 * A + 4) / lam[i] * bi2 + bi2 / (lam[i] * lam[i]) * (2 * s_i);
    a.a3 += -2 * bi2 * s_i / lam[i] + (A - 2) * bi2;
    for (std::size_t j = 0; j < r; ++j) {
      if (j == i) continue;
      const Rational bij = b[i] * b[j];
      const Rational s_ij = total - lam[i] - lam[j];
      a.a1 += (A - 1) * bij / (lam[i] * lam[j]);
      a.a2 -= (2 * A + 2) / lam[j] * bij + s_ij * bij / (lam[i] * lam[j]);
      a.a3 += A * bij;
    }
  }
  return a;
}

}  // namespace

std::vector<Rational> ThirdDerivativeSlice::lam_without_m() const {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < lam.size(); ++i)
    if (i != m) out.push_back(lam[i]);
  return out;
}

ThirdDerivativeSlice complete_third_derivatives(const RSpectrum& lam, std::size_t m, std::vector<Rational> b, int k) {
  const std::size_t n = lam.size();
  if (m >= n) throw std::invalid_argument("distinguished index out of range");
  if (b.size() != n - 1) throw std::invalid_argument("slice needs n-1 values u_iim");
  if (k < 1 || static_cast<std::size_t>(k) > n) throw std::invalid_argument("need 1 <= k <= n");

  const Rational pivot = symfun::sigma_minor(lam, k - 1, {m});
  if (pivot == 0)
    throw SingularConstraint("sigma_" + std::to_string(k - 1) + "(lambda|" + std::to_string(m) +
                             ") = 0; u_mmm is not determined");
  Rational acc(0);
  std::size_t slot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == m) continue;
    acc += symfun::sigma_minor(lam, k - 1, {i}) * b[slot++];
  }
  Rational ummm = -acc / pivot;
  return ThirdDerivativeSlice{m, std::move(b), lam, k, ummm};
}

ACoefficients eval_a_coefficients(const ThirdDerivativeSlice& slice, const Rational& A) {
  const auto rest = slice.lam_without_m();
  return a_coefficients(rest, slice.b, A);
}

std::pair<Rational, Rational> sigmak_bracket(const ThirdDerivativeSlice& s, const Rational& A) {
  const auto& lam = s.lam;
  const std::size_t n = lam.size();
  const int k = s.k;
  const std::size_t m = s.m;
  const Rational G = sum_of(lam.entries());
  const Rational s1m = symfun::sigma_minor(lam, k - 1, {m});

  // Map slice slots back to spectrum indices.
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < n; ++i)
    if (i != m) index.push_back(i);

  auto minor2 = [&](std::size_t a, std::size_t c) {
    return k >= 2 ? symfun::sigma_minor(lam, k - 2, {a, c}) : Rational(0);
  };

  Rational first(0), second(0);
  for (std::size_t p = 0; p < index.size(); ++p) {
    const std::size_t i = index[p];
    const Rational smi = minor2(m, i);
    const Rational di = lam[i] - lam[m];
    first += (A * smi * smi * di * di - 2 * G * smi * (s1m + symfun::sigma_minor(lam, k - 1, {i}))) * s.b[p] * s.b[p];
    for (std::size_t q = 0; q < index.size(); ++q) {
      if (q == p) continue;
      const std::size_t j = index[q];
      const Rational smj = minor2(m, j);
      const Rational dj = lam[j] - lam[m];
      second += (A * smi * smj * di * dj - 2 * G * smj * symfun::sigma_minor(lam, k - 1, {i}) +
                 G * s1m * minor2(i, j)) *
                s.b[p] * s.b[q];
    }
  }
  return {first, second};
}

Certificate verify_a_expansion(const ThirdDerivativeSlice& slice, const Rational& A) {
  const std::size_t n = slice.lam.size();
  if (static_cast<std::size_t>(slice.k) != n) throw std::invalid_argument("a-coefficient expansion is for k = n");
  const Rational& lm = slice.lam[slice.m];
  if (lm == 0) throw std::invalid_argument("precondition violated: lambda_m = 0");
  Certificate cert("sigman-a-expansion");
  cert.with("n", static_cast<std::int64_t>(n)).with("A", A);

  auto [first, second] = sigmak_bracket(slice, A);
  const ACoefficients a = eval_a_coefficients(slice, A);
  const Rational sn = symfun::sigma(slice.lam, static_cast<int>(n));
  const Rational rhs = sn * sn / (lm * lm) * (a.a1 * lm * lm + a.a2 * lm + a.a3);
  const Rational lhs = first + second;
  const Rational residual = abs_value(lhs - rhs);
  cert.residual = residual;
  cert.verdict = residual == 0 ? Verdict::pass : Verdict::fail;
  if (cert.verdict == Verdict::fail) cert.witness = std::vector<ScalarValue>{lhs, rhs};
  return cert;
}

Rational cofactor_determinant(const std::vector<std::vector<Rational>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return Rational(1);
  if (n > 20) throw std::invalid_argument("cofactor expansion limited to n <= 20");
  for (const auto& row : m)
    if (row.size() != n) throw std::invalid_argument("matrix must be square");
  // Laplace expansion along successive rows; the minor on rows r.. is keyed
  // by the set of columns still available.
  std::map<std::uint32_t, Rational> memo;
  auto expand = [&](auto&& self, std::size_t row, std::uint32_t cols) -> Rational {
    if (row == n) return Rational(1);
    if (auto it = memo.find(cols); it != memo.end()) return it->second;
    Rational acc(0);
    int position = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(cols & (1u << c))) continue;
      if (m[row][c] != 0) {
        Rational term = m[row][c] * self(self, row + 1, cols & ~(1u << c));
        if (position % 2 == 0) acc += term; else acc -= term;
      }
      ++position;
    }
    memo.emplace(cols, acc);
    return acc;
  };
  return expand(expand, 0, (n == 32 ? ~0u : ((1u << n) - 1)));
}

std::vector<std::vector<Rational>> threshold_matrix(const Rational& alpha, std::size_t k) {
  std::vector<std::vector<Rational>> out(k, std::vector<Rational>(k, Rational(-1)));
  for (std::size_t i = 0; i < k; ++i) out[i][i] = alpha;
  return out;
}

Rational closed_form_minor(const Rational& alpha, int k) {
  if (k < 1) throw std::invalid_argument("minor order must be >= 1");
  Rational base = alpha + 1;
  Rational power(1);
  for (int t = 0; t < k - 1; ++t) power *= base;
  return power * (base - k);
}

Certificate certify_minor_formula(const Rational& alpha, int kmax) {
  Certificate cert("sigman-minor-formula");
  cert.with("alpha", alpha).with("kmax", static_cast<std::int64_t>(kmax));
  Rational residual(0);
  std::vector<ScalarValue> minors;
  for (int k = 1; k <= kmax; ++k) {
    Rational brute = cofactor_determinant(threshold_matrix(alpha, static_cast<std::size_t>(k)));
    Rational closed = closed_form_minor(alpha, k);
    residual += abs_value(brute - closed);
    minors.emplace_back(brute);
  }
  cert.residual = residual;
  cert.witness = std::move(minors);
  cert.verdict = residual == 0 ? Verdict::pass : Verdict::fail;
  return cert;
}

Certificate certify_a1_threshold(int n, const Rational& A) {
  if (n < 3) throw std::invalid_argument("a1 threshold needs n >= 3");
  Certificate cert("sigman-a1-threshold");
  cert.with("n", static_cast<std::int64_t>(n)).with("A", A);
  const Rational bound = make_rational(n, n - 1);
  cert.with("bound", bound);

  if (A <= 1) {
    // a1 = (A-1)(sum y)^2 - sum y^2 with y_i = b_i / lambda_i.
    cert.verdict = Verdict::pass;
    cert.notes = "A <= 1: a1 = (A-1)(sum y)^2 - |y|^2 <= 0 by monotonicity in A";
    return cert;
  }

  const Rational alpha = (2 - A) / (A - 1);
  cert.with("alpha", alpha);
  const std::size_t dim = static_cast<std::size_t>(n - 1);
  Rational residual(0);
  bool minors_nonnegative = true;
  std::vector<ScalarValue> minors;
  for (std::size_t k = 1; k <= dim; ++k) {
    Rational brute = cofactor_determinant(threshold_matrix(alpha, k));
    Rational closed = closed_form_minor(alpha, static_cast<int>(k));
    residual += abs_value(brute - closed);
    minors_nonnegative = minors_nonnegative && brute >= 0;
    minors.emplace_back(brute);
  }
  cert.residual = residual;
  // Every k x k principal minor of this matrix equals the leading one, so
  // nonnegative leading minors is the full semidefiniteness test here.
  const bool by_alpha = alpha >= n - 2;
  const bool by_bound = A <= bound;
  if (residual != 0 || minors_nonnegative != by_alpha || by_alpha != by_bound) {
    cert.verdict = Verdict::fail;
    cert.witness = std::move(minors);
    cert.notes = "minor computations are inconsistent";
    return cert;
  }
  if (minors_nonnegative) {
    cert.verdict = Verdict::pass;
    cert.witness = std::move(minors);
    cert.notes = "leading principal minors of the (n-1)x(n-1) threshold matrix, k = 1..n-1";
    return cert;
  }

  // y = (1, ..., 1) gives y^T M y = (n-1)(alpha - (n-2)) < 0. Re-check it as
  // a slice with lambda = 1 and b = y.
  std::vector<Rational> ones(dim, Rational(1));
  symfun::Spectrum<Rational> lam(std::vector<Rational>(static_cast<std::size_t>(n), Rational(1)));
  ThirdDerivativeSlice slice = complete_third_derivatives(lam, dim, ones, n);
  const ACoefficients a = eval_a_coefficients(slice, A);
  cert.verdict = Verdict::fail;
  std::vector<ScalarValue> w(ones.begin(), ones.end());
  cert.witness = std::move(w);
  cert.with("form_value", Rational(static_cast<long>(dim) * (alpha - (n - 2))));
  cert.with("a1_at_witness", a.a1);
  cert.notes = "A > n/(n-1): witness y makes a1 > 0 (lambda = 1, b = y)";
  return cert;
}

A2Forms a2_forms(std::span<const Rational> y, std::span<const Rational> p, const Rational& A) {
  if (y.size() != p.size() || y.empty()) throw std::invalid_argument("y and p must have the same nonzero length");
  Rational total(0);
  for (const auto& x : p) {
    if (x < 0) throw std::invalid_argument("p must be a probability vector (negative entry)");
    total += x;
  }
  if (total != 1) throw std::invalid_argument("p must be a probability vector (sum != 1)");
  const std::size_t r = y.size();

  A2Forms out;
  if (std::all_of(p.begin(), p.end(), [](const Rational& x) { return x > 0; })) {
    // lambda_i = p_i (so lambda = 1) and b_i = y_i lambda_i.
    std::vector<Rational> lam(p.begin(), p.end());
    std::vector<Rational> b(r);
    for (std::size_t i = 0; i < r; ++i) b[i] = y[i] * lam[i];
    out.direct = -a_coefficients(lam, b, A).a2;
  }

  Rational reduced(0);
  for (std::size_t i = 0; i < r; ++i) {
    reduced += (2 + (2 * A + 2) * p[i]) * y[i] * y[i];
    for (std::size_t j = 0; j < r; ++j)
      if (j != i) reduced += (1 + 2 * A * p[i]) * y[i] * y[j];
  }
  out.reduced = reduced;

  Rational sy(0), spy(0), sy2(0), spy2(0);
  for (std::size_t i = 0; i < r; ++i) {
    sy += y[i];
    spy += p[i] * y[i];
    sy2 += y[i] * y[i];
    spy2 += p[i] * y[i] * y[i];
  }
  Rational head = sy + A * spy;
  out.completed = head * head + sy2 + 2 * spy2 - A * A * spy * spy;
  return out;
}

Certificate verify_a2_identity_and_sign(std::span<const Rational> y, std::span<const Rational> p, const Rational& A) {
  Certificate cert("sigman-a2-identity");
  cert.with("n", static_cast<std::int64_t>(y.size() + 1)).with("A", A);
  const A2Forms f = a2_forms(y, p, A);
  Rational residual = abs_value(f.reduced - f.completed);
  if (f.direct) residual += abs_value(*f.direct - f.completed);
  cert.residual = residual;
  cert.with("value", f.completed);
  cert.with("direct_form_checked", f.direct.has_value());

  Rational spy(0), spy2(0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    spy += p[i] * y[i];
    spy2 += p[i] * y[i] * y[i];
  }
  const bool schwarz = spy * spy <= spy2;
  const bool sign_claimed = A * A <= 2;
  cert.with("sign_claimed", sign_claimed);

  if (residual != 0 || !schwarz) {
    cert.verdict = Verdict::fail;
    cert.witness = std::vector<ScalarValue>(y.begin(), y.end());
    cert.notes = residual != 0 ? "forms of -a2/lambda disagree" : "Schwarz step violated";
  } else if (sign_claimed && f.completed < 0) {
    cert.verdict = Verdict::fail;
    cert.witness = std::vector<ScalarValue>(y.begin(), y.end());
    cert.notes = "-a2/lambda < 0 although A^2 <= 2";
  } else {
    cert.verdict = Verdict::pass;
    if (!sign_claimed) cert.notes = "A^2 > 2: identity only, no sign claim";
  }
  return cert;
}

Certificate certify_a2_n3_definiteness(const Rational& A, int steps) {
  if (steps < 1) throw std::invalid_argument("grid needs at least one step");
  Certificate cert("sigman-a2-n3-definite");
  cert.with("A", A).with("steps", static_cast<std::int64_t>(steps));
  Rational min_det(0);
  bool first = true;
  for (int s = 0; s <= steps; ++s) {
    const Rational pi = make_rational(s, steps);
    const Rational pj = 1 - pi;
    // Rows (2 + (2A+2) p_i, 1 + 2A p_i) and (1 + 2A p_j, 2 + (2A+2) p_j); symmetrize.
    const Rational d1 = 2 + (2 * A + 2) * pi;
    const Rational d2 = 2 + (2 * A + 2) * pj;
    const Rational off = ((1 + 2 * A * pi) + (1 + 2 * A * pj)) / 2;
    const Rational det = d1 * d2 - off * off;
    if (first || det < min_det) min_det = det;
    first = false;
    if (d1 <= 0 || det <= 0) {
      cert.verdict = Verdict::fail;
      cert.witness = std::vector<ScalarValue>{pi, pj, d1, det};
      cert.notes = "symmetrized form is not positive definite";
      cert.residual = det;
      return cert;
    }
  }
  cert.with("min_det", min_det);
  cert.verdict = Verdict::pass;
  return cert;
}

std::pair<Rational, Rational> a3_forms(std::span<const Rational> lam, std::span<const Rational> b, const Rational& A) {
  if (lam.size() != b.size() || lam.empty()) throw std::invalid_argument("lambda and b must have the same length");
  for (const auto& x : lam)
    if (x <= 0) throw std::invalid_argument("a3 check needs positive eigenvalues");
  const std::size_t r = lam.size();
  const Rational total = sum_of(lam);

  Rational defining(0);
  for (std::size_t i = 0; i < r; ++i) {
    const Rational bi2 = b[i] * b[i];
    defining += -2 * bi2 * (total - lam[i]) / lam[i] + (A - 2) * bi2;
    for (std::size_t j = 0; j < r; ++j)
      if (j != i) defining += A * b[i] * b[j];
  }

  Rational paired(0), squares(0);
  for (std::size_t i = 0; i < r; ++i) {
    squares += b[i] * b[i];
    for (std::size_t j = 0; j < r; ++j)
      if (j != i)
        paired += lam[j] / lam[i] * b[i] * b[i] + lam[i] / lam[j] * b[j] * b[j] - A * b[i] * b[j];
  }
  // Over ordered pairs, -2 sum_i S_i b_i^2 / lambda_i is exactly minus the
  // sum of both quotient terms.
  Rational paired_form = -(paired + (2 - A) * squares);
  return {defining, paired_form};
}

Certificate verify_a3_sign(std::span<const Rational> lam, std::span<const Rational> b, const Rational& A) {
  Certificate cert("sigman-a3-sign");
  cert.with("n", static_cast<std::int64_t>(lam.size() + 1)).with("A", A);
  auto [defining, paired] = a3_forms(lam, b, A);
  const Rational residual = abs_value(defining - paired);
  cert.residual = residual;
  cert.with("a3", defining);

  bool pairs_bounded = true;
  for (std::size_t i = 0; i < lam.size(); ++i)
    for (std::size_t j = i + 1; j < lam.size(); ++j) {
      Rational t = lam[j] / lam[i] * b[i] * b[i] + lam[i] / lam[j] * b[j] * b[j] - A * b[i] * b[j];
      if (t < 0) pairs_bounded = false;
    }

  if (residual != 0) {
    cert.verdict = Verdict::fail;
    cert.witness = std::vector<ScalarValue>{defining, paired};
    cert.notes = "defining and paired forms disagree";
  } else if (A <= 2 && (defining > 0 || !pairs_bounded)) {
    cert.verdict = Verdict::fail;
    cert.witness = std::vector<ScalarValue>(b.begin(), b.end());
    cert.notes = "a3 > 0 although A <= 2";
  } else if (A > 2 && defining > 0) {
    cert.verdict = Verdict::sharpness_witness;
    cert.witness = std::vector<ScalarValue>(b.begin(), b.end());
    cert.notes = "a3 > 0 for A > 2";
  } else {
    cert.verdict = Verdict::pass;
  }
  return cert;
}

Rational combined_sigman_value(const ACoefficients& a, const Rational& lambda_m) {
  return a.a1 * lambda_m * lambda_m + a.a2 * lambda_m + a.a3;
}

}  // namespace crlab::certify
