#include "crlab/certify.hpp"

#include <algorithm>
#include <numeric>

namespace crlab::certify {

namespace {

Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }

// Index helpers over {0..n-1} minus an excluded set.
struct IndexSet {
  std::size_t n;
  template <class F>
  void each_except(std::initializer_list<std::size_t> excluded, F&& f) const {
    for (std::size_t k = 0; k < n; ++k)
      if (std::find(excluded.begin(), excluded.end(), k) == excluded.end()) f(k);
  }
};

}  // namespace

Sigma2Pieces sigma2_pieces(std::size_t i, std::span<const Rational> third, const RSpectrum& lam) {
  const std::size_t n = lam.size();
  if (n < 3) throw std::invalid_argument("sigma_2 SOS check needs n >= 3");
  if (i >= n) throw std::invalid_argument("index i out of range");
  if (third.size() != n) throw std::invalid_argument("third-derivative table must have n entries");

  const IndexSet ix{n};
  const auto& L = lam;
  const auto& c = third;
  const Rational total = std::accumulate(L.entries().begin(), L.entries().end(), Rational(0));
  const Rational& G = total;  // Delta u = G(u) at the point
  const Rational& li = L[i];

  auto sum_except = [&](std::initializer_list<std::size_t> ex) {
    Rational s(0);
    ix.each_except(ex, [&](std::size_t k) { s += L[k]; });
    return s;
  };

  Sigma2Pieces out;

  // Bracket with A = 2 before any expansion.
  {
    Rational acc(0);
    ix.each_except({i}, [&](std::size_t j) {
      Rational d = L[j] - li;
      acc += (-2 * G * (2 * total - li - L[j]) + 2 * d * d) * c[j] * c[j];
      ix.each_except({i, j}, [&](std::size_t l) {
        acc += (G * (L[j] + L[l] - total - li) + 2 * (L[j] - li) * (L[l] - li)) * c[l] * c[j];
      });
    });
    out.bracket_raw = acc;
  }

  // Bracket after expanding both coefficients.
  {
    Rational acc(0);
    ix.each_except({i}, [&](std::size_t j) {
      Rational s = sum_except({i, j});
      acc -= (4 * s * s + 6 * s * (li + L[j]) + 8 * li * L[j]) * c[j] * c[j];
      ix.each_except({i, j}, [&](std::size_t l) {
        Rational t = sum_except({i, j, l});
        acc += (-t * t - t * (3 * li + L[j] + L[l]) - 4 * li * (L[l] + L[j]) + 2 * L[j] * L[l]) * c[l] * c[j];
      });
    });
    out.bracket_expanded = acc;
  }

  // I': the lambda_k^2 terms.
  {
    Rational acc(0);
    ix.each_except({i}, [&](std::size_t j) {
      ix.each_except({i, j}, [&](std::size_t k) { acc -= 4 * L[k] * L[k] * c[j] * c[j]; });
      ix.each_except({i, j}, [&](std::size_t l) {
        ix.each_except({i, j, l}, [&](std::size_t k) { acc -= L[k] * L[k] * c[l] * c[j]; });
      });
    });
    out.defining[0] = acc;

    Rational sos(0);
    ix.each_except({i}, [&](std::size_t k) {
      Rational lin(0), sq(0);
      ix.each_except({i, k}, [&](std::size_t j) {
        lin += c[j];
        sq += c[j] * c[j];
      });
      sos -= L[k] * L[k] * (lin * lin + 3 * sq);
    });
    out.rewritten[0] = sos;
  }

  // II': the lambda_k lambda_m terms with k != m, both different from i.
  {
    Rational acc(0);
    ix.each_except({i}, [&](std::size_t j) {
      Rational w(0);
      ix.each_except({i, j}, [&](std::size_t k) {
        ix.each_except({i, j, k}, [&](std::size_t l) { w += 4 * L[k] * L[l]; });
        w += 6 * L[k] * L[j];
      });
      acc -= w * c[j] * c[j];
      ix.each_except({i, j}, [&](std::size_t l) {
        Rational v(0);
        ix.each_except({i, j, l}, [&](std::size_t k) {
          ix.each_except({i, j, k, l}, [&](std::size_t m) { v += L[k] * L[m]; });
        });
        v += sum_except({i, j, l}) * (L[j] + L[l]) - 2 * L[j] * L[l];
        acc -= v * c[l] * c[j];
      });
    });
    out.defining[1] = acc;

    Rational sos(0);
    ix.each_except({i}, [&](std::size_t k) {
      ix.each_except({i, k}, [&](std::size_t j) {
        Rational lin(0), sq(0);
        ix.each_except({i, j, k}, [&](std::size_t l) {
          lin += c[l];
          sq += c[l] * c[l];
        });
        Rational a = c[j] + lin;
        Rational d = c[j] - c[k];
        sos -= L[j] * L[k] * (3 * sq + a * a + d * d + 3 * c[j] * c[j]);
      });
    });
    out.rewritten[1] = sos;
  }

  // III': the terms carrying lambda_i.
  {
    Rational acc(0);
    ix.each_except({i}, [&](std::size_t j) {
      acc -= li * (6 * sum_except({i, j}) + 8 * L[j]) * c[j] * c[j];
      ix.each_except({i, j}, [&](std::size_t l) {
        acc -= li * (3 * sum_except({i, j, l}) + 4 * L[l] + 4 * L[j]) * c[l] * c[j];
      });
    });
    out.defining[2] = acc;

    Rational sos(0);
    const Rational four_thirds = make_rational(4, 3);
    const Rational eight_thirds = make_rational(8, 3);
    ix.each_except({i}, [&](std::size_t j) {
      Rational lin(0), sq(0);
      ix.each_except({i, j}, [&](std::size_t k) {
        lin += c[k];
        sq += c[k] * c[k];
      });
      Rational a = four_thirds * c[j] + lin;
      sos -= li * L[j] * (3 * a * a + eight_thirds * c[j] * c[j] + 3 * sq);
    });
    out.rewritten[2] = sos;
  }

  return out;
}

Certificate verify_sigma2_sos(std::size_t i, std::span<const Rational> third, const RSpectrum& lam) {
  Certificate cert("sigma2-sos");
  cert.with("n", static_cast<std::int64_t>(lam.size())).with("i", static_cast<std::int64_t>(i));
  const auto convex = std::all_of(lam.entries().begin(), lam.entries().end(), [](const Rational& x) { return x >= 0; });
  if (!convex) throw std::invalid_argument("sigma_2 SOS check needs lambda >= 0");

  const Sigma2Pieces p = sigma2_pieces(i, third, lam);
  Rational residual(0);
  for (int t = 0; t < 3; ++t) residual += abs_value(p.defining[t] - p.rewritten[t]);
  const Rational sum_defining = p.defining[0] + p.defining[1] + p.defining[2];
  residual += abs_value(p.bracket_raw - p.bracket_expanded);
  residual += abs_value(p.bracket_expanded - sum_defining);
  cert.residual = residual;

  const bool nonpositive = p.rewritten[0] <= 0 && p.rewritten[1] <= 0 && p.rewritten[2] <= 0;
  cert.witness = std::vector<ScalarValue>{p.rewritten[0], p.rewritten[1], p.rewritten[2]};
  if (residual != 0) {
    cert.verdict = Verdict::fail;
    cert.notes = "expanded and sum-of-squares forms disagree";
  } else if (!nonpositive) {
    cert.verdict = Verdict::fail;
    cert.notes = "a sum-of-squares form is positive";
  } else {
    cert.verdict = Verdict::pass;
    cert.notes = "II' rewritten with the weight u_jj u_kk on every summand";
  }
  return cert;
}

Certificate certify_sigma2_coefficient_expansions(const RSpectrum& lam, std::size_t i, std::size_t j,
                                                  std::optional<std::size_t> l, const Rational& A) {
  const std::size_t n = lam.size();
  if (i >= n || j >= n || i == j) throw std::invalid_argument("need distinct indices i, j in range");
  if (l && (*l >= n || *l == i || *l == j)) throw std::invalid_argument("l must be in range and differ from i, j");

  Certificate cert("sigma2-coefficient-expansions");
  cert.with("n", static_cast<std::int64_t>(n)).with("A", A);

  const IndexSet ix{n};
  Rational total(0);
  for (const auto& x : lam.entries()) total += x;
  const Rational& G = total;
  const Rational& li = lam[i];
  const Rational& lj = lam[j];
  Rational s(0);
  ix.each_except({i, j}, [&](std::size_t k) { s += lam[k]; });
  const Rational dij = lj - li;

  std::array<Rational, 4> diag{
      -2 * G * (2 * total - li - lj) + A * dij * dij,
      -2 * total * (2 * s + li + lj) + A * dij * dij,
      -2 * (s + li + lj) * (2 * s + li + lj) + A * dij * dij,
      -4 * s * s - 6 * s * (li + lj) + (A - 2) * (li - lj) * (li - lj) - 8 * li * lj,
  };
  Rational residual(0);
  for (int t = 1; t < 4; ++t) residual += abs_value(diag[t] - diag[0]);
  cert.with("diagonal", diag[0]);

  if (l) {
    const Rational& ll = lam[*l];
    Rational t(0);
    ix.each_except({i, j, *l}, [&](std::size_t k) { t += lam[k]; });
    const Rational cross = 2 * (lj - li) * (ll - li);
    std::array<Rational, 4> mixed{
        G * (lj + ll - total - li) + cross,
        -total * (total + li - lj - ll) + cross,
        -(t + li + lj + ll) * (2 * li + t) + cross,
        -t * t - t * (3 * li + lj + ll) - 4 * li * (ll + lj) + 2 * lj * ll,
    };
    for (int k = 1; k < 4; ++k) residual += abs_value(mixed[k] - mixed[0]);
    cert.with("mixed", mixed[0]);
  }
  cert.residual = residual;

  const bool convex = std::all_of(lam.entries().begin(), lam.entries().end(), [](const Rational& x) { return x >= 0; });
  if (residual != 0) {
    cert.verdict = Verdict::fail;
    cert.notes = "expansion lines disagree";
  } else if (convex && A <= 2 && diag[0] > 0) {
    cert.verdict = Verdict::fail;
    cert.witness = std::vector<ScalarValue>{diag[0]};
    cert.notes = "diagonal coefficient positive with A <= 2";
  } else if (convex && A > 2 && diag[0] > 0) {
    cert.verdict = Verdict::sharpness_witness;
    cert.witness = std::vector<ScalarValue>{li, lj, diag[0]};
    cert.notes = "diagonal coefficient positive for A > 2";
  } else {
    cert.verdict = Verdict::pass;
  }
  return cert;
}

}  // namespace crlab::certify
