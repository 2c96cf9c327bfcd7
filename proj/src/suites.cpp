#include "crlab/suites.hpp"

#include "crlab/certify.hpp"
#include "crlab/sampling.hpp"
#include "crlab/symfun.hpp"

#include <algorithm>
#include <stdexcept>

namespace crlab::suites {

namespace {

using certify::RSpectrum;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Each claim draws from its own stream so adding or removing claims does
// not shift the others.
RationalSampler sampler_for(const SuiteOptions& opts, std::string_view claim) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : claim) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return RationalSampler(splitmix(opts.seed ^ h));
}

int trials(const SuiteOptions& opts, int full) { return opts.quick ? std::max(1, full / 10) : full; }

Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }

Rational residual_of(const Certificate& c) {
  if (const auto* r = std::get_if<Rational>(&c.residual)) return abs_value(*r);
  return Rational(0);
}

// Folds per-trial certificates: fail beats sharpness-witness beats pass.
class Aggregate {
 public:
  explicit Aggregate(std::string id) : cert_(std::move(id)) {}

  void add(const Certificate& trial) {
    ++count_;
    residual_ = std::max(residual_, residual_of(trial));
    if (trial.verdict == Verdict::fail) {
      ++fails_;
      if (!first_fail_) first_fail_ = trial;
    } else if (trial.verdict == Verdict::sharpness_witness) {
      ++witnesses_;
      if (!first_witness_) first_witness_ = trial;
    }
  }

  void fail(const std::string& why, std::vector<ScalarValue> witness = {}) {
    ++count_;
    ++fails_;
    if (!first_fail_) {
      Certificate c(cert_.claim_id);
      c.verdict = Verdict::fail;
      c.notes = why;
      if (!witness.empty()) c.witness = std::move(witness);
      first_fail_ = c;
    }
  }

  void ok() { ++count_; }

  Certificate& cert() { return cert_; }

  Certificate finish(const SuiteOptions& opts, std::string notes = {}) {
    cert_.with("trials", static_cast<std::int64_t>(count_)).with("seed", static_cast<std::int64_t>(opts.seed));
    cert_.residual = residual_;
    if (fails_ > 0) {
      cert_.verdict = Verdict::fail;
      cert_.with("failures", static_cast<std::int64_t>(fails_));
      cert_.witness = first_fail_->witness;
      cert_.notes = "first failure: " + (first_fail_->notes.empty() ? std::string("verdict fail") : first_fail_->notes);
    } else if (witnesses_ > 0) {
      cert_.verdict = Verdict::sharpness_witness;
      cert_.with("witnesses", static_cast<std::int64_t>(witnesses_));
      cert_.witness = first_witness_->witness;
      cert_.notes = first_witness_->notes;
    } else {
      cert_.verdict = Verdict::pass;
      cert_.notes = std::move(notes);
    }
    return cert_;
  }

 private:
  Certificate cert_;
  int count_ = 0;
  int fails_ = 0;
  int witnesses_ = 0;
  Rational residual_{0};
  std::optional<Certificate> first_fail_;
  std::optional<Certificate> first_witness_;
};

std::vector<ScalarValue> as_values(const std::vector<Rational>& xs) { return {xs.begin(), xs.end()}; }

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"dim2", "sigma2", "sigman", "all"};
  return names;
}

std::vector<int> sigman_dimensions(const SuiteOptions& opts) {
  if (opts.n) {
    if (*opts.n < 3) throw std::invalid_argument("sigma_n claims need n >= 3");
    return {*opts.n};
  }
  return {3, 4, 5, 6};
}

// ---------------------------------------------------------------------------

Certificate dim2_B_nonpositive(const SuiteOptions& opts) {
  return certify::certify_B_nonpositive(opts.A.value_or(Rational(2)));
}

Certificate dim2_B_best_constant(const SuiteOptions& opts, const std::vector<Rational>& above) {
  Aggregate agg("dim2-B-best-constant");
  for (const Rational& A : {make_rational(0), make_rational(1, 2), make_rational(1), make_rational(3, 2),
                            make_rational(2)}) {
    Certificate c = certify::certify_B_nonpositive(A);
    if (c.verdict != Verdict::pass) agg.fail("B certificate does not pass at A = " + to_string(A), {A});
    else agg.ok();
  }
  for (const Rational& A : above) {
    Certificate c = certify::certify_B_nonpositive(A);
    // Expect the witness q = 0 with B2(0) = A - 2 > 0.
    const bool expected = c.verdict == Verdict::sharpness_witness && c.witness &&
                          std::get<Rational>((*c.witness)[0]) == 0 &&
                          std::get<Rational>((*c.witness)[2]) == A - 2;
    if (!expected) agg.fail("no sharpness witness B2(0) = A - 2 at A = " + to_string(A), {A});
    else agg.ok();
  }
  std::string list;
  for (const auto& A : above) list += (list.empty() ? "" : ",") + to_string(A);
  agg.cert().with("above", list);
  return agg.finish(opts, "passes on {0,1/2,1,3/2,2}; witness q = 0, B2 = A - 2 at every A above 2");
}

Certificate dim2_gradient_identity(const SuiteOptions& opts) {
  Aggregate agg("dim2-gradient-identity");
  RationalSampler rs = sampler_for(opts, "dim2-gradient-identity");
  const int count = trials(opts, 1000);
  Rational isotropic_max(0);
  for (int t = 0; t < count; ++t) {
    certify::AnsatzPoint2D pt{rs.positive(), Rational(2), rs.positive(), -rs.positive(), rs.any(), rs.any()};
    Certificate c = certify::verify_dim2_gradient_identity(pt);
    if (const auto* p = c.find("isotropic_form_residual"))
      isotropic_max = std::max(isotropic_max, abs_value(std::get<Rational>(*p)));
    agg.add(c);
  }
  agg.cert().with("isotropic_form_residual_max", isotropic_max);
  return agg.finish(opts,
                    "per-axis weights ((1+q)^2+3q^2) on u1^2 and (3(1+q)^2+q^2) on u2^2; "
                    "the single-weight form needs u2 = 0");
}

Certificate dim2_equal_eigenvalues(const SuiteOptions& opts) {
  Aggregate agg("dim2-equal-eigenvalues");
  RationalSampler rs = sampler_for(opts, "dim2-equal-eigenvalues");
  const int count = trials(opts, 100);
  for (int t = 0; t < count; ++t) {
    certify::AnsatzPoint2D zero{Rational(0), Rational(2), rs.positive(), -rs.positive(), Rational(0), Rational(0), true};
    Certificate c = certify::verify_dim2_gradient_identity(zero);
    agg.add(c);
    certify::AnsatzPoint2D moving = zero;
    moving.u1 = rs.positive();
    moving.u2 = rs.any();
    Certificate d = certify::verify_dim2_gradient_identity(moving);
    // A nonzero gradient must be rejected with a witness.
    if (d.verdict != Verdict::fail || !d.witness) agg.fail("nonzero gradient accepted on the equal-eigenvalue branch");
    else agg.ok();
  }
  return agg.finish(opts, "only the zero gradient is consistent; checked Delta phi - 2 G' phi");
}

Certificate dim2_inequality(const SuiteOptions& opts) {
  const Rational A = opts.A.value_or(Rational(2));
  Aggregate agg("dim2-inequality");
  agg.cert().with("A", A);
  RationalSampler rs = sampler_for(opts, "dim2-inequality");
  const int count = trials(opts, 1000);
  for (int t = 0; t < count; ++t) {
    certify::AnsatzPoint2D pt{rs.nonnegative(), A, rs.positive(), -rs.positive(), rs.any(), rs.any()};
    agg.add(certify::assemble_dim2_inequality(pt));
  }
  return agg.finish(opts, "routes agree exactly; value <= 0");
}

Certificate dim2_inequality_sharpness(const SuiteOptions& opts) {
  Aggregate agg("dim2-inequality-sharpness");
  for (const Rational& A : {make_rational(201, 100), make_rational(21, 10), make_rational(3)}) {
    certify::AnsatzPoint2D pt{Rational(0), A, Rational(1), Rational(-1), Rational(0), Rational(1)};
    Certificate c = certify::assemble_dim2_inequality(pt);
    if (c.verdict != Verdict::sharpness_witness) agg.fail("no positive value at q = 0, u = (0, 1), A = " + to_string(A), {A});
    else agg.ok();
  }
  return agg.finish(opts, "q = 0, u = (0,1): Delta phi - 2 G' phi = 2 (A - 2) G'^2 > 0 for A > 2");
}

// ---------------------------------------------------------------------------

Certificate sigma2_sos(const SuiteOptions& opts) {
  Aggregate agg("sigma2-sos");
  RationalSampler rs = sampler_for(opts, "sigma2-sos");
  std::vector<int> dims = opts.n && *opts.n >= 3 ? std::vector<int>{*opts.n} : std::vector<int>{3, 4, 5, 6};
  const int count = trials(opts, 1000);
  for (int n : dims) {
    for (int t = 0; t < count; ++t) {
      std::vector<Rational> v(static_cast<std::size_t>(n));
      for (auto& x : v) x = rs.nonnegative();
      RSpectrum lam(std::move(v), symfun::Convexity::convex);
      auto third = rs.vector(static_cast<std::size_t>(n));
      const auto i = static_cast<std::size_t>(rs.integer(0, n - 1));
      agg.add(certify::verify_sigma2_sos(i, third, lam));
    }
  }
  std::string list;
  for (int n : dims) list += (list.empty() ? "" : ",") + std::to_string(n);
  agg.cert().with("n", list);
  return agg.finish(opts, "II' rewritten with the weight u_jj u_kk on every summand");
}

Certificate sigma2_coefficient_expansions(const SuiteOptions& opts) {
  const Rational A = opts.A.value_or(Rational(2));
  Aggregate agg("sigma2-coefficient-expansions");
  agg.cert().with("A", A);
  RationalSampler rs = sampler_for(opts, "sigma2-coefficient-expansions");
  const int count = trials(opts, 1000);
  for (int t = 0; t < count; ++t) {
    const int n = opts.n ? std::max(2, *opts.n) : static_cast<int>(rs.integer(2, 6));
    std::vector<Rational> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rs.nonnegative();
    RSpectrum lam(std::move(v), symfun::Convexity::convex);
    const auto i = static_cast<std::size_t>(rs.integer(0, n - 1));
    auto j = static_cast<std::size_t>(rs.integer(0, n - 2));
    if (j >= i) ++j;
    std::optional<std::size_t> l;
    if (n >= 3) {
      std::size_t pick = static_cast<std::size_t>(rs.integer(0, n - 3));
      for (std::size_t c = 0; c < static_cast<std::size_t>(n); ++c) {
        if (c == i || c == j) continue;
        if (pick-- == 0) {
          l = c;
          break;
        }
      }
    }
    agg.add(certify::certify_sigma2_coefficient_expansions(lam, i, j, l, A));
  }
  return agg.finish(opts);
}

Certificate sigma2_best_constant(const SuiteOptions& opts) {
  Aggregate agg("sigma2-best-constant");
  for (int n = 2; n <= 6; ++n) {
    std::vector<Rational> v(static_cast<std::size_t>(n), Rational(0));
    v[0] = 1;
    RSpectrum lam(v, symfun::Convexity::convex);
    std::optional<std::size_t> l;
    if (n >= 3) l = 2;
    if (certify::certify_sigma2_coefficient_expansions(lam, 0, 1, l, Rational(2)).verdict != Verdict::pass)
      agg.fail("diagonal coefficient positive at A = 2", as_values(v));
    else agg.ok();
    for (const Rational& eps : {make_rational(1, 100), make_rational(1, 10)}) {
      Certificate c = certify::certify_sigma2_coefficient_expansions(lam, 0, 1, l, Rational(2 + eps));
      if (c.verdict != Verdict::sharpness_witness) agg.fail("no positive diagonal coefficient at A = 2 + " + to_string(eps));
      else agg.ok();
    }
  }
  return agg.finish(opts, "lambda = (1, 0, ..., 0): diagonal coefficient A - 2");
}

// ---------------------------------------------------------------------------

Certificate euler_identity(const SuiteOptions& opts) {
  Aggregate agg("euler-identity");
  RationalSampler rs = sampler_for(opts, "euler-identity");
  const int count = trials(opts, 1000);
  for (int t = 0; t < count; ++t) {
    const int n = static_cast<int>(rs.integer(2, 8));
    RSpectrum lam(rs.vector(static_cast<std::size_t>(n)));
    for (int k = 1; k <= n; ++k) {
      Rational r = symfun::euler_identity_residual(lam, k);
      if (r != 0) {
        std::vector<ScalarValue> w = as_values(std::vector<Rational>(lam.entries().begin(), lam.entries().end()));
        agg.fail("nonzero residual at k = " + std::to_string(k), std::move(w));
      } else {
        agg.ok();
      }
    }
  }
  agg.cert().with("n_max", static_cast<std::int64_t>(8));
  return agg.finish(opts, "sum_i lambda_i sigma_{k-1}(lambda|i) = k sigma_k, all 1 <= k <= n");
}

Certificate sigman_minor_formula(const SuiteOptions& opts) {
  Aggregate agg("sigman-minor-formula");
  RationalSampler rs = sampler_for(opts, "sigman-minor-formula");
  const int count = trials(opts, 100);
  for (int t = 0; t < count; ++t) agg.add(certify::certify_minor_formula(rs.any(), 8));
  agg.cert().with("kmax", static_cast<std::int64_t>(8));
  return agg.finish(opts, "cofactor determinants equal (alpha+1)^(k-1) (alpha+1-k)");
}

Certificate sigman_a1_threshold(const SuiteOptions& opts, int n) {
  return certify::certify_a1_threshold(n, opts.A.value_or(make_rational(n, n - 1)));
}

Certificate sigman_a1_threshold_grid(const SuiteOptions& opts) {
  Aggregate agg("sigman-a1-threshold-grid");
  for (int n : {3, 4, 5, 6}) {
    const Rational bound = make_rational(n, n - 1);
    for (int s = 21; s <= 39; ++s) {
      const Rational A = make_rational(s, 20);
      Certificate c = certify::certify_a1_threshold(n, A);
      const bool should_pass = A <= bound;
      if (should_pass) {
        if (c.verdict != Verdict::pass) agg.fail("threshold fails inside the range", {Rational(n), A});
        else agg.ok();
        continue;
      }
      if (c.verdict != Verdict::fail || !c.witness) {
        agg.fail("threshold passes above n/(n-1)", {Rational(n), A});
        continue;
      }
      // Re-check the witness independently: lambda = 1 and b = y give a1 > 0.
      std::vector<Rational> b;
      for (const auto& w : *c.witness) b.push_back(std::get<Rational>(w));
      RSpectrum ones(std::vector<Rational>(static_cast<std::size_t>(n), Rational(1)));
      auto slice = certify::complete_third_derivatives(ones, static_cast<std::size_t>(n - 1), b, n);
      if (certify::eval_a_coefficients(slice, A).a1 <= 0) agg.fail("witness does not make a1 positive", {Rational(n), A});
      else agg.ok();
    }
  }
  return agg.finish(opts, "A on 21/20..39/20: pass iff A <= n/(n-1); every fail re-checked");
}

Certificate sigman_a_expansion(const SuiteOptions& opts) {
  Aggregate agg("sigman-a-expansion");
  RationalSampler rs = sampler_for(opts, "sigman-a-expansion");
  const auto dims = sigman_dimensions(opts);
  const int count = trials(opts, 400);
  for (int t = 0; t < count; ++t) {
    const int n = dims[static_cast<std::size_t>(t) % dims.size()];
    const Rational A = opts.A.value_or(make_rational(n, n - 1));
    RSpectrum lam(rs.positive_vector(static_cast<std::size_t>(n)));
    const auto m = static_cast<std::size_t>(rs.integer(0, n - 1));
    auto slice = certify::complete_third_derivatives(lam, m, rs.vector(static_cast<std::size_t>(n - 1)), n);
    agg.add(certify::verify_a_expansion(slice, A));
  }
  return agg.finish(opts, "I + II = sigma_n^2 / lambda_m^2 (a1 lambda_m^2 + a2 lambda_m + a3)");
}

Certificate sigman_a2_identity(const SuiteOptions& opts) {
  Aggregate agg("sigman-a2-identity");
  RationalSampler rs = sampler_for(opts, "sigman-a2-identity");
  const auto dims = sigman_dimensions(opts);
  const int count = trials(opts, 1000);
  int signed_trials = 0;
  for (int t = 0; t < count; ++t) {
    const int n = dims[static_cast<std::size_t>(t) % dims.size()];
    // Without an override, A sweeps 0, 1/10, ..., 2 so both sides of A^2 = 2 are hit.
    const Rational A = opts.A.value_or(make_rational(rs.integer(0, 20), 10));
    auto y = rs.vector(static_cast<std::size_t>(n - 1));
    auto p = rs.probability(static_cast<std::size_t>(n - 1));
    Certificate c = certify::verify_a2_identity_and_sign(y, p, A);
    if (A * A <= 2) ++signed_trials;
    agg.add(c);
  }
  agg.cert().with("sign_checked_trials", static_cast<std::int64_t>(signed_trials));
  return agg.finish(opts, "-a2/lambda equals the completed-square form; >= 0 whenever A^2 <= 2");
}

Certificate sigman_a2_n3_definite(const SuiteOptions& opts) {
  Certificate c = certify::certify_a2_n3_definiteness(opts.A.value_or(make_rational(3, 2)), 100);
  c.with("seed", static_cast<std::int64_t>(opts.seed));
  return c;
}

Certificate sigman_a3_sign(const SuiteOptions& opts) {
  const Rational A = opts.A.value_or(Rational(2));
  Aggregate agg("sigman-a3-sign");
  agg.cert().with("A", A);
  RationalSampler rs = sampler_for(opts, "sigman-a3-sign");
  const auto dims = sigman_dimensions(opts);
  const int count = trials(opts, 10000);
  for (int t = 0; t < count; ++t) {
    const int n = dims[static_cast<std::size_t>(t) % dims.size()];
    auto lam = rs.positive_vector(static_cast<std::size_t>(n - 1));
    auto b = rs.vector(static_cast<std::size_t>(n - 1));
    agg.add(certify::verify_a3_sign(lam, b, A));
  }
  return agg.finish(opts, "defining and paired forms agree; a3 <= 0");
}

Certificate sigman_combined(const SuiteOptions& opts, int n) {
  const Rational bound = make_rational(n, n - 1);
  const Rational A = opts.A.value_or(bound);
  Aggregate agg("sigman-combined");
  agg.cert().with("n", static_cast<std::int64_t>(n)).with("A", A);
  RationalSampler rs = sampler_for(opts, "sigman-combined-" + std::to_string(n));
  const int count = trials(opts, 10000);
  const bool in_range = A <= bound;
  Rational worst(0);
  bool have_worst = false;
  for (int t = 0; t < count; ++t) {
    // Slice lambda_i (i != m) and lambda_m in (0, 1000].
    std::vector<Rational> full = rs.positive_vector(static_cast<std::size_t>(n));
    const std::int64_t den = rs.integer(1, 7);
    const auto m = static_cast<std::size_t>(rs.integer(0, n - 1));
    full[m] = make_rational(rs.integer(1, 1000 * den), den);
    RSpectrum lam(full);
    auto slice = certify::complete_third_derivatives(lam, m, rs.vector(static_cast<std::size_t>(n - 1)), n);
    const auto a = certify::eval_a_coefficients(slice, A);
    const Rational value = certify::combined_sigman_value(a, full[m]);
    if (!have_worst || value > worst) {
      worst = value;
      have_worst = true;
    }
    const bool positive = a.a1 > 0 || a.a2 > 0 || a.a3 > 0 || value > 0;
    if (!positive) {
      agg.ok();
      continue;
    }
    std::vector<ScalarValue> w = as_values(full);
    for (const auto& x : slice.b) w.emplace_back(x);
    Certificate c("sigman-combined");
    c.witness = std::move(w);
    if (in_range) {
      c.verdict = Verdict::fail;
      c.notes = "a coefficient or a1 lambda_m^2 + a2 lambda_m + a3 is positive at A <= n/(n-1)";
    } else {
      c.verdict = value > 0 ? Verdict::sharpness_witness : Verdict::pass;
      c.notes = "positive combined value above n/(n-1)";
    }
    agg.add(c);
  }
  agg.cert().with("max_value", worst);
  return agg.finish(opts, "a1, a2, a3 <= 0 and a1 lambda_m^2 + a2 lambda_m + a3 <= 0");
}

// ---------------------------------------------------------------------------

std::vector<Certificate> run_suite(std::string_view suite, const SuiteOptions& opts) {
  const bool all = suite == "all";
  if (!all && suite != "dim2" && suite != "sigma2" && suite != "sigman")
    throw std::invalid_argument("unknown suite '" + std::string(suite) + "' (dim2, sigma2, sigman, all)");
  std::vector<Certificate> out;
  if (all || suite == "dim2") {
    out.push_back(dim2_B_nonpositive(opts));
    out.push_back(dim2_B_best_constant(opts, {make_rational(201, 100), make_rational(21, 10), make_rational(3)}));
    out.push_back(dim2_gradient_identity(opts));
    out.push_back(dim2_equal_eigenvalues(opts));
    out.push_back(dim2_inequality(opts));
    out.push_back(dim2_inequality_sharpness(opts));
  }
  if (all || suite == "sigma2") {
    out.push_back(sigma2_sos(opts));
    out.push_back(sigma2_coefficient_expansions(opts));
    out.push_back(sigma2_best_constant(opts));
  }
  if (all || suite == "sigman") {
    const auto dims = sigman_dimensions(opts);
    out.push_back(euler_identity(opts));
    out.push_back(sigman_minor_formula(opts));
    for (int n : dims) out.push_back(sigman_a1_threshold(opts, n));
    out.push_back(sigman_a1_threshold_grid(opts));
    out.push_back(sigman_a_expansion(opts));
    out.push_back(sigman_a2_identity(opts));
    if (std::find(dims.begin(), dims.end(), 3) != dims.end()) out.push_back(sigman_a2_n3_definite(opts));
    out.push_back(sigman_a3_sign(opts));
    for (int n : dims) out.push_back(sigman_combined(opts, n));
  }
  return out;
}

}  // namespace crlab::suites
