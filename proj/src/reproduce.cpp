#include "crlab/commands.hpp"
#include "crlab/elliptic.hpp"
#include "crlab/hessfield.hpp"
#include "crlab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace crlab::cli {

namespace {

using namespace crlab::elliptic;
using crlab::suites::SuiteOptions;

SuiteOptions suite_options(const ReproduceOptions& opts) {
  SuiteOptions s;
  s.seed = opts.seed;
  s.quick = opts.quick;
  return s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

std::string verdict_list(const std::vector<Certificate>& certs) {
  std::string s;
  for (const auto& c : certs) {
    if (!s.empty()) s += ", ";
    s += c.claim_id + "=" + std::string(to_string(c.verdict));
    if (const ParamValue* t = c.find("trials"); t && std::holds_alternative<std::int64_t>(*t))
      s += " (" + std::to_string(std::get<std::int64_t>(*t)) + ")";
  }
  return s;
}

bool all_pass(const std::vector<Certificate>& certs) {
  return std::all_of(certs.begin(), certs.end(), [](const Certificate& c) { return c.verdict == Verdict::pass; });
}

CriterionRow certificate_row(int id, std::string name, std::string expected, std::vector<Certificate> certs) {
  CriterionRow row;
  row.id = id;
  row.name = std::move(name);
  row.expected = std::move(expected);
  row.measured = verdict_list(certs);
  row.pass = all_pass(certs);
  row.records = std::move(certs);
  return row;
}

GridField with_boundary(const Grid& g, const PointFunction& bc) {
  GridField init(g);
  for (std::size_t f = 0; f < g.size(); ++f)
    if (init.boundary[f]) init.values[f] = bc(g.coord(g.multi(f)));
  return init;
}

CriterionRow solver_order() {
  CriterionRow row;
  row.id = 9;
  row.name = "solver-order";
  row.expected = "error ratios in [3.6, 4.4]; sup error at h=1/128 < 5e-5";
  const Nonlinearity nl = exp_family(2.0);
  const PointFunction bc = [](const Point& x) { return exact_profile(x[0]); };
  std::vector<double> errs;
  bool converged = true;
  for (int m : {32, 64, 128}) {
    const Grid g = Grid::box(1, -1.0, 1.0, 1.0 / m);
    SolveResult r = solve(nl, g, bc, with_boundary(g, bc));
    converged = converged && r.report.converged;
    double err = 0.0;
    for (std::size_t f = 0; f < g.size(); ++f)
      err = std::max(err, std::abs(r.u.values[f] - bc(g.coord(g.multi(f)))));
    errs.push_back(err);
    Certificate c("solve-1d-profile:h=1/" + std::to_string(m));
    c.with("iterations", static_cast<std::int64_t>(r.report.iterations));
    c.with("final_residual_sup", r.report.final_residual_sup).with("converged", r.report.converged);
    c.with("error_sup", err);
    c.residual = err;
    c.verdict = r.report.converged ? Verdict::pass : Verdict::fail;
    row.records.push_back(c);
  }
  const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
  row.pass = converged && r1 >= 3.6 && r1 <= 4.4 && r2 >= 3.6 && r2 <= 4.4 && errs[2] < 5e-5;
  row.measured = "ratios " + fmt(r1) + ", " + fmt(r2) + "; error(1/128) " + fmt(errs[2]);
  return row;
}

CriterionRow rank_one() {
  CriterionRow row;
  row.id = 10;
  row.name = "rank-one";
  const double h = 1.0 / 64;
  row.expected = "numeric_rank 1 at every valid node; sup |sigma_2| <= 10 h^2 = " + fmt(10 * h * h);
  const Nonlinearity nl = exp_family(2.0);
  const Grid g = Grid::box(2, -1.0, 1.0, h);
  const PointFunction bc = [](const Point& x) { return exact_profile(x[1]); };
  SolveResult r = solve(nl, g, bc, harmonic_extension(g, bc));
  const double tol = hessfield::default_tol(h);
  const hessfield::SigmaMap s2 = hessfield::sigma_fieldmap(r.u, 2, tol);
  int min_rank = 2, max_rank = 0;
  double sigma_sup = 0.0;
  for (const auto& s : s2.samples) {
    min_rank = std::min(min_rank, s.numeric_rank);
    max_rank = std::max(max_rank, s.numeric_rank);
    sigma_sup = std::max(sigma_sup, std::abs(s.sigma[1]));
  }
  Certificate c("rank-one-lncosh");
  c.with("nodes", static_cast<std::int64_t>(s2.samples.size())).with("tol", tol);
  c.with("min_rank", static_cast<std::int64_t>(min_rank)).with("max_rank", static_cast<std::int64_t>(max_rank));
  c.with("sigma2_sup", sigma_sup).with("converged", r.report.converged);
  c.residual = sigma_sup;
  row.pass = r.report.converged && min_rank == 1 && max_rank == 1 && sigma_sup <= 10 * h * h;
  c.verdict = row.pass ? Verdict::pass : Verdict::fail;
  row.records.push_back(c);
  const hessfield::ConclusionVerdict v = hessfield::verify_conclusions(r.u, nl, tol);
  for (auto& rec : v.records()) row.records.push_back(std::move(rec));
  row.measured = "rank " + std::to_string(min_rank) + ".." + std::to_string(max_rank) + " over " +
                 std::to_string(s2.samples.size()) + " nodes; sup |sigma_2| " + fmt(sigma_sup);
  return row;
}

CriterionRow minimum_principle() {
  CriterionRow row;
  row.id = 11;
  row.name = "minimum-principle";
  row.expected = "strictly convex; sigma_2 and det minima on the margin; probes <= eps_h; eps_h decreasing";
  const Nonlinearity nl = power_family(2.0);
  const RadialProfile profile(nl, 2, 1.0, 1.5);
  const PointFunction bc = [&](const Point& x) { return profile(std::hypot(x[0], x[1])); };
  bool pass = true;
  std::vector<double> eps;
  std::string measured;
  for (int m : {32, 64}) {
    const double h = 1.0 / m;
    const Grid g = Grid::box(2, -1.0, 1.0, h);
    SolveResult r = solve(nl, g, bc, harmonic_extension(g, bc));
    const double tol = hessfield::default_tol(h);
    const hessfield::ConclusionVerdict v = hessfield::verify_conclusions(r.u, nl, tol);
    const bool strict = v.min_eigenvalue > tol;
    const bool probes_ok = (v.sigma2.probes.empty() || v.sigma2.probe_max <= v.eps_h) &&
                           (v.sigman.probes.empty() || v.sigman.probe_max <= v.eps_h);
    const bool ok = r.report.converged && v.applicable && strict && v.sigma2.min_on_margin &&
                    v.sigman.min_on_margin && probes_ok && v.pass;
    pass = pass && ok;
    eps.push_back(v.eps_h);
    Certificate c("minimum-principle:h=1/" + std::to_string(m));
    c.with("converged", r.report.converged).with("min_eigenvalue", v.min_eigenvalue);
    c.with("sigma2_min_on_margin", v.sigma2.min_on_margin).with("det_min_on_margin", v.sigman.min_on_margin);
    c.with("interior_minima", static_cast<std::int64_t>(v.sigma2.minima.minima.size()));
    c.with("probes", static_cast<std::int64_t>(v.sigma2.probes.size() + v.sigman.probes.size()));
    c.with("eps_h", v.eps_h);
    c.residual = 0.0;
    c.verdict = ok ? Verdict::pass : Verdict::fail;
    row.records.push_back(c);
    for (auto& rec : v.records()) {
      rec.claim_id += ":h=1/" + std::to_string(m);
      row.records.push_back(std::move(rec));
    }
    if (!measured.empty()) measured += "; ";
    measured += "h=1/" + std::to_string(m) + ": min eig " + fmt(v.min_eigenvalue) + ", margin min " +
                (v.sigma2.min_on_margin ? "yes" : "no") + ", probes " +
                std::to_string(v.sigma2.probes.size() + v.sigman.probes.size());
  }
  pass = pass && eps[1] < eps[0];
  row.measured = measured + "; eps_h " + fmt(eps[0]) + " -> " + fmt(eps[1]);
  row.pass = pass;
  return row;
}

template <class F>
CriterionRow timed(double budget, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionRow row = body();
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  row.budget = budget;
  return row;
}

}  // namespace

std::vector<CriterionRow> run_criteria(const ReproduceOptions& opts) {
  namespace s = crlab::suites;
  const SuiteOptions base = suite_options(opts);
  std::vector<CriterionRow> rows;

  rows.push_back(timed(5, [&] {
    return certificate_row(1, "euler-identity", "exact zero residual, n <= 8, k <= n", {s::euler_identity(base)});
  }));
  rows.push_back(timed(1, [&] {
    SuiteOptions o = base;
    o.A = make_rational(2);
    return certificate_row(2, "B-certificate", "A=2 coefficients <= 0; witness B2(0)=A-2 at A in {21/10, 3}",
                           {s::dim2_B_nonpositive(o),
                            s::dim2_B_best_constant(o, {make_rational(21, 10), make_rational(3)})});
  }));
  rows.push_back(timed(5, [&] {
    SuiteOptions o = base;
    o.A = make_rational(2);
    return certificate_row(3, "dim2-routes", "both routes agree exactly; value <= 0 at A=2",
                           {s::dim2_inequality(o)});
  }));
  rows.push_back(timed(5, [&] {
    return certificate_row(4, "minor-formula", "closed formula exact for k <= 8; a1 passes iff A <= n/(n-1)",
                           {s::sigman_minor_formula(base), s::sigman_a1_threshold_grid(base)});
  }));
  rows.push_back(timed(10, [&] {
    SuiteOptions o = base;
    o.A = make_rational(3, 2);
    return certificate_row(5, "a2-identity", "exact residual 0 for n <= 6; >= 0 when A^2 <= 2; n=3 definite at A=3/2",
                           {s::sigman_a2_identity(base), s::sigman_a2_n3_definite(o)});
  }));
  rows.push_back(timed(10, [&] {
    return certificate_row(6, "a3-bound", "forms agree exactly; a3 <= 0 at A=2", {s::sigman_a3_sign(base)});
  }));
  rows.push_back(timed(10, [&] {
    return certificate_row(7, "sigma2-sos", "exact residual 0 for n in 3..6; SOS forms <= 0",
                           {s::sigma2_sos(base)});
  }));
  rows.push_back(timed(15, [&] {
    std::vector<Certificate> certs;
    for (int n : {3, 4, 5, 6}) certs.push_back(s::sigman_combined(base, n));
    return certificate_row(8, "combined-sigman", "a1 lm^2 + a2 lm + a3 <= 0 at A = n/(n-1)", std::move(certs));
  }));
  rows.push_back(timed(5, [] { return solver_order(); }));
  rows.push_back(timed(5, [] { return rank_one(); }));
  rows.push_back(timed(30, [] { return minimum_principle(); }));
  return rows;
}

}  // namespace crlab::cli
