#include "crlab/hessfield.hpp"

#include "crlab/jacobi.hpp"
#include "crlab/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crlab::hessfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t offset_node(const elliptic::Grid& g, std::size_t f, int axis, int step) {
  const std::size_t s = g.stride(axis);
  return step > 0 ? f + s * static_cast<std::size_t>(step) : f - s * static_cast<std::size_t>(-step);
}

// Offsets of the 3^dim - 1 neighbors; false if one falls outside the grid.
bool neighbors(const elliptic::Grid& g, const Index& idx, std::vector<std::size_t>& out) {
  out.clear();
  const int total = g.dim == 1 ? 3 : (g.dim == 2 ? 9 : 27);
  for (int code = 0; code < total; ++code) {
    int c = code;
    Index n = idx;
    bool self = true;
    for (int a = 0; a < g.dim; ++a) {
      const int d = c % 3 - 1;
      c /= 3;
      if (d != 0) self = false;
      const auto i = static_cast<std::size_t>(a);
      if (d < 0 && n[i] == 0) return false;
      if (d > 0 && n[i] + 1 >= g.counts[i]) return false;
      n[i] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n[i]) + d);
    }
    if (!self) out.push_back(g.flat(n));
  }
  return true;
}

double phi_at(const GridField& u, int k, const Index& node) {
  const HessianSample s = hessian_at(u, node);
  const double sk = s.sigma[static_cast<std::size_t>(k - 1)];
  return k == 2 ? 2.0 * sk : sk;
}

}  // namespace

double default_tol(double h) { return std::max(10.0 * h * h, 1e-8); }

double HessianSample::minor_discrepancy() const {
  double lam_max = 0.0;
  for (double l : eigenvalues) lam_max = std::max(lam_max, std::abs(l));
  const double base = std::max(1.0, lam_max);
  double worst = 0.0;
  for (std::size_t k = 0; k < sigma.size(); ++k)
    worst = std::max(worst, std::abs(sigma[k] - minor_sums[k]) / std::pow(base, static_cast<double>(k + 1)));
  return worst;
}

std::vector<double> principal_minor_sums(const std::array<double, 9>& H, int n) {
  if (n < 1 || n > 3) throw std::invalid_argument("principal minors for 1 <= n <= 3");
  auto at = [&](int i, int j) { return H[static_cast<std::size_t>(i * n + j)]; };
  std::vector<double> out;
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += at(i, i);
  out.push_back(trace);
  if (n >= 2) {
    double m2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) m2 += at(i, i) * at(j, j) - at(i, j) * at(j, i);
    out.push_back(m2);
  }
  if (n == 3) {
    out.push_back(at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                  at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                  at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0)));
  }
  return out;
}

HessianSample hessian_at(const GridField& u, const Index& node, std::optional<double> tol) {
  const auto& g = u.grid;
  for (int a = 0; a < g.dim; ++a)
    if (node[static_cast<std::size_t>(a)] >= g.counts[static_cast<std::size_t>(a)])
      throw std::invalid_argument("node outside the grid");
  if (g.depth(node) < 1) throw std::invalid_argument("Hessian needs a node at least one step from the boundary");

  HessianSample s;
  s.location = node;
  s.dim = g.dim;
  s.tol_used = tol.value_or(default_tol(g.h));
  const std::size_t f = g.flat(node);
  const double inv_h2 = 1.0 / (g.h * g.h);
  const auto n = static_cast<std::size_t>(g.dim);
  const auto& v = u.values;
  for (int a = 0; a < g.dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    s.H[i * n + i] = (v[offset_node(g, f, a, 1)] - 2.0 * v[f] + v[offset_node(g, f, a, -1)]) * inv_h2;
    for (int b = a + 1; b < g.dim; ++b) {
      const auto j = static_cast<std::size_t>(b);
      const std::size_t pp = offset_node(g, offset_node(g, f, a, 1), b, 1);
      const std::size_t pm = offset_node(g, offset_node(g, f, a, 1), b, -1);
      const std::size_t mp = offset_node(g, offset_node(g, f, a, -1), b, 1);
      const std::size_t mm = offset_node(g, offset_node(g, f, a, -1), b, -1);
      const double cross = (v[pp] - v[pm] - v[mp] + v[mm]) * 0.25 * inv_h2;
      s.H[i * n + j] = cross;
      s.H[j * n + i] = cross;
    }
  }

  std::vector<double> dense(s.H.begin(), s.H.begin() + static_cast<std::ptrdiff_t>(n * n));
  s.eigenvalues = jacobi_eigen(std::move(dense), n).values;
  for (int k = 1; k <= g.dim; ++k) s.sigma.push_back(symfun::elementary_symmetric<double>(s.eigenvalues, k));
  s.minor_sums = principal_minor_sums(s.H, g.dim);

  double lam_max = 0.0;
  for (double l : s.eigenvalues) lam_max = std::max(lam_max, std::abs(l));
  const double threshold = s.tol_used * std::max(1.0, lam_max);
  for (double l : s.eigenvalues)
    if (std::abs(l) > threshold) ++s.numeric_rank;
  return s;
}

SigmaMap sigma_fieldmap(const GridField& u, int k, std::optional<double> tol) {
  if (k < 1 || k > u.grid.dim)
    throw std::invalid_argument("sigma_k field needs 1 <= k <= dim, got k = " + std::to_string(k));
  SigmaMap out{k, GridField(u.grid), std::vector<std::uint8_t>(u.values.size(), 0), {}};
  for (std::size_t f = 0; f < u.values.size(); ++f) {
    const Index idx = u.grid.multi(f);
    if (u.grid.depth(idx) < 1) continue;
    out.valid[f] = 1;
    HessianSample s = hessian_at(u, idx, tol);
    out.values.values[f] = s.sigma[static_cast<std::size_t>(k - 1)];
    out.samples.push_back(std::move(s));
  }
  return out;
}

MinimaReport find_local_minima(const GridField& f, const std::vector<std::uint8_t>& valid, std::string field_id) {
  const auto& g = f.grid;
  if (!valid.empty() && valid.size() != f.values.size()) throw std::invalid_argument("mask size does not match field");
  MinimaReport rep;
  rep.field_id = std::move(field_id);
  rep.interior_min = kInf;
  rep.boundary_min = kInf;
  std::vector<std::size_t> nb;
  for (std::size_t p = 0; p < f.values.size(); ++p) {
    if (!valid.empty() && !valid[p]) continue;
    const Index idx = g.multi(p);
    bool interior = neighbors(g, idx, nb);
    if (interior && !valid.empty())
      interior = std::all_of(nb.begin(), nb.end(), [&](std::size_t q) { return valid[q] != 0; });
    const double value = f.values[p];
    if (!interior) {
      if (value < rep.boundary_min) {
        rep.boundary_min = value;
        rep.boundary_argmin = idx;
      }
      continue;
    }
    rep.has_interior = true;
    if (value < rep.interior_min) {
      rep.interior_min = value;
      rep.interior_argmin = idx;
    }
    if (std::all_of(nb.begin(), nb.end(), [&](std::size_t q) { return value <= f.values[q]; }))
      rep.minima.emplace_back(idx, value);
  }
  return rep;
}

Certificate MinimaReport::to_certificate() const {
  Certificate c("minima:" + field_id);
  c.with("count", static_cast<std::int64_t>(minima.size()));
  c.with("interior_min", interior_min).with("boundary_min", boundary_min);
  c.with("min_on_margin", !has_interior || boundary_min <= interior_min);
  std::vector<ScalarValue> w;
  for (std::size_t m = 0; m < minima.size() && m < 32; ++m) {
    for (std::size_t a = 0; a < 3; ++a) w.emplace_back(static_cast<double>(minima[m].first[a]));
    w.emplace_back(minima[m].second);
  }
  if (!w.empty()) c.witness = std::move(w);
  c.residual = 0.0;
  c.verdict = Verdict::pass;
  c.notes = "non-strict local minima; witness rows (i, j, k, value)";
  return c;
}

double probe_inequality(const GridField& u, const elliptic::Nonlinearity& nl, int k, const Index& node) {
  const auto& g = u.grid;
  if (g.dim < 2) throw std::invalid_argument("probe needs dim >= 2");
  if (k != 2 && k != g.dim) throw std::invalid_argument("probe is defined for k = 2 or k = dim");
  if (g.depth(node) < 2) throw std::invalid_argument("probe needs a node at least two steps from the boundary");
  const double center = phi_at(u, k, node);
  double lap = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    Index plus = node, minus = node;
    ++plus[static_cast<std::size_t>(a)];
    --minus[static_cast<std::size_t>(a)];
    lap += phi_at(u, k, plus) + phi_at(u, k, minus) - 2.0 * center;
  }
  lap /= g.h * g.h;
  const double value = u.at(node);
  if (!nl.valid_range.contains(value)) throw elliptic::RangeError("probe node outside the valid range of G");
  return lap - k * nl.gp(value) * center;
}

namespace {

PhiSummary summarize(const GridField& u, const elliptic::Nonlinearity& nl, const SigmaMap& map, double tol,
                     bool degenerate, const std::string& id) {
  PhiSummary s;
  s.k = map.k;
  s.minima = find_local_minima(map.values, map.valid, id);
  s.min_on_margin = !s.minima.has_interior || s.minima.boundary_min <= s.minima.interior_min;
  for (const auto& [node, value] : s.minima.minima) {
    if (value <= tol) continue;
    s.no_positive_interior_min = false;
    const double p = probe_inequality(u, nl, map.k, node);
    s.probes.emplace_back(node, p);
    s.probe_max = std::max(s.probe_max, p);
  }
  s.degenerate_branch = degenerate;
  s.dichotomy = s.no_positive_interior_min || s.degenerate_branch;
  return s;
}

Certificate summary_record(const std::string& id, const PhiSummary& s, const ConclusionVerdict& v) {
  Certificate c(id);
  c.with("k", static_cast<std::int64_t>(s.k));
  c.with("min_valid", std::min(s.minima.interior_min, s.minima.boundary_min));
  c.with("min_on_margin", s.min_on_margin);
  c.with("interior_minima", static_cast<std::int64_t>(s.minima.minima.size()));
  c.with("no_positive_interior_min", s.no_positive_interior_min);
  c.with("degenerate_branch", s.degenerate_branch);
  c.with("probes", static_cast<std::int64_t>(s.probes.size()));
  if (!s.probes.empty()) c.with("probe_max", s.probe_max);
  c.with("eps_h", v.eps_h).with("tol", v.tol);
  c.residual = 0.0;
  const bool probes_ok = s.probes.empty() || s.probe_max <= v.eps_h;
  if (!v.applicable) {
    c.verdict = Verdict::inapplicable;
    c.notes = "field is not convex within tol";
  } else if (s.dichotomy && probes_ok) {
    c.verdict = Verdict::pass;
    c.notes = s.no_positive_interior_min ? "no interior local minimum above tol" : "degenerate branch";
  } else {
    c.verdict = Verdict::fail;
    c.notes = !s.dichotomy ? "positive interior local minimum away from the degenerate branch"
                           : "probe above the guard band at an interior minimum";
    std::vector<ScalarValue> w;
    for (const auto& [node, p] : s.probes) {
      for (std::size_t a = 0; a < 3; ++a) w.emplace_back(static_cast<double>(node[a]));
      w.emplace_back(p);
    }
    if (!w.empty()) c.witness = std::move(w);
  }
  return c;
}

}  // namespace

ConclusionVerdict verify_conclusions(const GridField& u, const elliptic::Nonlinearity& nl, double tol) {
  const int dim = u.grid.dim;
  if (dim < 2) throw std::invalid_argument("conclusions need dim >= 2");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  ConclusionVerdict v;
  v.tol = tol;
  v.eps_h = 10.0 * u.grid.h;

  const SigmaMap s2 = sigma_fieldmap(u, 2, tol);
  const SigmaMap sn = dim == 2 ? s2 : sigma_fieldmap(u, dim, tol);

  v.min_eigenvalue = kInf;
  v.min_rank = dim;
  v.max_rank = 0;
  bool rank_one = true;
  for (const auto& s : s2.samples) {
    v.min_eigenvalue = std::min(v.min_eigenvalue, s.eigenvalues.front());
    v.min_rank = std::min(v.min_rank, s.numeric_rank);
    v.max_rank = std::max(v.max_rank, s.numeric_rank);
    v.minor_discrepancy_max = std::max(v.minor_discrepancy_max, s.minor_discrepancy());
    rank_one = rank_one && s.numeric_rank == 1;
  }
  if (s2.samples.empty()) throw std::invalid_argument("field has no node with a Hessian");
  v.applicable = v.min_eigenvalue >= -tol;

  bool det_small = true;
  for (const auto& s : sn.samples) det_small = det_small && s.sigma[static_cast<std::size_t>(dim - 1)] <= tol;

  v.sigma2 = summarize(u, nl, s2, tol, rank_one, "sigma2");
  v.sigman = summarize(u, nl, sn, tol, det_small, "sigma" + std::to_string(dim));
  auto probes_ok = [&](const PhiSummary& s) { return s.probes.empty() || s.probe_max <= v.eps_h; };
  v.pass = v.applicable && v.sigma2.dichotomy && v.sigman.dichotomy && probes_ok(v.sigma2) && probes_ok(v.sigman);
  return v;
}

std::vector<Certificate> ConclusionVerdict::records() const {
  std::vector<Certificate> out;
  Certificate convex("conclusion-convexity");
  convex.with("min_eigenvalue", min_eigenvalue).with("tol", tol);
  convex.with("min_rank", static_cast<std::int64_t>(min_rank)).with("max_rank", static_cast<std::int64_t>(max_rank));
  convex.with("minor_discrepancy_max", minor_discrepancy_max);
  convex.residual = 0.0;
  convex.verdict = applicable ? Verdict::pass : Verdict::inapplicable;
  convex.notes = applicable ? "min eigenvalue >= -tol" : "min eigenvalue < -tol; the theorems assume convexity";
  out.push_back(convex);
  out.push_back(sigma2.minima.to_certificate());
  out.push_back(summary_record("conclusion-sigma2", sigma2, *this));
  if (sigman.k != 2) {
    out.push_back(sigman.minima.to_certificate());
    out.push_back(summary_record("conclusion-sigman", sigman, *this));
  } else {
    Certificate same = summary_record("conclusion-sigman", sigman, *this);
    same.notes += "; sigma_n = sigma_2 in two dimensions";
    out.push_back(same);
  }
  Certificate overall("conclusions");
  overall.with("applicable", applicable).with("tol", tol).with("eps_h", eps_h);
  overall.residual = 0.0;
  overall.verdict = !applicable ? Verdict::inapplicable : (pass ? Verdict::pass : Verdict::fail);
  out.push_back(overall);
  return out;
}

}  // namespace crlab::hessfield
