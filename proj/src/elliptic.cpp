#include "crlab/elliptic.hpp"

#include "crlab/scalar.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace crlab::elliptic {

double Nonlinearity::ratio(double u) const {
  const double d = gp(u);
  return g(u) * gpp(u) / (d * d);
}

namespace {

void require_structure(const Nonlinearity& nl) {
  const StructureCheck c = check_structure(nl);
  if (!c.ok) {
    std::ostringstream msg;
    msg << "nonlinearity " << nl.id << " violates G > 0, G' < 0, G G'' <= A G'^2 at u = " << c.worst_u;
    throw std::logic_error(msg.str());
  }
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return value;
}

std::string node_name(const Grid& g, const Index& idx) {
  std::string s = "(";
  for (int a = 0; a < g.dim; ++a) s += (a ? "," : "") + std::to_string(idx[static_cast<std::size_t>(a)]);
  return s + ")";
}

[[noreturn]] void range_failure(const Nonlinearity& nl, const Grid& g, std::size_t flat, double value) {
  std::ostringstream msg;
  msg << "G of " << nl.id << " evaluated outside its valid range (" << nl.valid_range.lo << ", "
      << nl.valid_range.hi << ") at node " << node_name(g, g.multi(flat)) << " where u = " << value;
  throw RangeError(msg.str());
}

double laplacian(const GridField& u, std::size_t f) {
  const Grid& g = u.grid;
  const double inv_h2 = 1.0 / (g.h * g.h);
  double lap = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const std::size_t s = g.stride(a);
    lap += (u.values[f + s] + u.values[f - s] - 2.0 * u.values[f]) * inv_h2;
  }
  return lap;
}

// Interior nodes in flat order and the inverse map.
struct Numbering {
  std::vector<std::size_t> nodes;
  std::vector<std::ptrdiff_t> slot;

  explicit Numbering(const GridField& u) : slot(u.values.size(), -1) {
    for (std::size_t f = 0; f < u.values.size(); ++f)
      if (!u.boundary[f]) {
        slot[f] = static_cast<std::ptrdiff_t>(nodes.size());
        nodes.push_back(f);
      }
  }
};

// Residual on interior nodes; throws RangeError if G is evaluated out of range.
double residual(const GridField& u, const Nonlinearity& nl, const Numbering& num, Eigen::VectorXd& r) {
  r.resize(static_cast<Eigen::Index>(num.nodes.size()));
  double sup = 0.0;
  for (std::size_t k = 0; k < num.nodes.size(); ++k) {
    const std::size_t f = num.nodes[k];
    const double v = u.values[f];
    if (!nl.valid_range.contains(v)) range_failure(nl, u.grid, f, v);
    r[static_cast<Eigen::Index>(k)] = laplacian(u, f) - nl.g(v);
    sup = std::max(sup, std::abs(r[static_cast<Eigen::Index>(k)]));
  }
  return sup;
}

// Discrete Laplacian minus diag(shift) on the interior unknowns.
Eigen::SparseMatrix<double> operator_matrix(const GridField& u, const Numbering& num, const std::vector<double>& shift) {
  const Grid& g = u.grid;
  const double inv_h2 = 1.0 / (g.h * g.h);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(num.nodes.size() * static_cast<std::size_t>(2 * g.dim + 1));
  for (std::size_t k = 0; k < num.nodes.size(); ++k) {
    const std::size_t f = num.nodes[k];
    const auto row = static_cast<int>(k);
    t.emplace_back(row, row, -2.0 * g.dim * inv_h2 - shift[k]);
    for (int a = 0; a < g.dim; ++a) {
      const std::size_t s = g.stride(a);
      for (std::size_t nb : {f + s, f - s})
        if (num.slot[nb] >= 0) t.emplace_back(row, static_cast<int>(num.slot[nb]), inv_h2);
    }
  }
  const auto n = static_cast<Eigen::Index>(num.nodes.size());
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Symmetric factorization of the (symmetric) stencil matrix, with LU as the
// fallback when LDL^T without pivoting is not accurate enough. Both are
// refined until the relative residual is <= 1e-10.
class LinearSolver {
 public:
  explicit LinearSolver(int dim) : iterative_(dim == 3) {}

  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& rhs) {
    // In 3D direct fill-in dominates; try conjugate gradients on -m first,
    // which is positive definite whenever |G'| stays below the Laplacian's
    // smallest eigenvalue.
    if (iterative_) {
      const Eigen::SparseMatrix<double> neg = -m;
      cg_.setTolerance(1e-12);
      cg_.setMaxIterations(2000);
      cg_.compute(neg);
      Eigen::VectorXd x = cg_.solve(Eigen::VectorXd(-rhs));
      if (cg_.info() == Eigen::Success && (rhs - m * x).norm() <= 1e-10 * std::max(rhs.norm(), 1e-300)) return x;
    }
    if (!analyzed_) {
      ldlt_.analyzePattern(m);
      analyzed_ = true;
    }
    ldlt_.factorize(m);
    Eigen::VectorXd x;
    if (ldlt_.info() == Eigen::Success && refine(ldlt_, m, rhs, x)) return x;
    lu_.compute(m);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("stencil matrix factorization failed");
    if (!refine(lu_, m, rhs, x)) throw std::runtime_error("linear solve missed relative residual 1e-10");
    return x;
  }

 private:
  template <class F>
  static bool refine(F& f, const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& rhs, Eigen::VectorXd& x) {
    x = f.solve(rhs);
    const double scale = std::max(rhs.norm(), 1e-300);
    for (int pass = 0; pass < 4; ++pass) {
      Eigen::VectorXd res = rhs - m * x;
      if (!std::isfinite(res.norm())) return false;
      if (res.norm() <= 1e-10 * scale) return true;
      x += f.solve(res);
    }
    return (rhs - m * x).norm() <= 1e-10 * scale;
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg_;
  bool iterative_;
  bool analyzed_ = false;
};

}  // namespace

Nonlinearity exp_family(double beta) {
  if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("exp family needs beta > 0");
  Nonlinearity nl;
  nl.id = "exp:" + to_string(beta);
  nl.g = [beta](double u) { return std::exp(-beta * u); };
  nl.gp = [beta](double u) { return -beta * std::exp(-beta * u); };
  nl.gpp = [beta](double u) { return beta * beta * std::exp(-beta * u); };
  nl.A_struct = 1.0;
  require_structure(nl);
  return nl;
}

Nonlinearity power_family(double p) {
  if (!(p > 0) || !std::isfinite(p)) throw std::invalid_argument("power family needs p > 0");
  Nonlinearity nl;
  nl.id = "power:" + to_string(p);
  nl.g = [p](double u) { return std::pow(u, -p); };
  nl.gp = [p](double u) { return -p * std::pow(u, -p - 1.0); };
  nl.gpp = [p](double u) { return p * (p + 1.0) * std::pow(u, -p - 2.0); };
  nl.A_struct = (p + 1.0) / p;
  nl.valid_range = Interval{0.0, std::numeric_limits<double>::infinity()};
  require_structure(nl);
  return nl;
}

Nonlinearity nonlinearity_from_id(std::string_view id) {
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("nonlinearity id must be family:parameter");
  const auto family = id.substr(0, colon);
  const double parameter = parse_double(id.substr(colon + 1));
  if (family == "exp") return exp_family(parameter);
  if (family == "power") return power_family(parameter);
  throw std::invalid_argument("unknown nonlinearity family '" + std::string(family) + "' (exp, power)");
}

std::vector<Nonlinearity> builtin_nonlinearities() {
  return {exp_family(1.0), exp_family(2.0), power_family(1.0), power_family(2.0), power_family(3.0)};
}

StructureCheck check_structure(const Nonlinearity& nl, int samples) {
  StructureCheck out;
  out.samples = samples;
  const Interval& r = nl.valid_range;
  const bool half_line = r.lo == 0.0 && std::isinf(r.hi);
  for (int s = 0; s < samples; ++s) {
    const double t = samples > 1 ? static_cast<double>(s) / (samples - 1) : 0.5;
    double u = half_line ? std::pow(10.0, -3.0 + 6.0 * t) : -10.0 + 20.0 * t;
    if (!half_line) u = std::clamp(u, std::isfinite(r.lo) ? r.lo + 1e-6 : u, std::isfinite(r.hi) ? r.hi - 1e-6 : u);
    const double g = nl.g(u), gp = nl.gp(u), gpp = nl.gpp(u);
    const double bound = nl.A_struct * gp * gp;
    const double excess = (g * gpp - bound) / bound;
    const bool bad = !(g > 0) || !(gp < 0) || !(excess <= 1e-12);
    if (s == 0 || excess > out.worst_excess || (bad && out.ok)) {
      out.worst_excess = excess;
      out.worst_u = u;
    }
    if (bad) out.ok = false;
  }
  return out;
}

// ---------------------------------------------------------------------------

Grid Grid::box(int dim, double lo, double hi, double h) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (!(h > 0) || !(hi > lo)) throw std::invalid_argument("grid needs h > 0 and hi > lo");
  const double steps = (hi - lo) / h;
  const double whole = std::round(steps);
  if (std::abs(steps - whole) > 1e-9 * std::max(1.0, steps))
    throw std::invalid_argument("(hi - lo) / h must be a whole number");
  Grid g;
  g.dim = dim;
  g.h = h;
  for (int a = 0; a < dim; ++a) {
    g.lo[static_cast<std::size_t>(a)] = lo;
    g.hi[static_cast<std::size_t>(a)] = hi;
    g.counts[static_cast<std::size_t>(a)] = static_cast<std::size_t>(whole) + 1;
  }
  if (g.counts[0] < 5) throw std::invalid_argument("grid needs at least 5 points per axis");
  return g;
}

Grid Grid::from_counts(int dim, const Point& lo, const Point& hi, const Index& counts) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  Grid g;
  g.dim = dim;
  for (int a = 0; a < dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (counts[i] < 5) throw std::invalid_argument("grid needs at least 5 points per axis");
    if (!(hi[i] > lo[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw std::invalid_argument("grid extents must be finite with hi > lo");
    const double h = (hi[i] - lo[i]) / static_cast<double>(counts[i] - 1);
    if (a == 0) g.h = h;
    else if (std::abs(h - g.h) > 1e-12 * g.h) throw std::invalid_argument("grid spacing differs between axes");
    g.lo[i] = lo[i];
    g.hi[i] = hi[i];
    g.counts[i] = counts[i];
  }
  return g;
}

Index Grid::multi(std::size_t f) const {
  Index idx{0, 0, 0};
  idx[2] = f % counts[2];
  f /= counts[2];
  idx[1] = f % counts[1];
  idx[0] = f / counts[1];
  return idx;
}

Point Grid::coord(const Index& idx) const {
  Point x{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    x[i] = lo[i] + static_cast<double>(idx[i]) * h;
  }
  return x;
}

std::size_t Grid::depth(const Index& idx) const {
  std::size_t d = std::numeric_limits<std::size_t>::max();
  for (int a = 0; a < dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    d = std::min({d, idx[i], counts[i] - 1 - idx[i]});
  }
  return d;
}

std::size_t Grid::stride(int axis) const {
  switch (axis) {
    case 0: return counts[1] * counts[2];
    case 1: return counts[2];
    default: return 1;
  }
}

GridField::GridField(Grid g, double fill) : grid(g), values(g.size(), fill), boundary(g.size(), 0) {
  for (std::size_t f = 0; f < values.size(); ++f) boundary[f] = grid.on_boundary(grid.multi(f)) ? 1 : 0;
}

GridField GridField::sample(const Grid& g, const PointFunction& fn) {
  GridField out(g);
  for (std::size_t f = 0; f < out.values.size(); ++f) out.values[f] = fn(g.coord(g.multi(f)));
  return out;
}

// ---------------------------------------------------------------------------

SolveResult solve(const Nonlinearity& nl, const Grid& grid, const PointFunction& boundary, const GridField& initial,
                  double tol, int max_iter) {
  if (initial.values.size() != grid.size() || initial.grid.dim != grid.dim || initial.grid.counts != grid.counts)
    throw std::invalid_argument("initial field is not on the solve grid");
  if (!(tol > 0) || max_iter < 0) throw std::invalid_argument("solve needs tol > 0 and max_iter >= 0");
  for (std::size_t f = 0; f < initial.values.size(); ++f) {
    if (!std::isfinite(initial.values[f])) throw std::invalid_argument("initial field has a non-finite value");
    if (!initial.boundary[f]) continue;
    const double want = boundary(grid.coord(grid.multi(f)));
    if (std::abs(initial.values[f] - want) > 1e-12 * std::max(1.0, std::abs(want)))
      throw std::invalid_argument("initial field does not carry the boundary data at node " +
                                  node_name(grid, grid.multi(f)));
  }

  SolveResult out{initial, SolveReport{}};
  GridField& u = out.u;
  SolveReport& rep = out.report;
  const Numbering num(u);

  Eigen::VectorXd r;
  double sup = residual(u, nl, num, r);
  LinearSolver linear(grid.dim);
  std::vector<double> shift(num.nodes.size());
  GridField trial = u;
  Eigen::VectorXd r_trial;

  while (sup > tol && rep.iterations < max_iter) {
    for (std::size_t k = 0; k < num.nodes.size(); ++k) shift[k] = nl.gp(u.values[num.nodes[k]]);
    const Eigen::SparseMatrix<double> jac = operator_matrix(u, num, shift);
    const Eigen::VectorXd step = linear.solve(jac, -r);
    ++rep.iterations;

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      bool in_range = true;
      for (std::size_t k = 0; k < num.nodes.size(); ++k) {
        const std::size_t f = num.nodes[k];
        trial.values[f] = u.values[f] + t * step[static_cast<Eigen::Index>(k)];
        in_range = in_range && nl.valid_range.contains(trial.values[f]);
      }
      if (in_range) {
        const double s = residual(trial, nl, num, r_trial);
        if (s < sup) {
          std::swap(u.values, trial.values);
          trial.values = u.values;
          r.swap(r_trial);
          sup = s;
          accepted = true;
          break;
        }
      }
      if (halving == 30) break;
      t *= 0.5;
      ++rep.damping_events;
    }
    if (!accepted) break;
  }
  rep.final_residual_sup = sup;
  rep.converged = sup <= tol;
  return out;
}

GridField residual_field(const GridField& u, const Nonlinearity& nl) {
  GridField out(u.grid);
  for (std::size_t f = 0; f < u.values.size(); ++f) {
    if (u.boundary[f]) continue;
    const double v = u.values[f];
    if (!nl.valid_range.contains(v)) range_failure(nl, u.grid, f, v);
    out.values[f] = laplacian(u, f) - nl.g(v);
  }
  return out;
}

GridField harmonic_extension(const Grid& grid, const PointFunction& boundary) {
  GridField u(grid);
  for (std::size_t f = 0; f < u.values.size(); ++f)
    if (u.boundary[f]) u.values[f] = boundary(grid.coord(grid.multi(f)));
  const Numbering num(u);
  if (num.nodes.empty()) return u;
  const std::vector<double> zero(num.nodes.size(), 0.0);
  const Eigen::SparseMatrix<double> lap = operator_matrix(u, num, zero);
  // Right-hand side: minus the boundary contributions of the stencil.
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(num.nodes.size()));
  for (std::size_t k = 0; k < num.nodes.size(); ++k) {
    const std::size_t f = num.nodes[k];
    double b = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const std::size_t s = grid.stride(a);
      for (std::size_t nb : {f + s, f - s})
        if (num.slot[nb] < 0) b -= u.values[nb] / (grid.h * grid.h);
    }
    rhs[static_cast<Eigen::Index>(k)] = b;
  }
  LinearSolver linear(grid.dim);
  const Eigen::VectorXd x = linear.solve(lap, rhs);
  for (std::size_t k = 0; k < num.nodes.size(); ++k) u.values[num.nodes[k]] = x[static_cast<Eigen::Index>(k)];
  return u;
}

double exact_profile(double x) {
  const double a = std::abs(x);
  if (a >= 20.0) return a - std::log(2.0) + std::log1p(std::exp(-2.0 * a));
  return std::log(std::cosh(x));
}

// ---------------------------------------------------------------------------

RadialProfile::RadialProfile(const Nonlinearity& nl, int dim, double center, double rmax, double dr) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("radial profile dimension must be 1, 2 or 3");
  if (!(rmax > 0) || !(dr > 0)) throw std::invalid_argument("radial profile needs rmax > 0 and dr > 0");
  if (!nl.valid_range.contains(center)) throw RangeError("radial profile center value outside the valid range");
  const auto steps = static_cast<std::size_t>(std::ceil(rmax / dr));
  dr_ = rmax / static_cast<double>(steps);
  rmax_ = rmax;
  u_.resize(steps + 1);
  up_.resize(steps + 1);

  // Series start: u = c + a r^2 + b r^4 with a = G(c) / (2 dim).
  const double d = dim;
  const double a = nl.g(center) / (2.0 * d);
  const double b = nl.gp(center) * a / (4.0 * (d + 2.0));
  u_[0] = center;
  up_[0] = 0.0;
  const double r1 = dr_;
  u_[1] = center + a * r1 * r1 + b * r1 * r1 * r1 * r1;
  up_[1] = 2.0 * a * r1 + 4.0 * b * r1 * r1 * r1;

  auto rhs = [&](double r, double u, double v) {
    if (!nl.valid_range.contains(u)) throw RangeError("radial profile left the valid range at r = " + to_string(r));
    return nl.g(u) - (d - 1.0) * v / r;
  };
  double u = u_[1], v = up_[1];
  for (std::size_t s = 1; s < steps; ++s) {
    const double r = static_cast<double>(s) * dr_;
    const double k1u = v, k1v = rhs(r, u, v);
    const double k2u = v + 0.5 * dr_ * k1v, k2v = rhs(r + 0.5 * dr_, u + 0.5 * dr_ * k1u, v + 0.5 * dr_ * k1v);
    const double k3u = v + 0.5 * dr_ * k2v, k3v = rhs(r + 0.5 * dr_, u + 0.5 * dr_ * k2u, v + 0.5 * dr_ * k2v);
    const double k4u = v + dr_ * k3v, k4v = rhs(r + dr_, u + dr_ * k3u, v + dr_ * k3v);
    u += dr_ / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += dr_ / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    u_[s + 1] = u;
    up_[s + 1] = v;
  }
}

double RadialProfile::operator()(double r) const {
  if (r < 0 || r > rmax_ * (1 + 1e-12)) throw std::invalid_argument("radius outside the integrated range");
  const auto last = u_.size() - 1;
  const std::size_t s = std::min(static_cast<std::size_t>(r / dr_), last - 1);
  const double t = (r - static_cast<double>(s) * dr_) / dr_;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * u_[s] + h10 * dr_ * up_[s] + h01 * u_[s + 1] + h11 * dr_ * up_[s + 1];
}

double RadialProfile::derivative(double r) const {
  if (r < 0 || r > rmax_ * (1 + 1e-12)) throw std::invalid_argument("radius outside the integrated range");
  const auto last = u_.size() - 1;
  const std::size_t s = std::min(static_cast<std::size_t>(r / dr_), last - 1);
  const double t = (r - static_cast<double>(s) * dr_) / dr_;
  const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
  const double d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
  return (d00 * u_[s] + d01 * u_[s + 1]) / dr_ + d10 * up_[s] + d11 * up_[s + 1];
}

}  // namespace crlab::elliptic
