#pragma once

// Finite-difference Newton solver for Delta u = G(u) on uniform boxes in
// one to three dimensions, plus the nonlinearity registry and reference
// solutions. Float mode only.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crlab::elliptic {

/// Open interval; either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double u) const { return u > lo && u < hi; }
};

/// G evaluated outside its valid range. The message names the node.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

struct Nonlinearity {
  std::string id;  // "exp:<beta>" or "power:<p>"
  std::function<double(double)> g, gp, gpp;
  double A_struct = 0.0;
  Interval valid_range;

  /// G G'' / G'^2.
  double ratio(double u) const;
};

/// e^{-beta u}, A = 1.
Nonlinearity exp_family(double beta);
/// u^{-p} on u > 0, A = (p+1)/p.
Nonlinearity power_family(double p);
/// Parses "exp:2", "power:1.5". Throws std::invalid_argument.
Nonlinearity nonlinearity_from_id(std::string_view id);

/// exp:1, exp:2, power:1, power:2, power:3. Each passes check_structure.
std::vector<Nonlinearity> builtin_nonlinearities();

struct StructureCheck {
  bool ok = true;
  int samples = 0;
  double worst_u = 0.0;       // sample with the largest relative excess
  double worst_excess = 0.0;  // (G G'' - A G'^2) / (A G'^2)
};

/// G > 0, G' < 0 and G G'' <= A G'^2 (relative tolerance 1e-12) on a
/// deterministic sample of the valid range.
StructureCheck check_structure(const Nonlinearity& nl, int samples = 1000);

using Index = std::array<std::size_t, 3>;
using Point = std::array<double, 3>;
using PointFunction = std::function<double(const Point&)>;

/// Uniform grid; unused axes have count 1.
struct Grid {
  int dim = 1;
  Point lo{0, 0, 0};
  Point hi{0, 0, 0};
  double h = 0.0;
  Index counts{1, 1, 1};

  /// Same interval [lo, hi] on every axis; (hi - lo) / h must be a whole number.
  static Grid box(int dim, double lo, double hi, double h);
  /// Per-axis extents and counts; the spacings must agree.
  static Grid from_counts(int dim, const Point& lo, const Point& hi, const Index& counts);

  std::size_t size() const { return counts[0] * counts[1] * counts[2]; }
  std::size_t flat(const Index& idx) const { return (idx[0] * counts[1] + idx[1]) * counts[2] + idx[2]; }
  Index multi(std::size_t flat) const;
  Point coord(const Index& idx) const;
  /// Distance in nodes to the nearest boundary face.
  std::size_t depth(const Index& idx) const;
  bool on_boundary(const Index& idx) const { return depth(idx) == 0; }
  std::size_t stride(int axis) const;
};

struct GridField {
  Grid grid;
  std::vector<double> values;           // row-major, last axis fastest
  std::vector<std::uint8_t> boundary;   // 1 on Dirichlet nodes

  explicit GridField(Grid g, double fill = 0.0);
  static GridField sample(const Grid& g, const PointFunction& f);

  double& at(const Index& idx) { return values[grid.flat(idx)]; }
  double at(const Index& idx) const { return values[grid.flat(idx)]; }
};

struct SolveReport {
  int iterations = 0;
  double final_residual_sup = 0.0;
  bool converged = false;
  int damping_events = 0;
};

struct SolveResult {
  GridField u;
  SolveReport report;
};

inline constexpr double kDefaultTol = 1e-10;
inline constexpr int kDefaultMaxIter = 50;

/// Damped Newton for the (2 dim + 1)-point discretization. Dirichlet data
/// are the boundary values of `initial`, which must match `boundary`.
SolveResult solve(const Nonlinearity& nl, const Grid& grid, const PointFunction& boundary, const GridField& initial,
                  double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

/// Discrete Delta u - G(u) on interior nodes, 0 on the boundary.
GridField residual_field(const GridField& u, const Nonlinearity& nl);

/// Discrete harmonic function with the given boundary data.
GridField harmonic_extension(const Grid& grid, const PointFunction& boundary);

/// ln cosh x, the convex solution of v'' = e^{-2v}.
double exact_profile(double x);

/// Radial solution of u'' + (dim-1)/r u' = G(u), u(0) = c, u'(0) = 0,
/// integrated by RK4 on [0, rmax] and interpolated by cubic Hermite.
class RadialProfile {
 public:
  RadialProfile(const Nonlinearity& nl, int dim, double center, double rmax, double dr = 1e-4);
  double operator()(double r) const;
  double derivative(double r) const;
  double rmax() const { return rmax_; }

 private:
  double dr_;
  double rmax_;
  std::vector<double> u_, up_;
};

}  // namespace crlab::elliptic
