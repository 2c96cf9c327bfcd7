#pragma once

// Hessians of grid fields by central differences, their spectra and sigma_k,
// local minima, the probe Delta phi - k G' phi, and the rank / minimum
// conclusions checked on solved fields.

#include "crlab/certificate.hpp"
#include "crlab/elliptic.hpp"

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace crlab::hessfield {

using elliptic::GridField;
using elliptic::Index;

/// max(10 h^2, 1e-8).
double default_tol(double h);

struct HessianSample {
  Index location{0, 0, 0};
  int dim = 0;
  std::array<double, 9> H{};         // row-major dim x dim
  std::vector<double> eigenvalues;   // ascending
  std::vector<double> sigma;         // sigma_1 .. sigma_dim of the eigenvalues
  std::vector<double> minor_sums;    // the same from principal minors of H
  int numeric_rank = 0;
  double tol_used = 0.0;             // relative; threshold is tol * max(1, |lambda|_max)

  double h(std::size_t i, std::size_t j) const { return H[i * static_cast<std::size_t>(dim) + j]; }
  /// max_k |sigma_k - minor_sums_k| / max(1, |lambda|_max)^k.
  double minor_discrepancy() const;
};

/// Node must be at least one node from the boundary.
HessianSample hessian_at(const GridField& u, const Index& node, std::optional<double> tol = std::nullopt);

/// Sums of all k x k principal minors, k = 1..n.
std::vector<double> principal_minor_sums(const std::array<double, 9>& H, int n);

struct SigmaMap {
  int k = 0;
  GridField values;                  // sigma_k(D^2 u); 0 where invalid
  std::vector<std::uint8_t> valid;   // Hessian available (depth >= 1)
  std::vector<HessianSample> samples;  // valid nodes in flat order
};

SigmaMap sigma_fieldmap(const GridField& u, int k, std::optional<double> tol = std::nullopt);

struct MinimaReport {
  std::string field_id;
  std::vector<std::pair<Index, double>> minima;  // non-strict interior local minima
  double interior_min = 0.0;
  double boundary_min = 0.0;  // over the margin of the valid region
  Index interior_argmin{0, 0, 0};
  Index boundary_argmin{0, 0, 0};
  bool has_interior = false;

  Certificate to_certificate() const;
};

/// A node is interior when all of its 3^dim - 1 neighbors exist and are
/// valid; other valid nodes form the margin. Without a mask every node is
/// valid and the margin is the grid boundary.
MinimaReport find_local_minima(const GridField& f, const std::vector<std::uint8_t>& valid = {},
                               std::string field_id = "field");

/// Discrete Delta phi - k G'(u) phi with phi = 2 sigma_2 for k = 2 and
/// phi = sigma_k for k = dim. The node needs two nodes of margin.
double probe_inequality(const GridField& u, const elliptic::Nonlinearity& nl, int k, const Index& node);

struct PhiSummary {
  int k = 0;
  MinimaReport minima;
  bool min_on_margin = false;              // boundary_min <= interior_min
  std::vector<std::pair<Index, double>> probes;  // at interior minima with value > tol
  double probe_max = -std::numeric_limits<double>::infinity();
  bool no_positive_interior_min = true;
  bool degenerate_branch = false;          // rank 1 everywhere (k = 2) or sigma_k <= tol everywhere
  bool dichotomy = false;
};

struct ConclusionVerdict {
  bool applicable = true;                  // convex within tol
  bool pass = false;
  double tol = 0.0;
  double eps_h = 0.0;                      // probe guard band 10 h
  double min_eigenvalue = 0.0;
  int min_rank = 0, max_rank = 0;
  double minor_discrepancy_max = 0.0;
  PhiSummary sigma2;
  PhiSummary sigman;

  std::vector<Certificate> records() const;
};

ConclusionVerdict verify_conclusions(const GridField& u, const elliptic::Nonlinearity& nl, double tol);

}  // namespace crlab::hessfield
