#pragma once

#include <cstddef>
#include <vector>

namespace crlab {

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  double off_norm = 0.0;       // Frobenius norm of the off-diagonal part at exit
  double norm = 0.0;           // Frobenius norm of the input
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric n x n matrix (row-major). Stops
/// once the off-diagonal norm is <= 1e-15 of the matrix norm.
SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n);

}  // namespace crlab
