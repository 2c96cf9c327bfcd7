#include "crlab/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crlab {

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a[i * n + j] * a[i * n + j];
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("matrix size does not match n");
  SymmetricEigen out;
  double total = 0.0;
  for (double x : a) total += x * x;
  out.norm = std::sqrt(total);

  const double target = 1e-15 * out.norm;
  for (out.sweeps = 0; out.sweeps < 100; ++out.sweeps) {
    if (off_diagonal_norm(a, n) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p], aqq = a[q * n + q];
        // Rotation angle from tan(2 theta) = 2 a_pq / (a_qq - a_pp), smaller root.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
      }
    }
  }
  out.off_norm = off_diagonal_norm(a, n);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
  std::sort(out.values.begin(), out.values.end());
  return out;
}

}  // namespace crlab
