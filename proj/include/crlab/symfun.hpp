#pragma once

// Elementary symmetric polynomials of a spectrum, their deleted-index
// minors, and the first two derivative tensors of sigma_k at a diagonal
// matrix. Everything here is generic over the two scalar modes.

#include "crlab/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crlab::symfun {

enum class Convexity { unchecked, convex };

/// Ordered eigenvalues of a diagonalized Hessian. Indices are 0-based.
template <Scalar T>
class Spectrum {
 public:
  explicit Spectrum(std::vector<T> entries, Convexity convexity = Convexity::unchecked)
      : entries_(std::move(entries)), convex_(convexity == Convexity::convex) {
    if (entries_.size() < 2) throw std::invalid_argument("spectrum needs n >= 2 entries");
    if (convex_ && std::any_of(entries_.begin(), entries_.end(), [](const T& v) { return v < T(0); }))
      throw std::invalid_argument("spectrum flagged convex has a negative entry");
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const T& operator[](std::size_t i) const { return entries_.at(i); }
  std::span<const T> entries() const noexcept { return entries_; }
  bool flagged_convex() const noexcept { return convex_; }

 private:
  std::vector<T> entries_;
  bool convex_;
};

/// sigma_k of an arbitrary list (any length, including 0) by the
/// prefix recurrence e_j <- e_j + x * e_{j-1}; O(n k).
template <Scalar T>
T elementary_symmetric(std::span<const T> values, int k) {
  if (k < 0) throw std::invalid_argument("sigma_k requires k >= 0, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > values.size()) return T(0);
  std::vector<T> e(static_cast<std::size_t>(k) + 1, T(0));
  e[0] = T(1);
  std::size_t seen = 0;
  for (const T& x : values) {
    ++seen;
    for (std::size_t j = std::min<std::size_t>(seen, static_cast<std::size_t>(k)); j >= 1; --j) {
      e[j] += x * e[j - 1];
    }
  }
  return e[static_cast<std::size_t>(k)];
}

template <Scalar T>
T sigma(const Spectrum<T>& lam, int k) {
  return elementary_symmetric<T>(lam.entries(), k);
}

/// sigma_k(lambda | excluded): sigma_k with one or two entries removed.
template <Scalar T>
T sigma_minor(const Spectrum<T>& lam, int k, std::span<const std::size_t> excluded) {
  if (excluded.empty() || excluded.size() > 2)
    throw std::invalid_argument("sigma_minor excludes one or two indices");
  for (std::size_t idx : excluded) {
    if (idx >= lam.size())
      throw std::invalid_argument("sigma_minor index " + std::to_string(idx) + " out of range for n=" +
                                  std::to_string(lam.size()));
  }
  if (excluded.size() == 2 && excluded[0] == excluded[1])
    throw std::invalid_argument("sigma_minor indices must be distinct");
  std::vector<T> rest;
  rest.reserve(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (std::find(excluded.begin(), excluded.end(), i) == excluded.end()) rest.push_back(lam[i]);
  }
  return elementary_symmetric<T>(std::span<const T>(rest), k);
}

template <Scalar T>
T sigma_minor(const Spectrum<T>& lam, int k, std::initializer_list<std::size_t> excluded) {
  return sigma_minor(lam, k, std::span<const std::size_t>(excluded.begin(), excluded.size()));
}

/// sum_i lambda_i sigma_{k-1}(lambda|i) - k sigma_k(lambda).
template <Scalar T>
T euler_identity_residual(const Spectrum<T>& lam, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > lam.size())
    throw std::invalid_argument("euler identity needs 1 <= k <= n");
  T lhs(0);
  for (std::size_t i = 0; i < lam.size(); ++i) lhs += lam[i] * sigma_minor(lam, k - 1, {i});
  T rhs = T(k) * sigma(lam, k);
  return T(lhs - rhs);
}

/// Derivatives of sigma_k with respect to the matrix entries u_ij, taken
/// at diag(lambda). The entries u_ij and u_ji are independent variables.
template <Scalar T>
class DerivativeTensor {
 public:
  DerivativeTensor(Spectrum<T> at, int k, int order) : at_(std::move(at)), k_(k), order_(order) {
    const std::size_t n = at_.size();
    first_.resize(n);
    for (std::size_t i = 0; i < n; ++i) first_[i] = sigma_minor(at_, k_ - 1, {i});
    if (order_ == 2) {
      second_.assign(n * n, T(0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && k_ >= 2) second_[i * n + j] = sigma_minor(at_, k_ - 2, {i, j});
    }
  }

  int order() const noexcept { return order_; }
  int k() const noexcept { return k_; }
  const Spectrum<T>& at() const noexcept { return at_; }

  /// d sigma_k / d u_ij.
  T operator()(std::size_t i, std::size_t j) const {
    check(i, j);
    return i == j ? first_[i] : T(0);
  }

  /// d^2 sigma_k / (d u_ij d u_st). Only available for order 2.
  T operator()(std::size_t i, std::size_t j, std::size_t s, std::size_t t) const {
    if (order_ != 2) throw std::logic_error("second derivatives need an order-2 tensor");
    check(i, j);
    check(s, t);
    const std::size_t n = at_.size();
    if (i == j && s == t && i != s) return second_[i * n + s];
    if (i != j && s == j && t == i) return T(-second_[i * n + j]);
    return T(0);
  }

 private:
  void check(std::size_t i, std::size_t j) const {
    if (i >= at_.size() || j >= at_.size()) throw std::invalid_argument("matrix index out of range");
  }

  Spectrum<T> at_;
  int k_;
  int order_;
  std::vector<T> first_;
  std::vector<T> second_;
};

template <Scalar T>
DerivativeTensor<T> sigma_derivatives(const Spectrum<T>& lam, int k, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  if (k < 1 || static_cast<std::size_t>(k) > lam.size())
    throw std::invalid_argument("sigma derivatives need 1 <= k <= n");
  return DerivativeTensor<T>(lam, k, order);
}

}  // namespace crlab::symfun
