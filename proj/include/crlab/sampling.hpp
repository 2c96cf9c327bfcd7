#pragma once

#include "crlab/scalar.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace crlab {

/// Seeded source of small random rationals. mt19937_64 is fully specified
/// by the standard and the mapping to integers below uses only its raw
/// output, so a seed reproduces the same stream on every platform.
class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  /// num/den with num in [-num_bound, num_bound], den in [1, den_bound].
  Rational any(std::int64_t num_bound = 12, std::int64_t den_bound = 7) {
    return make_rational(integer(-num_bound, num_bound), integer(1, den_bound));
  }

  /// Strictly positive: num in [1, num_bound].
  Rational positive(std::int64_t num_bound = 12, std::int64_t den_bound = 7) {
    return make_rational(integer(1, num_bound), integer(1, den_bound));
  }

  Rational nonnegative(std::int64_t num_bound = 12, std::int64_t den_bound = 7) {
    return make_rational(integer(0, num_bound), integer(1, den_bound));
  }

  std::vector<Rational> vector(std::size_t n, std::int64_t num_bound = 12, std::int64_t den_bound = 7) {
    std::vector<Rational> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(any(num_bound, den_bound));
    return out;
  }

  std::vector<Rational> positive_vector(std::size_t n, std::int64_t num_bound = 12, std::int64_t den_bound = 7) {
    std::vector<Rational> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(positive(num_bound, den_bound));
    return out;
  }

  /// Random point of the probability simplex with rational coordinates.
  std::vector<Rational> probability(std::size_t n, std::int64_t weight_bound = 9) {
    std::vector<Rational> w;
    Rational total(0);
    while (total == 0) {
      w.clear();
      total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        w.push_back(Rational(integer(0, weight_bound)));
        total += w.back();
      }
    }
    for (auto& x : w) x /= total;
    return w;
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crlab
