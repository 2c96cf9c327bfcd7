#pragma once

#include <gmpxx.h>

#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace crlab {

/// Arbitrary-precision rational, always kept in canonical form.
using Rational = mpq_class;

/// The two computation modes. Generic code is written once against this
/// concept; a function instantiated for one mode never sees the other, so
/// mixing modes in one expression does not compile.
template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

/// A tagged value that remembers which mode produced it. Used for records.
using ScalarValue = std::variant<Rational, double>;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

/// Parses "7", "-3/4", "1.6", "2.5e-3" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

/// Shortest round-trip decimal.
std::string to_string(double value);

std::string to_string(const ScalarValue& value);

inline double to_double(const Rational& value) { return value.get_d(); }

inline int sign(const Rational& value) { return sgn(value); }
inline int sign(double value) { return (value > 0.0) - (value < 0.0); }

/// Float-mode comparison: |a-b| <= rel_tol * max(1, |a|, |b|).
bool approx_equal(double a, double b, double rel_tol);

}  // namespace crlab
