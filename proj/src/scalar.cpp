#include "crlab/scalar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace crlab {

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(mpz_class(std::to_string(num)), mpz_class(std::to_string(den)));
  r.canonicalize();
  return r;
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

mpz_class pow10(long e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw fail();

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw fail();
    const mpz_class d{std::string(den)};
    if (d == 0) throw fail();
    out = Rational(mpz_class{std::string(num)}, d);
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      auto exp_text = s.substr(e + 1);
      auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
      if (ec != std::errc() || ptr != exp_text.data() + exp_text.size()) throw fail();
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto whole = s.substr(0, dot);
      auto frac = s.substr(dot + 1);
      if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
          (whole.empty() && frac.empty()))
        throw fail();
      digits = std::string(whole) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
    } else {
      if (!all_digits(s)) throw fail();
      digits = std::string(s);
    }
    if (digits.empty()) digits = "0";
    if (std::labs(exponent) > 4096) throw fail();
    mpz_class mantissa(digits);
    if (exponent >= 0) {
      out = Rational(mantissa * pow10(exponent));
    } else {
      out = Rational(mantissa, pow10(-exponent));
    }
  }
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_str();
}

std::string to_string(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string to_string(const ScalarValue& value) {
  return std::visit([](const auto& v) { return to_string(v); }, value);
}

bool approx_equal(double a, double b, double rel_tol) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= rel_tol * scale;
}

}  // namespace crlab
