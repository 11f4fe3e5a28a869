#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace khier {

using MemberId = std::string;
using VertexId = std::string;
using Cost = std::uint64_t;
using Weight = std::uint64_t;
using WeightMap = std::map<MemberId, Weight>;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
inline constexpr Cost kInfinity = std::numeric_limits<Cost>::max();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files and instance-level semantic violations found while
// reading. line == 0 means the problem concerns the file as a whole.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(format(line, column, what)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(std::size_t line, std::size_t column,
                            const std::string& what) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ", column " +
           std::to_string(column) + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// A table oracle was asked for a subset it does not define.
class OracleUndefined : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

// The request is well-formed but cannot be served: size caps, algorithm and
// network-kind mismatches, refused parameter combinations.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

inline Cost checked_add(Cost a, Cost b) {
  Cost r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("cost overflow in addition");
  return r;
}

inline Cost checked_mul(Cost a, Cost b) {
  Cost r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("cost overflow in multiplication");
  return r;
}

/// Non-negative rational with 64-bit numerator and denominator. Used for the
/// algorithm parameters (epsilon, gamma) so every threshold test is exact.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  long double to_long_double() const {
    return static_cast<long double>(num) / static_cast<long double>(den);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

  /// Accepts "3", "0.25", "1/3".
  static Rational parse(std::string_view text) {
    auto fail = [&]() -> Rational {
      throw ValidationError("not a rational number: '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();
    auto digits = [](std::string_view s) {
      if (s.empty() || s.size() > 17) return false;
      for (char c : s)
        if (c < '0' || c > '9') return false;
      return true;
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      auto n = text.substr(0, slash), d = text.substr(slash + 1);
      if (!digits(n) || !digits(d)) return fail();
      const auto den = std::stoll(std::string(d));
      if (den == 0) return fail();
      return Rational(std::stoll(std::string(n)), den);
    }
    auto dot = text.find('.');
    auto whole = text.substr(0, dot);
    auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!digits(whole) || (dot != std::string_view::npos && !digits(frac))) return fail();
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const auto w = std::stoll(std::string(whole));
    const auto f = frac.empty() ? 0LL : std::stoll(std::string(frac));
    return Rational(w * den + f, den);
  }
};

}  // namespace khier
