#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace hornforge {

/// Exact signed fraction, always stored reduced with a positive denominator.
/// Rule metrics and threshold comparisons go through this type so that a
/// confidence of exactly 1/10 compares equal to a threshold of 0.1.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t numerator, std::int64_t denominator = 1);

  /// Accepts "3", "-2/3", "0.125" and "1e-2".
  static Rational parse(std::string_view text);
  /// Converts through the shortest decimal representation of `value`, so
  /// from_double(0.1) == Rational(1, 10).
  static Rational from_double(double value);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  /// "num/den", or just "num" for integers.
  std::string to_string() const;
  /// Fixed-point rendering with `digits` fractional digits, rounded half up.
  std::string to_decimal(int digits = 6) const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& other) { return *this = *this + other; }
  Rational& operator-=(const Rational& other) { return *this = *this - other; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational reduce(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// a/b with the convention 0/0 = 0 (no firing substitutions).
Rational ratio_or_zero(std::int64_t numerator, std::int64_t denominator);

std::ostream& operator<<(std::ostream& os, const Rational& value);

}  // namespace hornforge
