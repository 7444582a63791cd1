#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pindot {

using i128 = __int128;

/// Exact rational with 64-bit numerator and denominator.
///
/// Always normalized: gcd(num, den) == 1 and den > 0. Arithmetic is carried
/// out in 128 bits and throws std::overflow_error when the reduced result
/// does not fit back into 64 bits.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);

  static Rational from_i128(i128 num, i128 den);

  /// Closest rational with denominator <= max_den (continued fractions).
  /// Recovers short decimals exactly, e.g. 0.1 -> 1/10.
  static Rational from_double(double v, std::int64_t max_den = std::int64_t{1} << 20);

  /// Accepts "p", "p/q" and plain decimals such as "-0.375".
  static Rational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  /// floor(this * 2^shift); shift may be negative.
  std::int64_t floor_scaled_pow2(int shift) const;
  std::int64_t floor() const;

  bool is_zero() const { return num_ == 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Number of the form coeff * sqrt(rad) with rad a squarefree positive
/// integer. Closed under multiplication; addition requires equal radicands.
class Surd {
 public:
  Surd() = default;
  Surd(Rational coeff, std::int64_t rad);

  /// sqrt(q) for a nonnegative rational q.
  static Surd sqrt_of(const Rational& q);

  const Rational& coeff() const { return coeff_; }
  std::int64_t rad() const { return rad_; }
  bool is_rational() const { return rad_ == 1 || coeff_.is_zero(); }
  double to_double() const;

  friend Surd operator*(const Surd& a, const Surd& b);
  friend Surd operator*(const Surd& a, const Rational& b);
  friend Surd operator+(const Surd& a, const Surd& b);
  friend bool operator==(const Surd& a, const Surd& b);
  /// Ordering is only defined between surds sharing a radicand (or zero).
  friend std::strong_ordering operator<=>(const Surd& a, const Surd& b);

 private:
  Rational coeff_;
  std::int64_t rad_ = 1;
};

/// Splits v = square^2 * free with free squarefree. Trial division; v < 2^62.
void squarefree_split(std::int64_t v, std::int64_t& square, std::int64_t& free);

}  // namespace pindot
