#include "pindot/rational.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pindot {

namespace {

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("rational overflow");
  }
  return static_cast<std::int64_t>(v);
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = from_i128(num, den);
}

Rational Rational::from_i128(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  Rational r;
  r.num_ = narrow(num);
  r.den_ = narrow(den);
  return r;
}

Rational Rational::from_double(double v, std::int64_t max_den) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite value cannot become a rational");
  // Continued-fraction convergents; stop before the denominator exceeds max_den.
  double x = std::fabs(v);
  i128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    if (a > 9.0e18) break;
    i128 ai = static_cast<i128>(a);
    i128 p2 = ai * p1 + p0;
    i128 q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = x - a;
    if (frac < 1e-15 * std::max(1.0, x)) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) throw std::overflow_error("value too large for rational conversion");
  return from_i128(v < 0 ? -p1 : p1, q1);
}

Rational Rational::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto slash = text.find('/');
  auto parse_decimal = [](std::string_view s) -> Rational {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
      neg = s.front() == '-';
      s.remove_prefix(1);
    }
    if (s.empty()) throw std::invalid_argument("malformed rational");
    i128 num = 0, den = 1;
    bool seen_dot = false;
    for (char c : s) {
      if (c == '.') {
        if (seen_dot) throw std::invalid_argument("malformed rational");
        seen_dot = true;
        continue;
      }
      if (c < '0' || c > '9') throw std::invalid_argument("malformed rational: " + std::string(s));
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
      if (num > (i128{1} << 100) || den > (i128{1} << 100)) throw std::overflow_error("rational literal too long");
    }
    return from_i128(neg ? -num : num, den);
  };
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational p = parse_decimal(trim(text.substr(0, slash)));
  Rational q = parse_decimal(trim(text.substr(slash + 1)));
  return p / q;
}

std::string Rational::str() const {
  auto s = std::to_string(num_);
  if (den_ != 1) s += "/" + std::to_string(den_);
  return s;
}

std::int64_t Rational::floor_scaled_pow2(int shift) const {
  i128 n = num_, d = den_;
  if (shift >= 0) {
    if (shift > 60) throw std::overflow_error("shift too large");
    n <<= shift;
  } else {
    if (-shift > 60) throw std::overflow_error("shift too large");
    d <<= -shift;
  }
  return narrow(floor_div(n, d));
}

std::int64_t Rational::floor() const { return narrow(floor_div(num_, den_)); }

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational::from_i128(i128{a.num_} + b.num_, a.den_);
  return Rational::from_i128(i128{a.num_} * b.den_ + i128{b.num_} * a.den_, i128{a.den_} * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_i128(i128{a.num_} * b.num_, i128{a.den_} * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("division by zero rational");
  return Rational::from_i128(i128{a.num_} * b.den_, i128{a.den_} * b.num_);
}

Rational Rational::operator-() const {
  Rational r;
  if (num_ == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("rational overflow");
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  i128 l = i128{a.num_} * b.den_;
  i128 r = i128{b.num_} * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

void squarefree_split(std::int64_t v, std::int64_t& square, std::int64_t& free) {
  if (v <= 0) throw std::domain_error("squarefree_split needs a positive integer");
  square = 1;
  free = 1;
  std::int64_t rest = v;
  for (std::int64_t p = 2; p * p <= rest; p += (p == 2 ? 1 : 2)) {
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) square *= p;
    if (e % 2) free *= p;
  }
  free *= rest;
}

Surd::Surd(Rational coeff, std::int64_t rad) : coeff_(coeff), rad_(rad) {
  if (rad <= 0) throw std::domain_error("surd radicand must be positive");
  std::int64_t sq = 1, fr = 1;
  squarefree_split(rad, sq, fr);
  coeff_ = coeff_ * Rational(sq);
  rad_ = coeff_.is_zero() ? 1 : fr;
}

Surd Surd::sqrt_of(const Rational& q) {
  if (q.sign() < 0) throw std::domain_error("square root of a negative rational");
  if (q.is_zero()) return Surd(Rational(0), 1);
  // sqrt(p/d) = sqrt(p*d)/d
  i128 pd = i128{q.num()} * q.den();
  if (pd > (i128{1} << 62)) throw std::overflow_error("surd radicand too large");
  return Surd(Rational(1, q.den()), static_cast<std::int64_t>(pd));
}

double Surd::to_double() const { return coeff_.to_double() * std::sqrt(static_cast<double>(rad_)); }

Surd operator*(const Surd& a, const Surd& b) {
  // sqrt(r1) sqrt(r2) = g sqrt((r1/g)(r2/g)), g = gcd(r1, r2); the cofactor stays squarefree.
  std::int64_t g = std::gcd(a.rad_, b.rad_);
  i128 cof = i128{a.rad_ / g} * (b.rad_ / g);
  if (cof > (i128{1} << 62)) throw std::overflow_error("surd radicand too large");
  Surd r;
  r.coeff_ = a.coeff_ * b.coeff_ * Rational(g);
  r.rad_ = r.coeff_.is_zero() ? 1 : static_cast<std::int64_t>(cof);
  return r;
}

Surd operator*(const Surd& a, const Rational& b) {
  Surd r = a;
  r.coeff_ = a.coeff_ * b;
  if (r.coeff_.is_zero()) r.rad_ = 1;
  return r;
}

Surd operator+(const Surd& a, const Surd& b) {
  if (a.coeff_.is_zero()) return b;
  if (b.coeff_.is_zero()) return a;
  if (a.rad_ != b.rad_) throw std::domain_error("adding surds with different radicands");
  Surd r;
  r.coeff_ = a.coeff_ + b.coeff_;
  r.rad_ = r.coeff_.is_zero() ? 1 : a.rad_;
  return r;
}

bool operator==(const Surd& a, const Surd& b) { return a.coeff_ == b.coeff_ && a.rad_ == b.rad_; }

std::strong_ordering operator<=>(const Surd& a, const Surd& b) {
  if (a.coeff_.is_zero() || b.coeff_.is_zero() || a.rad_ == b.rad_) return a.coeff_ <=> b.coeff_;
  throw std::domain_error("comparing surds with different radicands");
}

}  // namespace pindot
