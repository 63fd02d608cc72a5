#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ghinv {

/// Exact rational with eagerly reduced int64 numerator/denominator.
/// All exponent and cohomology bookkeeping is done in this type so that
/// integrality and mod-1 congruences are decided exactly, never by tolerance.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  static Rational make128(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rational overflow");
    return Rational{(long long)n, (long long)d, 0};
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make128((__int128)a.num * b.den + (__int128)b.num * a.den, (__int128)a.den * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make128((__int128)a.num * b.den - (__int128)b.num * a.den, (__int128)a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make128((__int128)a.num * b.num, (__int128)a.den * b.den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw std::domain_error("Rational: division by zero");
    return make128((__int128)a.num * b.den, (__int128)a.den * b.num);
  }
  Rational operator-() const { return Rational{-num, den, 0}; }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }

  bool is_integer() const { return den == 1; }
  bool is_zero() const { return num == 0; }

  /// Representative in [0,1); exact.
  Rational mod1() const {
    long long r = num % den;
    if (r < 0) r += den;
    return Rational{r, den, 0};
  }
  /// Reduce mod m (m > 0 integer); exact, used to keep xi-exponents small.
  Rational mod_int(long long m) const {
    __int128 r = (__int128)num % ((__int128)m * den);
    if (r < 0) r += (__int128)m * den;
    return make128(r, den);
  }
  long long floor() const {
    long long q = num / den;
    if (num % den < 0) --q;
    return q;
  }

  double to_double() const { return (double)num / (double)den; }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  /// Parse "p/q" or "p".
  static Rational parse(const std::string& s);

 private:
  Rational(long long n, long long d, int) : num(n), den(d) {}
};

inline Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse rational: '" + s + "'");
  }
}

}  // namespace ghinv
