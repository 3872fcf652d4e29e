#pragma once

// Exact arithmetic for floor powers [n^(a/b)], integer k-th roots and
// fixed-point evaluation of x^(num/den).
//
// Everything here is integer arithmetic on GMP integers: a floor power is the
// integer b-th root of n^a, and a fixed-point power with s fractional bits is
// the integer den-th root of x^num * 2^(s*den).  No floating-point value ever
// decides a floor.

#include <gmpxx.h>

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace floorpow {

using Rational = boost::rational<std::int64_t>;

// Parses "a/b", "a", "0.25" or "1e-9" into an exact rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

// c = a/b in lowest terms with 1 < c < 2.
class RationalExponent {
 public:
  RationalExponent(std::uint64_t a, std::uint64_t b);

  // "82/79"; throws DomainError when the value is outside (1, 2).
  static RationalExponent parse(std::string_view text);

  std::uint64_t a() const { return a_; }
  std::uint64_t b() const { return b_; }
  Rational value() const { return Rational(static_cast<std::int64_t>(a_), static_cast<std::int64_t>(b_)); }
  // gamma = 1/c = b/a, exact.
  Rational gamma() const { return Rational(static_cast<std::int64_t>(b_), static_cast<std::int64_t>(a_)); }
  double as_double() const { return static_cast<double>(a_) / static_cast<double>(b_); }
  double gamma_double() const { return static_cast<double>(b_) / static_cast<double>(a_); }
  std::string str() const;

  friend bool operator==(const RationalExponent&, const RationalExponent&) = default;

 private:
  std::uint64_t a_;
  std::uint64_t b_;
};

inline constexpr unsigned kDefaultScaleBits = 64;
inline constexpr unsigned kMaxScaleBits = 4096;
// Largest radicand (in bits) fixed_point_pow is allowed to form.
inline constexpr std::uint64_t kMaxRadicandBits = std::uint64_t{1} << 24;

// value = mantissa * 2^-scale_bits.  Operations never change the scale; mixing
// scales is an error.
class FixedPointReal {
 public:
  FixedPointReal(mpz_class mantissa, unsigned scale_bits)
      : mantissa_(std::move(mantissa)), scale_bits_(scale_bits) {}

  const mpz_class& mantissa() const { return mantissa_; }
  unsigned scale_bits() const { return scale_bits_; }
  double to_double() const;

  FixedPointReal operator-() const { return {-mantissa_, scale_bits_}; }
  friend FixedPointReal operator+(const FixedPointReal& x, const FixedPointReal& y);
  friend FixedPointReal operator-(const FixedPointReal& x, const FixedPointReal& y);
  friend bool operator==(const FixedPointReal& x, const FixedPointReal& y) {
    return x.scale_bits_ == y.scale_bits_ && x.mantissa_ == y.mantissa_;
  }

 private:
  mpz_class mantissa_;
  unsigned scale_bits_;
};

// floor(x^(1/k)); r^k <= x < (r+1)^k.
mpz_class integer_kth_root(const mpz_class& x, unsigned long k);

// [n^c] for n >= 1.  The 64-bit overload throws ResourceError if the result
// does not fit.
mpz_class floor_pow(const mpz_class& n, const RationalExponent& c);
std::uint64_t floor_pow(std::uint64_t n, const RationalExponent& c);

// {m >= 1 : [m^c] = K}; empty when lo > hi.
struct PreimageInterval {
  std::uint64_t lo = 1;
  std::uint64_t hi = 0;

  bool empty() const { return lo > hi; }
  std::uint64_t size() const { return empty() ? 0 : hi - lo + 1; }
  bool contains(std::uint64_t m) const { return lo <= m && m <= hi; }
};

PreimageInterval floor_pow_preimage(std::uint64_t K, const RationalExponent& c);

// floor(x^(num/den) * 2^s) * 2^-s.
FixedPointReal fixed_point_pow(const mpz_class& x, std::uint64_t num, std::uint64_t den,
                               unsigned s = kDefaultScaleBits);

// psi(t) = {t} - 1/2, with the fractional part taken exactly on the mantissa.
double psi_frac(const FixedPointReal& t);
// psi(t / divisor), exact on the rational mantissa / (divisor * 2^s).
double psi_frac(const FixedPointReal& t, std::uint64_t divisor);

// multiplier * t / divisor reduced mod 1 into [-1/2, 1/2).  Used to evaluate
// e(.) of large arguments without losing the fractional part.
double frac_centered(const FixedPointReal& t, std::int64_t multiplier, std::uint64_t divisor = 1);

}  // namespace floorpow
