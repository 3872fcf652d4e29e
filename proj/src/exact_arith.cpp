#include "floorpow/exact_arith.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "floorpow/errors.hpp"

namespace floorpow {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw DomainError("cannot parse rational '" + std::string(whole) + "'");
  return v;
}

std::int64_t pow10(int e, std::string_view whole) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / 10)
      throw DomainError("rational '" + std::string(whole) + "' out of range");
    r *= 10;
  }
  return r;
}

// Reduced fractional numerator of t / divisor: t.mantissa mod (divisor << s).
void frac_numerator(const FixedPointReal& t, std::uint64_t divisor, mpz_class& rem, mpz_class& mod) {
  mod = divisor;
  mod <<= t.scale_bits();
  mpz_fdiv_r(rem.get_mpz_t(), t.mantissa().get_mpz_t(), mod.get_mpz_t());
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(text.substr(0, slash), text);
    const auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  // decimal with optional exponent: [-]digits[.digits][e[-]digits]
  std::string_view mant = text;
  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mant = text.substr(0, e);
    exponent = static_cast<int>(parse_int(text.substr(e + 1), text));
  }
  std::string digits;
  int frac_digits = 0;
  bool seen_dot = false;
  for (char ch : mant) {
    if (ch == '.') {
      if (seen_dot) throw DomainError("cannot parse rational '" + std::string(text) + "'");
      seen_dot = true;
    } else {
      digits.push_back(ch);
      if (seen_dot) ++frac_digits;
    }
  }
  const std::int64_t m = parse_int(digits, text);
  const int shift = exponent - frac_digits;
  if (shift >= 0) return Rational(m * pow10(shift, text), 1);
  return Rational(m, pow10(-shift, text));
}

std::string to_string(const Rational& q) {
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

RationalExponent::RationalExponent(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) throw DomainError("exponent a/b needs positive a and b");
  const auto g = std::gcd(a, b);
  a_ = a / g;
  b_ = b / g;
  if (!(a_ > b_ && a_ < 2 * b_))
    throw DomainError("exponent " + std::to_string(a_) + "/" + std::to_string(b_) +
                      " must satisfy 1 < c < 2");
}

RationalExponent RationalExponent::parse(std::string_view text) {
  const Rational q = parse_rational(text);
  if (q <= Rational(0)) throw DomainError("exponent '" + std::string(text) + "' must be positive");
  return {static_cast<std::uint64_t>(q.numerator()), static_cast<std::uint64_t>(q.denominator())};
}

std::string RationalExponent::str() const { return std::to_string(a_) + "/" + std::to_string(b_); }

double FixedPointReal::to_double() const {
  long exp2 = 0;
  const double m = mpz_get_d_2exp(&exp2, mantissa_.get_mpz_t());
  return std::ldexp(m, static_cast<int>(exp2 - static_cast<long>(scale_bits_)));
}

FixedPointReal operator+(const FixedPointReal& x, const FixedPointReal& y) {
  if (x.scale_bits_ != y.scale_bits_) throw DomainError("fixed-point scale mismatch");
  return {x.mantissa_ + y.mantissa_, x.scale_bits_};
}

FixedPointReal operator-(const FixedPointReal& x, const FixedPointReal& y) {
  if (x.scale_bits_ != y.scale_bits_) throw DomainError("fixed-point scale mismatch");
  return {x.mantissa_ - y.mantissa_, x.scale_bits_};
}

mpz_class integer_kth_root(const mpz_class& x, unsigned long k) {
  if (k == 0) throw DomainError("integer_kth_root: k must be positive");
  if (sgn(x) < 0) throw DomainError("integer_kth_root: negative radicand");
  if (x == 0 || k == 1) return x;
  const std::size_t bits = mpz_sizeinbase(x.get_mpz_t(), 2);
  if (bits <= k) return 1;  // 1 <= x < 2^k

  // Seed from the leading bits of x; only its closeness matters for speed.
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, x.get_mpz_t());
  const double t = (std::log2(mant) + static_cast<double>(exp2)) / static_cast<double>(k);
  const double ti = std::floor(t);
  mpz_class r(std::ldexp(std::exp2(t - ti), 52));
  const long shift = static_cast<long>(ti) - 52;
  if (shift >= 0)
    r <<= static_cast<mp_bitcnt_t>(shift);
  else
    r >>= static_cast<mp_bitcnt_t>(-shift);
  r += 1;

  mpz_class p, q, next;
  auto newton = [&](const mpz_class& cur, mpz_class& out) {
    mpz_pow_ui(p.get_mpz_t(), cur.get_mpz_t(), k - 1);
    mpz_tdiv_q(q.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t());
    out = cur * (k - 1) + q;
    mpz_tdiv_q_ui(out.get_mpz_t(), out.get_mpz_t(), k);
  };
  // One step from any positive point lands at or above the floor root; from
  // there the iteration decreases strictly until it reaches it.
  newton(r, next);
  r = next;
  for (;;) {
    newton(r, next);
    if (next >= r) break;
    r = next;
  }

  // Exact corrective step: enforce r^k <= x < (r+1)^k by multiplying out.
  mpz_pow_ui(p.get_mpz_t(), r.get_mpz_t(), k);
  while (p > x) {
    r -= 1;
    mpz_pow_ui(p.get_mpz_t(), r.get_mpz_t(), k);
  }
  for (;;) {
    next = r + 1;
    mpz_pow_ui(p.get_mpz_t(), next.get_mpz_t(), k);
    if (p > x) break;
    r = next;
  }
  return r;
}

mpz_class floor_pow(const mpz_class& n, const RationalExponent& c) {
  if (n < 1) throw DomainError("floor_pow: n must be >= 1");
  mpz_class x;
  mpz_pow_ui(x.get_mpz_t(), n.get_mpz_t(), c.a());
  return integer_kth_root(x, c.b());
}

std::uint64_t floor_pow(std::uint64_t n, const RationalExponent& c) {
  if (n == 0) throw DomainError("floor_pow: n must be >= 1");
  mpz_class x;
  mpz_ui_pow_ui(x.get_mpz_t(), n, c.a());
  const mpz_class r = integer_kth_root(x, c.b());
  if (mpz_sizeinbase(r.get_mpz_t(), 2) > 64)
    throw ResourceError("floor_pow: [n^c] does not fit in 64 bits for n=" + std::to_string(n));
  return mpz_get_ui(r.get_mpz_t());
}

PreimageInterval floor_pow_preimage(std::uint64_t K, const RationalExponent& c) {
  // m is in the preimage iff K^b <= m^a < (K+1)^b.
  mpz_class lower, upper;
  mpz_ui_pow_ui(lower.get_mpz_t(), K, c.b());
  mpz_class k1(static_cast<unsigned long>(K));
  k1 += 1;
  mpz_pow_ui(upper.get_mpz_t(), k1.get_mpz_t(), c.b());
  upper -= 1;

  mpz_class lo = integer_kth_root(lower, c.a());
  mpz_class check;
  mpz_pow_ui(check.get_mpz_t(), lo.get_mpz_t(), c.a());
  if (check < lower) lo += 1;
  if (lo < 1) lo = 1;
  const mpz_class hi = integer_kth_root(upper, c.a());

  PreimageInterval out;
  if (hi < lo) return out;
  out.lo = mpz_get_ui(lo.get_mpz_t());
  out.hi = mpz_get_ui(hi.get_mpz_t());
  return out;
}

FixedPointReal fixed_point_pow(const mpz_class& x, std::uint64_t num, std::uint64_t den, unsigned s) {
  if (x < 1) throw DomainError("fixed_point_pow: x must be >= 1");
  if (num == 0 || den == 0) throw DomainError("fixed_point_pow: num and den must be positive");
  if (s > kMaxScaleBits)
    throw DomainError("fixed_point_pow: scale " + std::to_string(s) + " exceeds maximum " +
                      std::to_string(kMaxScaleBits));
  const double xbits = static_cast<double>(mpz_sizeinbase(x.get_mpz_t(), 2));
  const double radicand_bits = static_cast<double>(num) * xbits + static_cast<double>(s) * static_cast<double>(den);
  if (radicand_bits > static_cast<double>(kMaxRadicandBits))
    throw ResourceError("fixed_point_pow: radicand of ~" + std::to_string(static_cast<std::uint64_t>(radicand_bits)) +
                        " bits exceeds the bit budget of " + std::to_string(kMaxRadicandBits));
  mpz_class radicand;
  mpz_pow_ui(radicand.get_mpz_t(), x.get_mpz_t(), num);
  radicand <<= static_cast<mp_bitcnt_t>(s * den);
  return {integer_kth_root(radicand, den), s};
}

double psi_frac(const FixedPointReal& t) {
  const unsigned s = t.scale_bits();
  if (s == 0) return -0.5;
  mpz_class frac;
  mpz_fdiv_r_2exp(frac.get_mpz_t(), t.mantissa().get_mpz_t(), s);
  mpz_class half(1);
  half <<= s - 1;
  frac -= half;
  // mpz_get_d truncates toward zero, so the result stays inside [-1/2, 1/2).
  return std::ldexp(mpz_get_d(frac.get_mpz_t()), -static_cast<int>(s));
}

double psi_frac(const FixedPointReal& t, std::uint64_t divisor) {
  if (divisor == 0) throw DomainError("psi_frac: zero divisor");
  mpz_class rem, mod;
  frac_numerator(t, divisor, rem, mod);
  // psi = (2 rem - mod) / (2 mod), numerator in [-mod, mod).
  mpz_class twice_rem = rem * 2 - mod;
  mpz_class twice_mod = mod * 2;
  double v = mpz_get_d(twice_rem.get_mpz_t()) / mpz_get_d(twice_mod.get_mpz_t());
  if (v >= 0.5) v = std::nextafter(0.5, 0.0);  // division rounding guard
  return v;
}

double frac_centered(const FixedPointReal& t, std::int64_t multiplier, std::uint64_t divisor) {
  if (divisor == 0) throw DomainError("frac_centered: zero divisor");
  mpz_class mod(static_cast<unsigned long>(divisor));
  mod <<= t.scale_bits();
  mpz_class num = t.mantissa() * static_cast<long>(multiplier);
  mpz_class rem;
  mpz_fdiv_r(rem.get_mpz_t(), num.get_mpz_t(), mod.get_mpz_t());
  if (rem * 2 >= mod) rem -= mod;
  return mpz_get_d(rem.get_mpz_t()) / mpz_get_d(mod.get_mpz_t());
}

}  // namespace floorpow
