#pragma once

// Exponential-sum machinery around the Gamma estimates: exponent pairs and
// the A/B processes, Vaughan's identity as an exact decomposition, the
// Weyl-van der Corput inequality, and direct evaluators for W(v), W_z(v),
// V_z(v) and U(T, r, v) with its four-way split.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floorpow/exact_arith.hpp"
#include "floorpow/fourier.hpp"
#include "floorpow/representation.hpp"

namespace floorpow {

// 0 <= kappa <= 1/2 <= lambda <= 1, exact.
class ExponentPair {
 public:
  ExponentPair(Rational kappa, Rational lambda);

  const Rational& kappa() const { return kappa_; }
  const Rational& lambda() const { return lambda_; }
  // "55/194 110/194": both components over their common denominator.
  std::string str() const;

  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;

 private:
  Rational kappa_;
  Rational lambda_;
};

// (k, l) -> (k/(2k+2), (k+l+1)/(2k+2))
ExponentPair exppair_A(const ExponentPair& p);
// (k, l) -> (l - 1/2, k + 1/2)
ExponentPair exppair_B(const ExponentPair& p);
// Applies the letters right to left: "BA" is A first, then B.
ExponentPair exppair_word(std::string_view word, const ExponentPair& seed);

// Y^kappa X^lambda + 1/Y.
double expsum_bound(const ExponentPair& pair, double Y, double X);

// Phase functions f evaluated at positive integers, returned mod 1.
struct PhaseSpec {
  enum class Kind { monomial, h, f, g };

  Kind kind = Kind::monomial;
  // monomial: F (u / scale)^sigma
  double F = 0.0;
  double sigma = 1.0;
  double scale = 1.0;
  // h(t) = r t^c + v (T - t^c)^gamma;  f(l) = h(m l);  g(l) = h((m+q) l) - h(m l)
  double r = 0.0;
  double v = 0.0;
  double T = 0.0;
  RationalExponent c{82, 79};
  std::uint64_t m = 1;
  std::uint64_t q = 0;

  static PhaseSpec monomial(double F, double sigma, double scale = 1.0);
  static PhaseSpec h(double r, double v, double T, const RationalExponent& c);
  static PhaseSpec f(double r, double v, double T, const RationalExponent& c, std::uint64_t m);
  static PhaseSpec g(double r, double v, double T, const RationalExponent& c, std::uint64_t m, std::uint64_t q);

  // f(n) reduced into [-1/2, 1/2).  Throws DomainError where the phase is
  // undefined (t^c >= T).
  double eval_mod1(std::uint64_t n) const;
};

// sum_{X < n <= X0} e(f(n)); requires 1 <= X < X0 <= 2X.
std::complex<double> expsum_eval(const PhaseSpec& phase, std::uint64_t X, std::uint64_t X0);

struct VaughanSplit {
  std::complex<double> S1, S2, S3;
  double u = 0.0;
  double N = 0.0;
  double N1 = 0.0;
  // S2 restricted to m <= u and to u < m <= u^2
  std::complex<double> S2_small, S2_large;
  std::complex<double> direct;  // sum_{N < n <= N1} Lambda(n) f(n)
  double direct_abs = 0.0;      // sum Lambda(n) |f(n)|

  std::complex<double> combined() const { return S1 - S2 - S3; }
  double residual() const { return std::abs(combined() - direct); }
};

using ArithmeticFunction = std::function<std::complex<double>(std::uint64_t)>;

// Throws DomainError unless 1 < u <= N < N1, and Error if a coefficient bound
// |c(m)| <= log m or |a(m)| <= tau(m) fails.
VaughanSplit vaughan_decompose(const ArithmeticFunction& f, double u, double N, double N1);

struct WeylVdcResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_imag = 0.0;  // rounding only
  bool holds = false;
};

// seq[i] is a(a + 1 + i), i.e. the sequence on (a, a + L].
WeylVdcResult weyl_vdc_check(std::span<const std::complex<double>> seq, std::uint64_t Q);

// Primes of the window (P, 2P] with p^c, [p^c] and (N + j - [p^c])^gamma for j = 0, 1.
class PrimeWindow {
 public:
  // Throws EmptyWindowError when the window holds no prime.
  explicit PrimeWindow(const Parameters& params);

  struct Entry {
    std::uint64_t p;
    double logp;
    std::uint64_t fp;
    double frac_pc;       // {p^c}
    long double pc;       // p^c
    FixedPointReal Y[2];
  };

  const Parameters& params() const { return params_; }
  std::span<const Entry> entries() const { return entries_; }

 private:
  Parameters params_;
  std::vector<Entry> entries_;
};

// W(v) = sum ln p e(v (N + j - [p^c])^gamma) with v = h / d^2.
std::complex<double> W_eval(const PrimeWindow& window, std::uint64_t d, std::int64_t h, int j);
// W_z(v) = sum ln p theta_z(p^c) e(v (N + j - [p^c])^gamma), theta_z taken
// from its truncated series.  Summed over z these give W(v).
std::vector<std::complex<double>> W_z_all(const PrimeWindow& window, const PartitionOfUnity& part, std::uint64_t d,
                                          std::int64_t h, int j);
std::complex<double> W_z_eval(const PrimeWindow& window, const PartitionOfUnity& part, std::uint64_t z,
                              std::uint64_t d, std::int64_t h, int j);
// V_z(v) = sum ln p theta_z(p^c) e(v (N + j - p^c + z/2Z)^gamma)
std::complex<double> V_z_eval(const PrimeWindow& window, const PartitionOfUnity& part, std::uint64_t z,
                              std::uint64_t d, std::int64_t h, int j);

struct USplit {
  std::complex<double> U;
  std::complex<double> U1, U2, U3, U4;
  double residual = 0.0;  // |U - (U1 - U2 - U3 - U4)|
  double log_sum = 0.0;   // sum of ln p over the primes of (P, 2P]

  // residual / (P^(1/2) log P)
  double fitted_constant(double P) const;
};

// U(T, r, v) = sum_{P < p <= 2P} ln p e(r p^c + v (T - p^c)^gamma), split by
// Vaughan's identity with u = P^(1/3) over (P, 2P].  Requires P >= 8 and
// T > (2P)^c.
USplit U_eval_and_split(double T, std::int64_t r, double v, double P, const RationalExponent& c);

struct SweepRow {
  std::uint64_t d;
  std::int64_t h;
  std::int64_t r;
  double v;
  std::string regime;  // small, mid_pos, mid_neg, large
  double abs_u;
  double bound;  // trivial bound sum ln p
  double ratio;
};

// |U(N, r, h/d^2)| over 1 <= d <= d_max, 1 <= h <= h_max, |r| <= r_max.
std::vector<SweepRow> sweep_U(const Parameters& params, std::uint64_t d_max, std::int64_t h_max, std::int64_t r_max,
                              unsigned threads = 1);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace floorpow
