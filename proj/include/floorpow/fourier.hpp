#pragma once

// Trigonometric approximation of the sawtooth psi(t) = {t} - 1/2 with an
// explicit nonnegative majorant of the error, and a smooth periodic
// partition of unity theta_0, ..., theta_{2Z-1} with truncated Fourier series.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace floorpow {

// Vaaler's polynomial:
//   a(h) = -phi(h/(H+1)) / (2 pi i h),  phi(u) = pi u (1-|u|) cot(pi u) + |u|
//   b(h) = (1 - |h|/(H+1)) / (2H+2)
// so that |psi(t) - sum a(h) e(ht)| <= sum b(h) e(ht) (a Fejer kernel).
struct VaalerApprox {
  // Declared coefficient constants: |a(h)| |h| <= kCa and b(h) H <= kCb.
  static constexpr double kCa = 0.16;  // 1/(2 pi) rounded up
  static constexpr double kCb = 0.5;

  std::int64_t H = 0;
  std::vector<std::complex<double>> a;  // index h + H; a[H] (h = 0) is 0
  std::vector<double> b;                // index h + H

  std::complex<double> coeff_a(std::int64_t h) const { return a[static_cast<std::size_t>(h + H)]; }
  double coeff_b(std::int64_t h) const { return b[static_cast<std::size_t>(h + H)]; }
};

VaalerApprox vaaler_build(std::int64_t H);

struct PsiApprox {
  double value = 0.0;     // Re sum a(h) e(ht)
  double imag = 0.0;      // Im of the same sum, zero up to rounding
  double majorant = 0.0;  // sum b(h) e(ht), real and >= 0
};

PsiApprox psi_approx_eval(const VaalerApprox& approx, double t);

// psi(t) = {t} - 1/2 for doubles.
double psi(double t);

// CSV with header "h,re,im,b", one row per h in [-H, H].
void write_vaaler_csv(std::ostream& out, const VaalerApprox& approx);

// theta_0 is the indicator of |x| < 1/(4Z) convolved with (order-1) uniform
// densities of width 1/(2Z(order-1)): supported in |x| < 1/(2Z), translates by
// multiples of 1/(2Z) sum to 1, coefficients decay like |n|^-order.
class PartitionOfUnity {
 public:
  std::uint64_t Z() const { return Z_; }
  unsigned order() const { return order_; }
  std::uint64_t n_max() const { return n_max_; }
  double eps_trunc() const { return eps_trunc_; }  // declared truncation error bound

  // g_z(n) = g_0(n) e(-n z / 2Z), |n| <= n_max.
  std::complex<double> g(std::uint64_t z, std::int64_t n) const;
  // e(-n z / 2Z) from the table of 2Z-th roots of unity.
  std::complex<double> phase(std::uint64_t z, std::int64_t n) const;
  // g_0(n) for n >= 0 (real and even in n).
  const std::vector<double>& g0() const { return g0_; }

  friend PartitionOfUnity partition_build(std::uint64_t, unsigned, std::uint64_t, double);

 private:
  std::uint64_t Z_ = 0;
  unsigned order_ = 0;
  std::uint64_t n_max_ = 0;
  double eps_trunc_ = 0.0;
  std::vector<double> g0_;
  std::vector<std::complex<double>> roots_;  // e(-k / 2Z)
};

inline constexpr double kDefaultTruncationTarget = 1e-9;

// Tail bound sum_{|n| > n_max} |g_0(n)| for the given shape.
double partition_tail_bound(std::uint64_t Z, unsigned order, std::uint64_t n_max);
// Smallest n_max >= 2Z whose tail bound meets eps.
std::uint64_t partition_min_n_max(std::uint64_t Z, unsigned order, double eps = kDefaultTruncationTarget);

// Throws DomainError unless Z >= 2, order >= 2, n_max >= 2Z and the tail bound
// for n_max meets eps_target.
PartitionOfUnity partition_build(std::uint64_t Z, unsigned order, std::uint64_t n_max,
                                 double eps_target = kDefaultTruncationTarget);

// Truncated Fourier series of theta_z at x, unclamped.
double theta_series(const PartitionOfUnity& part, std::uint64_t z, double x);
// All 2Z truncated series at x from the coefficients g_z(n).
std::vector<double> theta_series_all(const PartitionOfUnity& part, double x);
// theta_series with negative values above -eps_trunc reported as 0.
double theta_eval(const PartitionOfUnity& part, std::uint64_t z, double x);
// The exact piecewise-polynomial theta_z(x).
double theta_exact(const PartitionOfUnity& part, std::uint64_t z, double x);

}  // namespace floorpow
