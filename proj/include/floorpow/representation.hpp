#pragma once

// Representations N = [p^c] + [m^c] with p prime and m squarefree, and the
// exact desk-scale evaluation of the weighted count
//
//   Gamma = sum_{P < p <= 2P, [p^c]+[m^c]=N} mu^2(m) ln p
//
// together with its splits Gamma = Gamma1 + Gamma2 (d <= D versus d > D in
// mu^2(m) = sum_{d^2 | m} mu(d)) and Gamma1 = Gamma3 - Sigma0 + Sigma1.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floorpow/exact_arith.hpp"

namespace floorpow {

inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{2} << 30;  // bytes

struct Parameters {
  std::uint64_t N = 0;
  RationalExponent c{82, 79};
  Rational rho{1, 4};       // P = rho * N^gamma
  std::uint64_t D = 0;      // cut between Gamma1 and Gamma2
  double alpha1 = 0.1;      // small-r regime constant (labels only)
  double A1 = 10.0;         // large-r regime constant (labels only)
  double z_constant = 1.0;  // Z(d) = ceil(z_constant * d^2 N^(1-gamma) ln^3 N)
  unsigned scale_bits = kDefaultScaleBits;

  // D defaults to floor(ln N).  Throws DomainError unless 0 < rho <= 1/2.
  static Parameters make(std::uint64_t N, const RationalExponent& c, Rational rho = Rational(1, 4));

  double P() const;
  // The window (P, 2P] as the integer range (window_lo, window_hi].
  std::uint64_t window_lo() const { return window_lo_; }
  std::uint64_t window_hi() const { return window_hi_; }

  double H(std::uint64_t d) const;         // d^2 N^(1-gamma) ln N
  std::uint64_t Z(std::uint64_t d) const;  // ~ d^2 N^(1-gamma) ln^3 N
  double R(std::uint64_t d) const;         // d^2 N^(1-gamma) ln^8 N
  std::uint64_t Q() const;                 // [N^(152 gamma/249 - 110/249)], exact

 private:
  std::uint64_t window_lo_ = 0;
  std::uint64_t window_hi_ = 0;
};

// Verified triple; the constructor re-checks primality (Miller-Rabin),
// squarefreeness (trial division) and the equation (exact floor powers).
class RepresentationWitness {
 public:
  RepresentationWitness(std::uint64_t N, std::uint64_t p, std::uint64_t m, const RationalExponent& c);

  std::uint64_t N() const { return N_; }
  std::uint64_t p() const { return p_; }
  std::uint64_t m() const { return m_; }

 private:
  std::uint64_t N_;
  std::uint64_t p_;
  std::uint64_t m_;
};

// [n^c], mu(n) and the primes for every n whose floor power is <= value_max.
// Built once, immutable afterwards.
class FloorPowTable {
 public:
  FloorPowTable(const RationalExponent& c, std::uint64_t value_max, unsigned threads = 1,
                std::uint64_t memory_budget = kDefaultMemoryBudget);

  const RationalExponent& exponent() const { return c_; }
  std::uint64_t value_max() const { return value_max_; }
  std::uint64_t n_max() const { return n_max_; }
  std::uint64_t floor_pow(std::uint64_t n) const { return fp_[n]; }  // 1 <= n <= n_max + 1
  int mobius(std::uint64_t n) const { return mu_[n]; }
  std::span<const std::uint64_t> primes() const { return primes_; }
  // The unique m with [m^c] = K (the map is injective for c > 1), or 0.
  std::uint64_t preimage(std::uint64_t K) const;

 private:
  RationalExponent c_;
  std::uint64_t value_max_;
  std::uint64_t n_max_;
  std::vector<std::uint64_t> fp_;
  std::vector<std::int8_t> mu_;
  std::vector<std::uint64_t> primes_;
};

// First witness in (p ascending, m ascending) order.
std::optional<RepresentationWitness> find_witness(std::uint64_t N, const RationalExponent& c);

struct ScanOptions {
  unsigned threads = 1;
  std::uint64_t memory_budget = kDefaultMemoryBudget;
  bool collect_witnesses = false;
};

struct ScanResult {
  std::vector<std::uint64_t> exceptions;
  // (N, p, m) for every represented N when collect_witnesses is set.
  struct Hit {
    std::uint64_t N, p, m;
  };
  std::vector<Hit> witnesses;
};

ScanResult scan_exceptions(std::uint64_t N_lo, std::uint64_t N_hi, const RationalExponent& c,
                           const ScanOptions& options = {});

struct InnerCount {
  std::uint64_t count = 0;  // #{m = 0 mod d^2 : [p^c] + [m^c] = N}
  double main = 0.0;        // ((N+1-[p^c])^gamma - (N-[p^c])^gamma) / d^2
  double psi_lo = 0.0;      // psi(-(N-[p^c])^gamma / d^2)
  double psi_hi = 0.0;      // psi(-(N+1-[p^c])^gamma / d^2)

  double identity_residual() const { return static_cast<double>(count) - (main - psi_lo + psi_hi); }
};

InnerCount inner_count(std::uint64_t p, std::uint64_t d, std::uint64_t N, const RationalExponent& c,
                       unsigned scale_bits = kDefaultScaleBits);

// The optional table must cover N (value_max >= N); it only speeds lookups.
double gamma(const Parameters& params, const FloorPowTable* table = nullptr);

struct GammaSplit {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  // Integer-weighted sums agree exactly: Gamma == Gamma1 + Gamma2 before rounding.
  bool exact = false;
};
GammaSplit gamma_split(const Parameters& params, const FloorPowTable* table = nullptr);

struct Gamma3 {
  double value = 0.0;
  // Same double sum with the difference replaced by gamma (N-[p^c])^(gamma-1).
  double surrogate = 0.0;
};
Gamma3 gamma3(const Parameters& params);
double sigma_j(const Parameters& params, int j);

struct GammaReport {
  double gamma = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double residual_split = 0.0;     // gamma - gamma1 - gamma2
  double residual_analytic = 0.0;  // gamma1 - gamma3 + sigma0 - sigma1
  double gamma3_surrogate = 0.0;
  bool split_exact = false;
  std::uint64_t window_primes = 0;
  double window_log_sum = 0.0;  // sum of ln p over the window

  // |residual_split| <= 1e-6 |gamma| and exact integer split.
  bool split_ok() const;
  // |residual_analytic| <= analytic_tolerance() * max(1, gamma3).
  bool analytic_ok() const;
  static constexpr double split_tolerance() { return 1e-6; }
  static constexpr double analytic_tolerance() { return 1e-6; }
};

GammaReport gamma_report(const Parameters& params, const FloorPowTable* table = nullptr);

// #(p, m): p prime, d | m, [p^c] + [m^c] = N, over the full range p <= N^gamma.
std::uint64_t count_B(std::uint64_t N, std::uint64_t d, const RationalExponent& c,
                      const FloorPowTable* table = nullptr);

// sum_{d <= D} mu(d) / d^2.
double gegenbauer_sum(std::uint64_t D);

}  // namespace floorpow
