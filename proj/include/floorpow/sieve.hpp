#pragma once

// Segmented sieves for primality, ln p, Moebius mu and squarefreeness, plus
// small helpers for von Mangoldt Lambda and the divisor function tau.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace floorpow {

inline constexpr std::uint64_t kDefaultSegmentSize = std::uint64_t{1} << 22;
// Global bound on sieved integers; base primes cover sqrt of this.
inline constexpr std::uint64_t kSieveLimit = std::uint64_t{1} << 42;

struct SieveSegment {
  std::uint64_t lo = 1;
  std::uint64_t hi = 0;
  std::vector<std::uint8_t> is_prime;
  std::vector<std::int8_t> mu;
  std::vector<double> logp;  // ln p at primes, 0 elsewhere

  std::uint64_t size() const { return hi - lo + 1; }
  bool prime(std::uint64_t n) const { return is_prime[n - lo] != 0; }
  int mobius(std::uint64_t n) const { return mu[n - lo]; }
  bool squarefree(std::uint64_t n) const { return mu[n - lo] != 0; }
  double log_p(std::uint64_t n) const { return logp[n - lo]; }
};

// Primes up to sqrt(kSieveLimit), built once per process and shared read-only.
std::span<const std::uint32_t> base_primes();

// Tables for every n in [lo, hi]; hi - lo + 1 must not exceed segment_size.
SieveSegment sieve_segment(std::uint64_t lo, std::uint64_t hi,
                           std::uint64_t segment_size = kDefaultSegmentSize);

// Streams [lo, hi] through consecutive segments in increasing order.
void sieve_range(std::uint64_t lo, std::uint64_t hi, const std::function<void(const SieveSegment&)>& visit,
                 std::uint64_t segment_size = kDefaultSegmentSize);

std::vector<std::uint64_t> primes_up_to(std::uint64_t n);
// Index 0 is unused (set to 0).
std::vector<std::int8_t> mobius_table(std::uint64_t n);
std::vector<double> mangoldt_table(std::uint64_t n);
std::vector<std::uint32_t> divisor_count_table(std::uint64_t n);

// Single-value versions by trial division over the base primes.
int mobius(std::uint64_t n);
double lambda(std::uint64_t n);
std::uint64_t tau(std::uint64_t n);

// Deterministic Miller-Rabin, valid for all 64-bit n.
bool is_prime_u64(std::uint64_t n);

// CSV dump: header "n,is_prime,mu", one record per n.
void write_segment_csv(std::ostream& out, const SieveSegment& seg);

}  // namespace floorpow
