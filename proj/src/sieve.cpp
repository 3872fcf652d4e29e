#include "floorpow/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "floorpow/errors.hpp"

namespace floorpow {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::uint32_t> simple_sieve(std::uint32_t limit) {
  std::vector<std::uint8_t> composite(limit + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return primes;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

struct Factor {
  std::uint64_t prime;
  unsigned exponent;
};

std::vector<Factor> factor(std::uint64_t n) {
  if (n == 0) throw DomainError("cannot factor 0");
  if (n > kSieveLimit) throw DomainError("factorization limited to n <= 2^42");
  std::vector<Factor> out;
  for (std::uint32_t p : base_primes()) {
    const std::uint64_t q = p;
    if (q * q > n) break;
    if (n % q) continue;
    unsigned e = 0;
    while (n % q == 0) {
      n /= q;
      ++e;
    }
    out.push_back({q, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

}  // namespace

std::span<const std::uint32_t> base_primes() {
  static const std::vector<std::uint32_t> primes =
      simple_sieve(static_cast<std::uint32_t>(isqrt(kSieveLimit)));
  return primes;
}

SieveSegment sieve_segment(std::uint64_t lo, std::uint64_t hi, std::uint64_t segment_size) {
  if (lo < 1 || lo > hi) throw DomainError("sieve_segment: need 1 <= lo <= hi");
  if (hi > kSieveLimit)
    throw ResourceError("sieve_segment: hi=" + std::to_string(hi) + " exceeds the sieve limit 2^42");
  if (hi - lo + 1 > segment_size)
    throw DomainError("sieve_segment: [lo, hi] longer than the segment size " + std::to_string(segment_size));

  const std::uint64_t n = hi - lo + 1;
  SieveSegment seg;
  seg.lo = lo;
  seg.hi = hi;
  seg.is_prime.assign(n, 1);
  seg.mu.assign(n, 1);
  seg.logp.assign(n, 0.0);
  std::vector<std::uint64_t> rem(n);
  for (std::uint64_t i = 0; i < n; ++i) rem[i] = lo + i;
  if (lo == 1) seg.is_prime[0] = 0;

  const std::uint64_t root = isqrt(hi);
  for (std::uint32_t p32 : base_primes()) {
    const std::uint64_t p = p32;
    if (p > root) break;
    const std::uint64_t first = (lo + p - 1) / p * p;
    for (std::uint64_t m = std::max(first, p * p); m <= hi; m += p) seg.is_prime[m - lo] = 0;
    for (std::uint64_t m = first; m <= hi; m += p) {
      seg.mu[m - lo] = static_cast<std::int8_t>(-seg.mu[m - lo]);
      rem[m - lo] /= p;
    }
    const std::uint64_t p2 = p * p;
    for (std::uint64_t m = (lo + p2 - 1) / p2 * p2; m <= hi; m += p2) seg.mu[m - lo] = 0;
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    // at most one prime factor above sqrt(hi) survives
    if (rem[i] > 1) seg.mu[i] = static_cast<std::int8_t>(-seg.mu[i]);
    if (seg.is_prime[i]) seg.logp[i] = std::log(static_cast<double>(lo + i));
  }
  return seg;
}

void sieve_range(std::uint64_t lo, std::uint64_t hi, const std::function<void(const SieveSegment&)>& visit,
                 std::uint64_t segment_size) {
  if (lo > hi) return;
  for (std::uint64_t a = lo;;) {
    const std::uint64_t b = (hi - a < segment_size - 1) ? hi : a + segment_size - 1;
    visit(sieve_segment(a, b, segment_size));
    if (b == hi) break;
    a = b + 1;
  }
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n < 2) return out;
  sieve_range(1, n, [&](const SieveSegment& seg) {
    for (std::uint64_t m = seg.lo; m <= seg.hi; ++m)
      if (seg.prime(m)) out.push_back(m);
  });
  return out;
}

std::vector<std::int8_t> mobius_table(std::uint64_t n) {
  std::vector<std::int8_t> mu(n + 1, 0);
  if (n == 0) return mu;
  sieve_range(1, n, [&](const SieveSegment& seg) {
    std::copy(seg.mu.begin(), seg.mu.end(), mu.begin() + static_cast<std::ptrdiff_t>(seg.lo));
  });
  return mu;
}

std::vector<double> mangoldt_table(std::uint64_t n) {
  std::vector<double> lam(n + 1, 0.0);
  for (std::uint64_t p : primes_up_to(n)) {
    const double lp = std::log(static_cast<double>(p));
    for (std::uint64_t q = p;; q *= p) {
      lam[q] = lp;
      if (q > n / p) break;
    }
  }
  return lam;
}

std::vector<std::uint32_t> divisor_count_table(std::uint64_t n) {
  std::vector<std::uint32_t> t(n + 1, 0);
  for (std::uint64_t d = 1; d <= n; ++d)
    for (std::uint64_t m = d; m <= n; m += d) ++t[m];
  return t;
}

int mobius(std::uint64_t n) {
  int mu = 1;
  for (const auto& f : factor(n)) {
    if (f.exponent > 1) return 0;
    mu = -mu;
  }
  return mu;
}

double lambda(std::uint64_t n) {
  const auto fs = factor(n);
  if (fs.size() != 1) return 0.0;
  return std::log(static_cast<double>(fs.front().prime));
}

std::uint64_t tau(std::uint64_t n) {
  std::uint64_t t = 1;
  for (const auto& f : factor(n)) t *= f.exponent + 1;
  return t;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // bases proven sufficient for n < 2^64
  for (std::uint64_t a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

void write_segment_csv(std::ostream& out, const SieveSegment& seg) {
  out << "n,is_prime,mu\n";
  for (std::uint64_t n = seg.lo; n <= seg.hi; ++n)
    out << n << ',' << (seg.prime(n) ? 1 : 0) << ',' << seg.mobius(n) << '\n';
}

}  // namespace floorpow
