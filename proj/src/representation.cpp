#include "floorpow/representation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "floorpow/errors.hpp"
#include "floorpow/sieve.hpp"
#include "floorpow/summation.hpp"
#include "parallel.hpp"

namespace floorpow {

namespace {

// floor(rho * N^gamma) for rho = num/den, via floor(root(num^a N^b, a) / den).
std::uint64_t floor_scaled_power(std::uint64_t N, const RationalExponent& c, const Rational& rho) {
  mpz_class x, t;
  mpz_ui_pow_ui(x.get_mpz_t(), static_cast<unsigned long>(rho.numerator()), c.a());
  mpz_ui_pow_ui(t.get_mpz_t(), N, c.b());
  x *= t;
  mpz_class r = integer_kth_root(x, c.a());
  r /= static_cast<unsigned long>(rho.denominator());
  return mpz_get_ui(r.get_mpz_t());
}

// Largest n with [n^c] <= value, i.e. n^a < (value+1)^b.
std::uint64_t max_base_for_value(std::uint64_t value, const RationalExponent& c) {
  mpz_class v(static_cast<unsigned long>(value));
  v += 1;
  mpz_class x;
  mpz_pow_ui(x.get_mpz_t(), v.get_mpz_t(), c.b());
  x -= 1;
  return mpz_get_ui(integer_kth_root(x, c.a()).get_mpz_t());
}

struct WindowEntry {
  std::uint64_t p;
  double logp;
  std::uint64_t fp;  // [p^c]
  std::uint64_t m;   // the m with [m^c] = N - [p^c], or 0
  int mu_m;          // mu(m), 0 when m == 0
};

std::uint64_t exact_preimage(std::uint64_t K, const RationalExponent& c) {
  if (K == 0) return 0;
  const PreimageInterval iv = floor_pow_preimage(K, c);
  return iv.empty() ? 0 : iv.lo;
}

bool table_covers(const FloorPowTable* table, std::uint64_t N, const RationalExponent& c) {
  return table != nullptr && table->exponent() == c && table->value_max() >= N;
}

std::vector<WindowEntry> window_entries(const Parameters& params, const FloorPowTable* table) {
  if (params.window_lo() < 2 || params.window_hi() <= params.window_lo())
    throw EmptyWindowError("prime window (P, 2P] with P = " + std::to_string(params.P()) +
                           " is empty at N = " + std::to_string(params.N) + "; use a larger rho or N");
  std::vector<WindowEntry> out;
  const std::uint64_t N = params.N;
  if (table_covers(table, N, params.c)) {
    auto primes = table->primes();
    auto it = std::upper_bound(primes.begin(), primes.end(), params.window_lo());
    for (; it != primes.end() && *it <= params.window_hi(); ++it) {
      const std::uint64_t p = *it;
      const std::uint64_t f = table->floor_pow(p);
      const std::uint64_t m = f < N ? table->preimage(N - f) : 0;
      out.push_back({p, std::log(static_cast<double>(p)), f, m, m ? table->mobius(m) : 0});
    }
  } else {
    sieve_range(params.window_lo() + 1, params.window_hi(), [&](const SieveSegment& seg) {
      for (std::uint64_t p = seg.lo; p <= seg.hi; ++p) {
        if (!seg.prime(p)) continue;
        const std::uint64_t f = floor_pow(p, params.c);
        const std::uint64_t m = f < N ? exact_preimage(N - f, params.c) : 0;
        out.push_back({p, seg.log_p(p), f, m, m ? mobius(m) : 0});
      }
    });
  }
  if (out.empty())
    throw EmptyWindowError("no primes in the window (P, 2P] at N = " + std::to_string(N) +
                           "; use a larger rho or N");
  return out;
}

// Distinct primes q with q^2 | m.
std::vector<std::uint64_t> square_divisor_primes(std::uint64_t m) {
  std::vector<std::uint64_t> qs;
  for (std::uint32_t q32 : base_primes()) {
    const std::uint64_t q = q32;
    if (q * q > m) break;
    if (m % q) continue;
    m /= q;
    if (m % q == 0) qs.push_back(q);
    while (m % q == 0) m /= q;
  }
  return qs;
}

// sum of mu(d) over squarefree d with d^2 | m and d > D.
std::int64_t tail_mobius_sum(std::uint64_t m, std::uint64_t D) {
  const auto qs = square_divisor_primes(m);
  std::int64_t sum = 0;
  const std::size_t subsets = std::size_t{1} << qs.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::uint64_t d = 1;
    int sign = 1;
    for (std::size_t i = 0; i < qs.size(); ++i)
      if (mask >> i & 1) {
        d *= qs[i];
        sign = -sign;
      }
    if (d > D) sum += sign;
  }
  return sum;
}

struct Evaluation {
  bool counts = false;
  bool split = false;
  bool analytic = false;
};

GammaReport evaluate(const Parameters& params, const FloorPowTable* table, Evaluation what) {
  const auto entries = window_entries(params, table);
  const auto mu = mobius_table(params.D);
  const std::uint64_t N = params.N;
  const auto& c = params.c;

  GammaReport rep;
  rep.window_primes = entries.size();
  NeumaierSum log_sum;
  for (const auto& e : entries) log_sum.add(e.logp);
  rep.window_log_sum = log_sum.value();

  ExactWeightedSum g, g1, g2;
  bool exact = true;
  if (what.counts || what.split) {
    for (const auto& e : entries) {
      if (e.m == 0) continue;
      const std::int64_t total = e.mu_m != 0 ? 1 : 0;
      g.add(total, e.logp);
      if (!what.split) continue;
      std::int64_t c1 = 0;
      for (std::uint64_t d = 1; d <= params.D; ++d)
        if (mu[d] != 0 && e.m % (d * d) == 0) c1 += mu[d];
      const std::int64_t c2 = tail_mobius_sum(e.m, params.D);
      exact = exact && (c1 + c2 == total);
      g1.add(c1, e.logp);
      g2.add(c2, e.logp);
    }
    rep.gamma = g.value();
  }
  if (what.split) {
    rep.gamma1 = g1.value();
    rep.gamma2 = g2.value();
    rep.split_exact = exact;
    rep.residual_split = ExactWeightedSum::to_double(g.raw() - g1.raw() - g2.raw());
  }

  if (what.analytic) {
    const double gam = c.gamma_double();
    NeumaierSum g3, s0, s1, surrogate;
    NeumaierSum mu_over_d2;
    for (std::uint64_t d = 1; d <= params.D; ++d) mu_over_d2.add(mu[d] / static_cast<double>(d * d));
    const double gegen = mu_over_d2.value();
    for (const auto& e : entries) {
      const FixedPointReal y0 = e.fp < N ? fixed_point_pow(mpz_class(static_cast<unsigned long>(N - e.fp)), c.b(),
                                                           c.a(), params.scale_bits)
                                         : FixedPointReal(0, params.scale_bits);
      const FixedPointReal y1 =
          fixed_point_pow(mpz_class(static_cast<unsigned long>(N + 1 - e.fp)), c.b(), c.a(), params.scale_bits);
      const double diff = (y1 - y0).to_double();
      const FixedPointReal neg0 = -y0;
      const FixedPointReal neg1 = -y1;
      for (std::uint64_t d = 1; d <= params.D; ++d) {
        if (mu[d] == 0) continue;
        const std::uint64_t q = d * d;
        g3.add(mu[d] * (diff / static_cast<double>(q)) * e.logp);
        s0.add(mu[d] * psi_frac(neg0, q) * e.logp);
        s1.add(mu[d] * psi_frac(neg1, q) * e.logp);
      }
      if (e.fp < N)
        surrogate.add(gegen * gam * std::pow(static_cast<double>(N - e.fp), gam - 1.0) * e.logp);
    }
    rep.gamma3 = g3.value();
    rep.sigma0 = s0.value();
    rep.sigma1 = s1.value();
    rep.gamma3_surrogate = surrogate.value();
  }
  if (what.split && what.analytic) {
    NeumaierSum r;
    r.add(rep.gamma1);
    r.add(-rep.gamma3);
    r.add(rep.sigma0);
    r.add(-rep.sigma1);
    rep.residual_analytic = r.value();
  }
  return rep;
}

}  // namespace

Parameters Parameters::make(std::uint64_t N, const RationalExponent& c, Rational rho) {
  if (N < 2) throw DomainError("Parameters: N must be >= 2");
  if (rho <= Rational(0) || rho > Rational(1, 2)) throw DomainError("Parameters: rho must satisfy 0 < rho <= 1/2");
  Parameters p;
  p.N = N;
  p.c = c;
  p.rho = rho;
  p.D = static_cast<std::uint64_t>(std::floor(std::log(static_cast<double>(N))));
  p.window_lo_ = floor_scaled_power(N, c, rho);
  p.window_hi_ = floor_scaled_power(N, c, rho * 2);
  return p;
}

double Parameters::P() const {
  return boost::rational_cast<double>(rho) * std::pow(static_cast<double>(N), c.gamma_double());
}

double Parameters::H(std::uint64_t d) const {
  const double n = static_cast<double>(N);
  return static_cast<double>(d * d) * std::pow(n, 1.0 - c.gamma_double()) * std::log(n);
}

std::uint64_t Parameters::Z(std::uint64_t d) const {
  const double n = static_cast<double>(N);
  const double L = std::log(n);
  const double z = z_constant * static_cast<double>(d * d) * std::pow(n, 1.0 - c.gamma_double()) * L * L * L;
  return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::ceil(z)));
}

double Parameters::R(std::uint64_t d) const {
  const double n = static_cast<double>(N);
  return static_cast<double>(d * d) * std::pow(n, 1.0 - c.gamma_double()) * std::pow(std::log(n), 8);
}

std::uint64_t Parameters::Q() const {
  // exponent (152 b - 110 a) / (249 a) with gamma = b/a
  const auto a = static_cast<std::int64_t>(c.a());
  const auto b = static_cast<std::int64_t>(c.b());
  const Rational e(152 * b - 110 * a, 249 * a);
  if (e == Rational(0)) return 1;
  if (e < Rational(0)) return N == 1 ? 1 : 0;
  mpz_class x;
  mpz_ui_pow_ui(x.get_mpz_t(), N, static_cast<unsigned long>(e.numerator()));
  return mpz_get_ui(integer_kth_root(x, static_cast<unsigned long>(e.denominator())).get_mpz_t());
}

RepresentationWitness::RepresentationWitness(std::uint64_t N, std::uint64_t p, std::uint64_t m,
                                             const RationalExponent& c)
    : N_(N), p_(p), m_(m) {
  if (!is_prime_u64(p)) throw DomainError("witness: p=" + std::to_string(p) + " is not prime");
  if (m == 0 || mobius(m) == 0) throw DomainError("witness: m=" + std::to_string(m) + " is not squarefree");
  const mpz_class lhs = floor_pow(mpz_class(static_cast<unsigned long>(p)), c) +
                        floor_pow(mpz_class(static_cast<unsigned long>(m)), c);
  if (lhs != static_cast<unsigned long>(N))
    throw DomainError("witness: [p^c] + [m^c] != N for N=" + std::to_string(N));
}

FloorPowTable::FloorPowTable(const RationalExponent& c, std::uint64_t value_max, unsigned threads,
                             std::uint64_t memory_budget)
    : c_(c), value_max_(value_max), n_max_(max_base_for_value(value_max, c)) {
  const double bytes = static_cast<double>(n_max_ + 2) * (sizeof(std::uint64_t) + 1) +
                       static_cast<double>(n_max_) / std::max(1.0, std::log(static_cast<double>(n_max_) + 2)) * 1.3 *
                           sizeof(std::uint64_t);
  if (bytes > static_cast<double>(memory_budget))
    throw ResourceError("floor-power table for values <= " + std::to_string(value_max) + " needs ~" +
                        std::to_string(static_cast<std::uint64_t>(bytes)) + " bytes, over the memory budget of " +
                        std::to_string(memory_budget));

  fp_.assign(n_max_ + 2, 0);
  constexpr std::uint64_t kChunk = 1 << 14;
  const std::uint64_t count = n_max_ + 1;
  const std::size_t tasks = static_cast<std::size_t>((count + kChunk - 1) / kChunk);
  detail::parallel_for(tasks, threads, [&](std::size_t t) {
    const std::uint64_t lo = 1 + t * kChunk;
    const std::uint64_t hi = std::min(count, lo + kChunk - 1);
    for (std::uint64_t n = lo; n <= hi; ++n) fp_[n] = floorpow::floor_pow(n, c_);
  });
  mu_ = mobius_table(n_max_ + 1);
  primes_ = primes_up_to(n_max_);
}

std::uint64_t FloorPowTable::preimage(std::uint64_t K) const {
  if (K == 0 || K > value_max_ || n_max_ == 0) return 0;
  double guess = std::floor(std::pow(static_cast<double>(K), c_.gamma_double()));
  std::uint64_t m = static_cast<std::uint64_t>(std::clamp(guess, 1.0, static_cast<double>(n_max_)));
  while (m > 1 && fp_[m] > K) --m;
  while (m <= n_max_ && fp_[m + 1] <= K) ++m;
  return fp_[m] == K ? m : 0;
}

std::optional<RepresentationWitness> find_witness(std::uint64_t N, const RationalExponent& c) {
  if (N < 2) throw DomainError("find_witness: N must be >= 2");
  const std::uint64_t p_max = max_base_for_value(N - 1, c);
  std::optional<RepresentationWitness> found;
  if (p_max < 2) return found;
  // stream primes in order and stop at the first witness
  const std::uint64_t seg = std::min<std::uint64_t>(kDefaultSegmentSize, std::uint64_t{1} << 16);
  for (std::uint64_t lo = 1; lo <= p_max && !found; lo += seg) {
    const std::uint64_t hi = std::min(p_max, lo + seg - 1);
    const SieveSegment s = sieve_segment(lo, hi, seg);
    for (std::uint64_t p = lo; p <= hi; ++p) {
      if (!s.prime(p)) continue;
      const std::uint64_t f = floor_pow(p, c);
      if (f >= N) break;
      const PreimageInterval iv = floor_pow_preimage(N - f, c);
      for (std::uint64_t m = iv.lo; m <= iv.hi && !iv.empty(); ++m) {
        if (mobius(m) != 0) {
          found.emplace(N, p, m, c);
          break;
        }
      }
      if (found) break;
    }
  }
  return found;
}

ScanResult scan_exceptions(std::uint64_t N_lo, std::uint64_t N_hi, const RationalExponent& c,
                           const ScanOptions& options) {
  ScanResult result;
  if (N_lo > N_hi) return result;
  if (N_lo < 2) throw DomainError("scan_exceptions: N_lo must be >= 2");
  const double image_bytes = static_cast<double>(N_hi) / 8.0;
  if (image_bytes > static_cast<double>(options.memory_budget))
    throw ResourceError("scan_exceptions: image bit-table for N <= " + std::to_string(N_hi) +
                        " exceeds the memory budget of " + std::to_string(options.memory_budget) + " bytes");
  const FloorPowTable table(c, N_hi, options.threads,
                            options.memory_budget - static_cast<std::uint64_t>(image_bytes));

  // K is hit iff K = [m^c] for a squarefree m.
  std::vector<bool> squarefree_image(N_hi + 1, false);
  for (std::uint64_t m = 1; m <= table.n_max(); ++m)
    if (table.mobius(m) != 0) squarefree_image[table.floor_pow(m)] = true;

  const auto primes = table.primes();
  constexpr std::uint64_t kChunk = 1 << 15;
  const std::uint64_t span = N_hi - N_lo + 1;
  const std::size_t tasks = static_cast<std::size_t>((span + kChunk - 1) / kChunk);
  std::vector<ScanResult> parts(tasks);
  detail::parallel_for(tasks, options.threads, [&](std::size_t t) {
    const std::uint64_t lo = N_lo + t * kChunk;
    const std::uint64_t hi = std::min(N_hi, lo + kChunk - 1);
    auto& part = parts[t];
    for (std::uint64_t N = lo; N <= hi; ++N) {
      bool hit = false;
      for (std::uint64_t p : primes) {
        const std::uint64_t f = table.floor_pow(p);
        if (f >= N) break;
        if (squarefree_image[N - f]) {
          hit = true;
          if (options.collect_witnesses) part.witnesses.push_back({N, p, table.preimage(N - f)});
          break;
        }
      }
      if (!hit) part.exceptions.push_back(N);
    }
  });
  for (auto& part : parts) {
    result.exceptions.insert(result.exceptions.end(), part.exceptions.begin(), part.exceptions.end());
    result.witnesses.insert(result.witnesses.end(), part.witnesses.begin(), part.witnesses.end());
  }
  return result;
}

InnerCount inner_count(std::uint64_t p, std::uint64_t d, std::uint64_t N, const RationalExponent& c,
                       unsigned scale_bits) {
  if (d == 0) throw DomainError("inner_count: d must be >= 1");
  const std::uint64_t f = floor_pow(p, c);
  if (f >= N) throw DomainError("inner_count: needs [p^c] < N");
  const std::uint64_t q = d * d;
  InnerCount out;
  const PreimageInterval iv = floor_pow_preimage(N - f, c);
  if (!iv.empty()) out.count = iv.hi / q - (iv.lo - 1) / q;

  const FixedPointReal y0 = fixed_point_pow(mpz_class(static_cast<unsigned long>(N - f)), c.b(), c.a(), scale_bits);
  const FixedPointReal y1 =
      fixed_point_pow(mpz_class(static_cast<unsigned long>(N + 1 - f)), c.b(), c.a(), scale_bits);
  out.main = (y1 - y0).to_double() / static_cast<double>(q);
  out.psi_lo = psi_frac(-y0, q);
  out.psi_hi = psi_frac(-y1, q);
  return out;
}

double gamma(const Parameters& params, const FloorPowTable* table) {
  return evaluate(params, table, {.counts = true, .split = false, .analytic = false}).gamma;
}

GammaSplit gamma_split(const Parameters& params, const FloorPowTable* table) {
  const auto rep = evaluate(params, table, {.counts = true, .split = true, .analytic = false});
  return {rep.gamma1, rep.gamma2, rep.split_exact};
}

Gamma3 gamma3(const Parameters& params) {
  const auto rep = evaluate(params, nullptr, {.counts = false, .split = false, .analytic = true});
  return {rep.gamma3, rep.gamma3_surrogate};
}

double sigma_j(const Parameters& params, int j) {
  if (j != 0 && j != 1) throw DomainError("sigma_j: j must be 0 or 1");
  const auto rep = evaluate(params, nullptr, {.counts = false, .split = false, .analytic = true});
  return j == 0 ? rep.sigma0 : rep.sigma1;
}

bool GammaReport::split_ok() const {
  return split_exact && std::fabs(residual_split) <= split_tolerance() * std::fabs(gamma);
}

bool GammaReport::analytic_ok() const {
  return std::fabs(residual_analytic) <= analytic_tolerance() * std::max(1.0, gamma3);
}

GammaReport gamma_report(const Parameters& params, const FloorPowTable* table) {
  return evaluate(params, table, {.counts = true, .split = true, .analytic = true});
}

std::uint64_t count_B(std::uint64_t N, std::uint64_t d, const RationalExponent& c, const FloorPowTable* table) {
  if (d == 0) throw DomainError("count_B: d must be >= 1");
  if (N < 2) return 0;
  std::uint64_t count = 0;
  if (table_covers(table, N, c)) {
    for (std::uint64_t p : table->primes()) {
      const std::uint64_t f = table->floor_pow(p);
      if (f >= N) break;
      const std::uint64_t m = table->preimage(N - f);
      if (m != 0 && m % d == 0) ++count;
    }
    return count;
  }
  const std::uint64_t p_max = max_base_for_value(N - 1, c);
  for (std::uint64_t p : primes_up_to(p_max)) {
    const std::uint64_t f = floor_pow(p, c);
    if (f >= N) break;
    const std::uint64_t m = exact_preimage(N - f, c);
    if (m != 0 && m % d == 0) ++count;
  }
  return count;
}

double gegenbauer_sum(std::uint64_t D) {
  const auto mu = mobius_table(D);
  NeumaierSum s;
  for (std::uint64_t d = 1; d <= D; ++d)
    if (mu[d] != 0) s.add(mu[d] / (static_cast<double>(d) * static_cast<double>(d)));
  return s.value();
}

}  // namespace floorpow
