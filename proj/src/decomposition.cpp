#include "floorpow/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "floorpow/errors.hpp"
#include "floorpow/sieve.hpp"
#include "floorpow/summation.hpp"
#include "parallel.hpp"

namespace floorpow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kMaxVaughanRange = std::uint64_t{1} << 27;
constexpr std::size_t kMaxWordLength = 32;

std::complex<double> e(double x) { return std::polar(1.0, 2 * kPi * x); }

double centered(long double x) {
  x -= std::floor(x);
  if (x >= 0.5L) x -= 1.0L;
  return static_cast<double>(x);
}

// x^c with 64 fractional bits, split into integer and fraction words.
struct PowParts {
  std::uint64_t ip = 0;
  std::uint64_t frac = 0;  // fractional part times 2^64

  long double value() const { return static_cast<long double>(ip) + std::ldexp(static_cast<long double>(frac), -64); }
  // {r * x^c} exactly, then centered
  double times_mod1(std::int64_t r) const {
    const std::uint64_t prod = frac * static_cast<std::uint64_t>(r);  // wraps mod 2^64
    return centered(std::ldexp(static_cast<long double>(prod), -64));
  }
};

PowParts pow_parts(std::uint64_t n, const RationalExponent& c) {
  const FixedPointReal x = fixed_point_pow(mpz_class(static_cast<unsigned long>(n)), c.a(), c.b(), 64);
  const mpz_class ip = x.mantissa() >> 64;
  const mpz_class frac = x.mantissa() - (ip << 64);
  if (!ip.fits_ulong_p()) throw ResourceError("pow_parts: value does not fit in 64 bits");
  return {ip.get_ui(), frac.get_ui()};
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

// Vaughan's identity on an explicit table fv[n - lo - 1], n in (lo, hi].
VaughanSplit vaughan_on_range(std::span<const std::complex<double>> fv, double u, std::uint64_t lo, std::uint64_t hi) {
  VaughanSplit out;
  out.u = u;
  if (hi <= lo) return out;
  const auto U = static_cast<std::uint64_t>(std::floor(u));
  const auto f = [&](std::uint64_t n) { return fv[n - lo - 1]; };

  const auto mu = mobius_table(std::max(U, hi));
  const auto lam = mangoldt_table(hi);

  ComplexSum s1;
  for (std::uint64_t m = 1; m <= U; ++m) {
    if (!mu[m]) continue;
    ComplexSum inner;
    for (std::uint64_t l = lo / m + 1; l <= hi / m; ++l) inner.add(std::log(static_cast<double>(l)) * f(m * l));
    s1.add(static_cast<double>(mu[m]) * inner.value());
  }

  // c(m) = sum_{de = m, d <= u, e <= u} mu(d) Lambda(e)
  const std::uint64_t cmax = std::min(U * U, hi);
  std::vector<double> cm(cmax + 1, 0.0);
  for (std::uint64_t d = 1; d <= U; ++d) {
    if (!mu[d]) continue;
    for (std::uint64_t e = 2; e <= U && d * e <= cmax; ++e)
      if (lam[e] != 0.0) cm[d * e] += mu[d] * lam[e];
  }
  ComplexSum s2a, s2b;
  for (std::uint64_t m = 1; m <= cmax; ++m) {
    if (std::fabs(cm[m]) > std::log(static_cast<double>(m)) + 1e-12)
      throw Error("vaughan: |c(" + std::to_string(m) + ")| exceeds log m");
    if (cm[m] == 0.0) continue;
    ComplexSum inner;
    for (std::uint64_t l = lo / m + 1; l <= hi / m; ++l) inner.add(f(m * l));
    (m <= U ? s2a : s2b).add(cm[m] * inner.value());
  }

  // a(m) = sum_{d | m, d <= u} mu(d) for u < m <= hi / (u + 1)
  const std::uint64_t amax = hi / (U + 1);
  ComplexSum s3;
  if (amax > U) {
    std::vector<std::int64_t> am(amax + 1, 0);
    for (std::uint64_t d = 1; d <= U; ++d) {
      if (!mu[d]) continue;
      for (std::uint64_t m = (U / d + 1) * d; m <= amax; m += d) am[m] += mu[d];
    }
    const auto tau_tab = divisor_count_table(amax);
    for (std::uint64_t m = U + 1; m <= amax; ++m) {
      if (static_cast<std::uint64_t>(am[m] < 0 ? -am[m] : am[m]) > tau_tab[m])
        throw Error("vaughan: |a(" + std::to_string(m) + ")| exceeds tau(m)");
      if (!am[m]) continue;
      ComplexSum inner;
      for (std::uint64_t l = std::max(U, lo / m) + 1; l <= hi / m; ++l)
        if (lam[l] != 0.0) inner.add(lam[l] * f(m * l));
      s3.add(static_cast<double>(am[m]) * inner.value());
    }
  }

  ComplexSum direct;
  NeumaierSum direct_abs;
  for (std::uint64_t n = lo + 1; n <= hi; ++n) {
    if (lam[n] == 0.0) continue;
    direct.add(lam[n] * f(n));
    direct_abs.add(lam[n] * std::abs(f(n)));
  }

  out.S1 = s1.value();
  out.S2_small = s2a.value();
  out.S2_large = s2b.value();
  out.S2 = out.S2_small + out.S2_large;
  out.S3 = s3.value();
  out.direct = direct.value();
  out.direct_abs = direct_abs.value();
  return out;
}

}  // namespace

ExponentPair::ExponentPair(Rational kappa, Rational lambda) : kappa_(kappa), lambda_(lambda) {
  const Rational half(1, 2);
  if (kappa_ < Rational(0) || kappa_ > half || lambda_ < half || lambda_ > Rational(1))
    throw DomainError("not an exponent pair: (" + to_string(kappa_) + ", " + to_string(lambda_) + ")");
}

std::string ExponentPair::str() const {
  const std::int64_t den = lcm64(kappa_.denominator(), lambda_.denominator());
  const auto num = [&](const Rational& q) { return std::to_string(q.numerator() * (den / q.denominator())); };
  return num(kappa_) + "/" + std::to_string(den) + " " + num(lambda_) + "/" + std::to_string(den);
}

ExponentPair exppair_A(const ExponentPair& p) {
  const Rational k = p.kappa(), l = p.lambda();
  const Rational den = 2 * k + 2;
  return {k / den, (k + l + 1) / den};
}

ExponentPair exppair_B(const ExponentPair& p) {
  return {p.lambda() - Rational(1, 2), p.kappa() + Rational(1, 2)};
}

ExponentPair exppair_word(std::string_view word, const ExponentPair& seed) {
  if (word.empty()) throw DomainError("exppair_word: empty word");
  if (word.size() > kMaxWordLength) throw DomainError("exppair_word: word longer than 32 letters");
  ExponentPair p = seed;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it == 'A')
      p = exppair_A(p);
    else if (*it == 'B')
      p = exppair_B(p);
    else
      throw DomainError(std::string("exppair_word: invalid letter '") + *it + "'");
  }
  return p;
}

double expsum_bound(const ExponentPair& pair, double Y, double X) {
  if (!(Y > 0) || !(X >= 1)) throw DomainError("expsum_bound: need Y > 0 and X >= 1");
  const auto d = [](const Rational& q) { return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator()); };
  return std::pow(Y, d(pair.kappa())) * std::pow(X, d(pair.lambda())) + 1 / Y;
}

PhaseSpec PhaseSpec::monomial(double F, double sigma, double scale) {
  if (!(scale > 0)) throw DomainError("monomial phase: scale must be positive");
  PhaseSpec s;
  s.kind = Kind::monomial;
  s.F = F;
  s.sigma = sigma;
  s.scale = scale;
  return s;
}

PhaseSpec PhaseSpec::h(double r, double v, double T, const RationalExponent& c) {
  PhaseSpec s;
  s.kind = Kind::h;
  s.r = r;
  s.v = v;
  s.T = T;
  s.c = c;
  return s;
}

PhaseSpec PhaseSpec::f(double r, double v, double T, const RationalExponent& c, std::uint64_t m) {
  if (m < 1) throw DomainError("phase f: m must be >= 1");
  PhaseSpec s = h(r, v, T, c);
  s.kind = Kind::f;
  s.m = m;
  return s;
}

PhaseSpec PhaseSpec::g(double r, double v, double T, const RationalExponent& c, std::uint64_t m, std::uint64_t q) {
  PhaseSpec s = f(r, v, T, c, m);
  s.kind = Kind::g;
  s.q = q;
  return s;
}

double PhaseSpec::eval_mod1(std::uint64_t n) const {
  if (kind == Kind::monomial) {
    const long double x = static_cast<long double>(n) / scale;
    return centered(static_cast<long double>(F) * std::pow(x, static_cast<long double>(sigma)));
  }
  const auto hval = [&](std::uint64_t t) -> long double {
    const PowParts tc = pow_parts(t, c);
    const long double rest = static_cast<long double>(T) - tc.value();
    if (!(rest > 0)) throw DomainError("phase undefined: t^c >= T at t=" + std::to_string(t));
    long double first;
    if (r == std::nearbyint(r) && std::fabs(r) < 0x1p62)
      first = tc.times_mod1(static_cast<std::int64_t>(r));
    else
      first = static_cast<long double>(r) * tc.value();
    const long double gam = static_cast<long double>(c.b()) / static_cast<long double>(c.a());
    return first + static_cast<long double>(v) * std::pow(rest, gam);
  };
  switch (kind) {
    case Kind::h:
      return centered(hval(n));
    case Kind::f:
      return centered(hval(m * n));
    case Kind::g:
      return centered(hval((m + q) * n) - hval(m * n));
    default:
      break;
  }
  throw DomainError("unknown phase kind");
}

std::complex<double> expsum_eval(const PhaseSpec& phase, std::uint64_t X, std::uint64_t X0) {
  if (X < 1 || X >= X0 || X0 > 2 * X) throw DomainError("expsum_eval: need 1 <= X < X0 <= 2X");
  ComplexSum s;
  for (std::uint64_t n = X + 1; n <= X0; ++n) s.add(e(phase.eval_mod1(n)));
  return s.value();
}

VaughanSplit vaughan_decompose(const ArithmeticFunction& f, double u, double N, double N1) {
  if (!(1 < u && u <= N && N < N1) || !std::isfinite(N1))
    throw DomainError("vaughan_decompose: need 1 < u <= N < N1");
  const auto lo = static_cast<std::uint64_t>(std::floor(N));
  const auto hi = static_cast<std::uint64_t>(std::floor(N1));
  if (hi - lo > kMaxVaughanRange) throw ResourceError("vaughan_decompose: range too long");
  std::vector<std::complex<double>> fv;
  fv.reserve(hi - lo);
  for (std::uint64_t n = lo + 1; n <= hi; ++n) fv.push_back(f(n));
  VaughanSplit out = vaughan_on_range(fv, u, lo, hi);
  out.N = N;
  out.N1 = N1;
  return out;
}

WeylVdcResult weyl_vdc_check(std::span<const std::complex<double>> seq, std::uint64_t Q) {
  if (Q < 1) throw DomainError("weyl_vdc_check: Q must be >= 1");
  WeylVdcResult res;
  const std::size_t L = seq.size();
  ComplexSum total;
  for (const auto& x : seq) total.add(x);
  res.lhs = std::norm(total.value());

  ComplexSum rhs;
  const std::size_t qmax = std::min<std::size_t>(Q, L);
  for (std::size_t aq = 0; aq < qmax; ++aq) {
    const double weight = 1 - static_cast<double>(aq) / static_cast<double>(Q);
    ComplexSum corr;
    for (std::size_t n = 0; n + aq < L; ++n) corr.add(seq[n + aq] * std::conj(seq[n]));
    const auto cq = corr.value();
    if (aq == 0)
      rhs.add(weight * cq);
    else
      rhs.add(weight * (cq + std::conj(cq)));  // q and -q
  }
  const double scale = 1 + static_cast<double>(L) / static_cast<double>(Q);
  res.rhs = scale * rhs.value().real();
  res.rhs_imag = scale * rhs.value().imag();
  res.holds = res.lhs <= res.rhs * (1 + 1e-9);
  return res;
}

PrimeWindow::PrimeWindow(const Parameters& params) : params_(params) {
  const auto& c = params.c;
  sieve_range(params.window_lo() + 1, params.window_hi(), [&](const SieveSegment& seg) {
    for (std::uint64_t p = seg.lo; p <= seg.hi; ++p) {
      if (!seg.prime(p)) continue;
      const PowParts pc = pow_parts(p, c);
      const std::uint64_t fp = pc.ip;
      if (fp >= params.N) throw DomainError("PrimeWindow: [p^c] >= N inside the window");
      Entry entry{p,
                  seg.log_p(p),
                  fp,
                  static_cast<double>(std::ldexp(static_cast<long double>(pc.frac), -64)),
                  pc.value(),
                  {fixed_point_pow(mpz_class(static_cast<unsigned long>(params.N - fp)), c.b(), c.a(), params.scale_bits),
                   fixed_point_pow(mpz_class(static_cast<unsigned long>(params.N + 1 - fp)), c.b(), c.a(),
                                   params.scale_bits)}};
      entries_.push_back(std::move(entry));
    }
  });
  if (entries_.empty()) throw EmptyWindowError("no prime in the window (P, 2P] for N=" + std::to_string(params.N));
}

namespace {

void check_args(std::uint64_t d, int j) {
  if (d < 1) throw DomainError("d must be >= 1");
  if (j != 0 && j != 1) throw DomainError("j must be 0 or 1");
}

double w_phase(const PrimeWindow::Entry& en, std::uint64_t d, std::int64_t h, int j) {
  return frac_centered(en.Y[j], h, d * d);
}

}  // namespace

std::complex<double> W_eval(const PrimeWindow& window, std::uint64_t d, std::int64_t h, int j) {
  check_args(d, j);
  ComplexSum s;
  for (const auto& en : window.entries()) s.add(en.logp * e(w_phase(en, d, h, j)));
  return s.value();
}

std::vector<std::complex<double>> W_z_all(const PrimeWindow& window, const PartitionOfUnity& part, std::uint64_t d,
                                          std::int64_t h, int j) {
  check_args(d, j);
  std::vector<ComplexSum> sums(2 * part.Z());
  for (const auto& en : window.entries()) {
    const auto term = en.logp * e(w_phase(en, d, h, j));
    const auto th = theta_series_all(part, en.frac_pc);
    for (std::size_t z = 0; z < sums.size(); ++z) sums[z].add(th[z] * term);
  }
  std::vector<std::complex<double>> out(sums.size());
  for (std::size_t z = 0; z < sums.size(); ++z) out[z] = sums[z].value();
  return out;
}

std::complex<double> W_z_eval(const PrimeWindow& window, const PartitionOfUnity& part, std::uint64_t z,
                              std::uint64_t d, std::int64_t h, int j) {
  check_args(d, j);
  ComplexSum s;
  for (const auto& en : window.entries())
    s.add(theta_series(part, z, en.frac_pc) * en.logp * e(w_phase(en, d, h, j)));
  return s.value();
}

std::complex<double> V_z_eval(const PrimeWindow& window, const PartitionOfUnity& part, std::uint64_t z,
                              std::uint64_t d, std::int64_t h, int j) {
  check_args(d, j);
  const auto& prm = window.params();
  const long double gam = static_cast<long double>(prm.c.b()) / static_cast<long double>(prm.c.a());
  const long double v = static_cast<long double>(h) / static_cast<long double>(d * d);
  const long double shift = static_cast<long double>(z) / (2.0L * static_cast<long double>(part.Z()));
  ComplexSum s;
  for (const auto& en : window.entries()) {
    const long double base = static_cast<long double>(prm.N + static_cast<std::uint64_t>(j)) - en.pc + shift;
    s.add(theta_series(part, z, en.frac_pc) * en.logp * e(centered(v * std::pow(base, gam))));
  }
  return s.value();
}

double USplit::fitted_constant(double P) const { return residual / (std::sqrt(P) * std::log(P)); }

USplit U_eval_and_split(double T, std::int64_t r, double v, double P, const RationalExponent& c) {
  if (!(P >= 8) || !std::isfinite(P)) throw DomainError("U_eval_and_split: need P >= 8");
  const auto lo = static_cast<std::uint64_t>(std::floor(P));
  const auto hi = static_cast<std::uint64_t>(std::floor(2 * P));
  if (hi - lo > kMaxVaughanRange) throw ResourceError("U_eval_and_split: window too long");
  const long double gam = static_cast<long double>(c.b()) / static_cast<long double>(c.a());

  std::vector<std::complex<double>> fv;
  fv.reserve(hi - lo);
  for (std::uint64_t n = lo + 1; n <= hi; ++n) {
    const PowParts nc = pow_parts(n, c);
    const long double rest = static_cast<long double>(T) - nc.value();
    if (!(rest > 0)) throw DomainError("U_eval_and_split: need T > (2P)^c");
    fv.push_back(e(centered(nc.times_mod1(r) + static_cast<long double>(v) * std::pow(rest, gam))));
  }

  USplit out;
  ComplexSum U;
  NeumaierSum logs;
  sieve_range(lo + 1, hi, [&](const SieveSegment& seg) {
    for (std::uint64_t p = seg.lo; p <= seg.hi; ++p) {
      if (!seg.prime(p)) continue;
      U.add(seg.log_p(p) * fv[p - lo - 1]);
      logs.add(seg.log_p(p));
    }
  });
  const VaughanSplit vs = vaughan_on_range(fv, std::cbrt(P), lo, hi);
  out.U = U.value();
  out.U1 = vs.S1;
  out.U2 = vs.S2_small;
  out.U3 = vs.S2_large;
  out.U4 = vs.S3;
  out.residual = std::abs(out.U - (out.U1 - out.U2 - out.U3 - out.U4));
  out.log_sum = logs.value();
  return out;
}

std::vector<SweepRow> sweep_U(const Parameters& params, std::uint64_t d_max, std::int64_t h_max, std::int64_t r_max,
                              unsigned threads) {
  if (d_max < 1 || h_max < 1 || r_max < 0) throw DomainError("sweep_U: need d_max >= 1, h_max >= 1, r_max >= 0");
  const auto& c = params.c;
  const long double gam = static_cast<long double>(c.b()) / static_cast<long double>(c.a());
  const auto T = static_cast<long double>(params.N);

  struct Prime {
    double logp;
    PowParts pc;
    long double Yt;  // (T - p^c)^gamma
  };
  std::vector<Prime> primes;
  NeumaierSum bound_sum;
  sieve_range(params.window_lo() + 1, params.window_hi(), [&](const SieveSegment& seg) {
    for (std::uint64_t p = seg.lo; p <= seg.hi; ++p) {
      if (!seg.prime(p)) continue;
      const PowParts pc = pow_parts(p, c);
      const long double rest = T - pc.value();
      if (!(rest > 0)) throw DomainError("sweep_U: need N > (2P)^c");
      primes.push_back({seg.log_p(p), pc, std::pow(rest, gam)});
      bound_sum.add(seg.log_p(p));
    }
  });
  if (primes.empty()) throw EmptyWindowError("no prime in the window (P, 2P] for N=" + std::to_string(params.N));
  const double bound = bound_sum.value();
  const double scale = std::pow(static_cast<double>(params.N), params.c.gamma_double() - 1);

  struct Task {
    std::uint64_t d;
    std::int64_t h, r;
  };
  std::vector<Task> tasks;
  for (std::uint64_t d = 1; d <= d_max; ++d)
    for (std::int64_t h = 1; h <= h_max; ++h)
      for (std::int64_t r = -r_max; r <= r_max; ++r) tasks.push_back({d, h, r});

  std::vector<SweepRow> rows(tasks.size());
  detail::parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const auto [d, h, r] = tasks[i];
    const double v = static_cast<double>(h) / static_cast<double>(d * d);
    ComplexSum s;
    for (const auto& pr : primes)
      s.add(pr.logp * e(centered(pr.pc.times_mod1(r) + static_cast<long double>(v) * pr.Yt)));
    const double x = v * scale;
    const double ar = std::fabs(static_cast<double>(r));
    std::string regime;
    if (ar <= params.alpha1 * x)
      regime = "small";
    else if (ar >= params.A1 * x)
      regime = "large";
    else
      regime = r > 0 ? "mid_pos" : "mid_neg";
    const double abs_u = std::abs(s.value());
    rows[i] = {d, h, r, v, regime, abs_u, bound, abs_u / bound};
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  const auto old = out.precision(17);
  out << "d,h,r,v,regime,abs_u,bound,ratio\n";
  for (const auto& row : rows)
    out << row.d << ',' << row.h << ',' << row.r << ',' << row.v << ',' << row.regime << ',' << row.abs_u << ','
        << row.bound << ',' << row.ratio << '\n';
  out.precision(old);
}

}  // namespace floorpow
