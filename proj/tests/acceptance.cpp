// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <mpfr.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "floorpow/decomposition.hpp"
#include "floorpow/exact_arith.hpp"
#include "floorpow/fourier.hpp"
#include "floorpow/representation.hpp"
#include "oracles.hpp"

#ifndef FLOORPOW_GOLDEN_DIR
#error "FLOORPOW_GOLDEN_DIR must point at tests/golden"
#endif

using namespace floorpow;

namespace {

const RationalExponent kC(82, 79);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned worker_count() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

// Runs body(i) for i in [0, n) over a few threads; body must only touch slot i.
void parallel(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned w = worker_count();
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < w; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < n; i += w) body(i);
    }));
  for (auto& j : jobs) j.get();
}

std::vector<std::uint64_t> read_golden(const std::string& name) {
  std::ifstream in(std::string(FLOORPOW_GOLDEN_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing golden file " + name);
  std::vector<std::uint64_t> v;
  for (std::uint64_t x; in >> x;) v.push_back(x);
  return v;
}

Outcome exhaustive_scan() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto big = scan_exceptions(10000, 1000000, kC, {.threads = worker_count()});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto small = scan_exceptions(2, 9999, kC).exceptions;
  const auto golden = read_golden("exceptions_82_79_below_10000.txt");
  const bool pass = big.exceptions.empty() && small == golden && secs <= 600;
  return {pass, fmt("exceptions in [1e4,1e6]: %zu; below 1e4: %zu (golden %zu, match %d); %.2f s",
                    big.exceptions.size(), small.size(), golden.size(), small == golden, secs)};
}

Outcome oracle_equivalence() {
  std::size_t mismatches = 0;
  for (const auto& c : {RationalExponent(3, 2), kC}) {
    const auto brute = oracle::brute_pairs(2000, c.a(), c.b());
    for (std::uint64_t N = 2; N <= 2000; ++N)
      if (find_witness(N, c).has_value() != (brute.represented[N] != 0)) ++mismatches;
  }
  return {mismatches == 0, fmt("mismatches: %zu over N <= 2000, c in {3/2, 82/79}", mismatches)};
}

Outcome decomposition_identities() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(std::log(1e4), std::log(1e6));
  int bad_split = 0, bad_analytic = 0;
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const auto N = static_cast<std::uint64_t>(std::exp(unif(rng)));
    const auto r = gamma_report(Parameters::make(N, kC));
    if (r.residual_split != 0.0) ++bad_split;
    const double rel = std::fabs(r.gamma1 - (r.gamma3 - r.sigma0 + r.sigma1)) / std::max(1.0, r.gamma3);
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++bad_analytic;
  }
  return {bad_split == 0 && bad_analytic == 0,
          fmt("20 N: nonzero split residuals %d, analytic failures %d, worst relative residual %.3g", bad_split,
              bad_analytic, worst)};
}

Outcome gegenbauer() {
  const double target = 6 / (std::numbers::pi * std::numbers::pi);
  bool pass = true;
  std::string detail;
  for (std::uint64_t D : {10ULL, 100ULL, 1000ULL, 10000ULL}) {
    const double err = std::fabs(gegenbauer_sum(D) - target);
    pass = pass && err <= 1.0 / static_cast<double>(D);
    detail += fmt("D=%llu err=%.3g ", static_cast<unsigned long long>(D), err);
  }
  return {pass, detail};
}

Outcome exponent_pair() {
  const auto p = exppair_word("BA", ExponentPair(Rational(13, 84), Rational(55, 84)));
  const bool pass = p.kappa() == Rational(55, 194) && p.lambda() == Rational(110, 194);
  return {pass, "BA(13/84, 55/84) = (" + p.str() + ")"};
}

Outcome vaughan() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> unif(0, 1);
  int failures = 0;
  double worst = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 50; ++i) {
    const double N1 = 100 + (10000 - 100) * unif(rng);
    const double N = 2 + (N1 - 3) * unif(rng);
    const double u = 1.01 + (std::max(1.02, std::sqrt(N1)) - 1.01) * unif(rng);
    if (u > N) {
      --i;
      continue;
    }
    const double a = unif(rng), b = 3 * unif(rng), amp = 0.1 + unif(rng);
    ArithmeticFunction f;
    switch (i % 3) {
      case 0:
        f = [=](std::uint64_t n) { return std::polar(1.0, 2 * std::numbers::pi * a * static_cast<double>(n)); };
        break;
      case 1:
        f = [=](std::uint64_t n) {
          return std::polar(amp, 2 * std::numbers::pi * b * std::pow(static_cast<double>(n), 1.5) / 100.0);
        };
        break;
      default:
        f = [=](std::uint64_t n) { return std::complex<double>(std::cos(a * static_cast<double>(n)), b); };
    }
    const auto s = vaughan_decompose(f, u, N, N1);
    const double rel = s.residual() / std::max(s.direct_abs, 1e-300);
    worst = std::max(worst, s.direct_abs > 0 ? rel : s.residual());
    if (s.residual() > 1e-8 * s.direct_abs) ++failures;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {failures == 0 && secs <= 60, fmt("50 configurations: failures %d, worst relative residual %.3g, %.2f s",
                                           failures, worst, secs)};
}

Outcome vaaler() {
  bool pass = true;
  std::string detail;
  const int grid = 100000;
  for (std::int64_t H : {10, 100, 1000}) {
    const auto v = vaaler_build(H);
    std::vector<double> excess(grid), err(grid);
    parallel(grid, [&](std::size_t k) {
      const double t = (static_cast<double>(k) + 0.5) / grid;
      const auto r = psi_approx_eval(v, t);
      err[k] = std::fabs(psi(t) - r.value);
      excess[k] = err[k] - r.majorant;
    });
    const double worst_excess = *std::max_element(excess.begin(), excess.end());
    const double sup_err = *std::max_element(err.begin(), err.end());
    double mean_err = 0;
    for (double e : err) mean_err += e / grid;
    // error <= C / H with the error taken as the grid sup
    const double fitted = static_cast<double>(H) * sup_err;
    pass = pass && worst_excess <= 0 && fitted <= 2;
    detail += fmt("H=%lld: excess %.3g, sup err %.3g, C=%.3g (mean-error C %.3g); ", static_cast<long long>(H),
                  worst_excess, sup_err, fitted, static_cast<double>(H) * mean_err);
  }
  return {pass, detail};
}

Outcome partition() {
  bool pass = true;
  std::string detail;
  const int grid = 10000;
  for (std::uint64_t Z : {4ULL, 16ULL, 64ULL}) {
    const auto part = partition_build(Z, 4, partition_min_n_max(Z, 4));
    std::vector<double> dev(grid);
    parallel(grid, [&](std::size_t k) {
      const auto th = theta_series_all(part, (static_cast<double>(k) + 0.5) / grid);
      double s = 0;
      for (double t : th) s += t;
      dev[k] = std::fabs(s - 1);
    });
    const double worst = *std::max_element(dev.begin(), dev.end());
    double gmax = 0;
    for (double g : part.g0()) gmax = std::max(gmax, std::fabs(g));
    const double cap = 1.0 / (2.0 * static_cast<double>(Z));
    pass = pass && worst <= 1e-9 && gmax <= cap;
    detail += fmt("Z=%llu: |sum-1| %.3g, max|g| %.17g <= %.17g; ", static_cast<unsigned long long>(Z), worst, gmax, cap);
  }
  return {pass, detail};
}

Outcome weyl_vdc() {
  std::mt19937_64 rng(107);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0, 1);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t L = 1 + rng() % 512;
    std::vector<std::complex<double>> seq(L);
    if (trial % 2) {
      for (auto& x : seq) x = {gauss(rng), gauss(rng)};
    } else {
      const double a = unif(rng), b = unif(rng);
      for (std::size_t n = 0; n < L; ++n) {
        const double dn = static_cast<double>(n);
        seq[n] = std::polar(1.0, 2 * std::numbers::pi * (a * dn * dn + b * dn));
      }
    }
    const std::uint64_t Q = 1 + rng() % (2 * L);
    if (!weyl_vdc_check(seq, Q).holds) ++failures;
  }
  return {failures == 0, fmt("1000 sequences: failures %d", failures)};
}

// max over samples N <= X and d of B(N, d) d ln N / N^(2 gamma - 1)
Outcome solution_count_trend() {
  const FloorPowTable table(kC, 1000000, worker_count());
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> unif(std::log(1e4), std::log(1e6));
  std::vector<std::uint64_t> Ns(400);
  for (auto& N : Ns) N = static_cast<std::uint64_t>(std::exp(unif(rng)));
  std::vector<double> fitted(Ns.size());
  const double shape_exp = 2 * kC.gamma_double() - 1;
  parallel(Ns.size(), [&](std::size_t i) {
    const double N = static_cast<double>(Ns[i]);
    double best = 0;
    for (std::uint64_t d : {1ULL, 2ULL, 3ULL, 5ULL})
      best = std::max(best, static_cast<double>(count_B(Ns[i], d, kC, &table)) * static_cast<double>(d) *
                                std::log(N) / std::pow(N, shape_exp));
    fitted[i] = best;
  });
  auto C = [&](double X) {
    double m = 0;
    for (std::size_t i = 0; i < Ns.size(); ++i)
      if (static_cast<double>(Ns[i]) <= X) m = std::max(m, fitted[i]);
    return m;
  };
  const double half = C(5e5), full = C(1e6);
  std::string trail;
  for (double X = 2e4; X <= 1e6; X *= 2) trail += fmt("C(%.0f)=%.4g ", X, C(X));
  return {full <= 1.25 * half, fmt("C(5e5)=%.4g C(1e6)=%.4g ratio %.4f; %s", half, full, full / half, trail.c_str())};
}

Outcome gamma_positive() {
  const FloorPowTable table(kC, 1000000, worker_count());
  std::mt19937_64 rng(113);
  std::vector<std::uint64_t> Ns(1000);
  for (auto& N : Ns) N = 100000 + rng() % 900001;
  std::vector<double> g(Ns.size());
  parallel(Ns.size(), [&](std::size_t i) { g[i] = gamma(Parameters::make(Ns[i], kC, Rational(1, 4)), &table); });
  const auto nonpos = std::count_if(g.begin(), g.end(), [](double x) { return !(x > 0); });
  const double gmin = *std::min_element(g.begin(), g.end());
  return {nonpos == 0, fmt("1000 N in [1e5,1e6]: nonpositive %ld, min gamma %.4g", static_cast<long>(nonpos), gmin)};
}

Outcome exact_arith() {
  const RationalExponent cs[] = {{82, 79}, {11, 10}, {3, 2}};
  const std::size_t samples = 1000000;
  std::vector<std::uint8_t> bad(samples, 0);
  parallel(samples, [&](std::size_t i) {
    std::mt19937_64 rng(1000003 + i);
    const std::uint64_t n = 1 + rng() % 1000000000000ULL;
    const auto& c = cs[i % 3];
    bad[i] = mpz_class(static_cast<unsigned long>(floor_pow(n, c))) != oracle::mpfr_floor_pow(n, c.a(), c.b());
  });
  const auto random_bad = std::count(bad.begin(), bad.end(), 1);

  // every floor power the scan of [1e4, 1e6] looks up: n <= n_max + 1
  const FloorPowTable table(kC, 1000000, worker_count());
  const std::size_t count = table.n_max() + 1;
  std::vector<std::uint8_t> bbad(count, 0);
  parallel(count, [&](std::size_t i) {
    const std::uint64_t n = i + 1;
    const auto want = oracle::mpfr_floor_pow(n, 82, 79);
    bbad[i] = mpz_class(static_cast<unsigned long>(floor_pow(n, kC))) != want ||
              mpz_class(static_cast<unsigned long>(table.floor_pow(n))) != want;
  });
  const auto boundary_bad = std::count(bbad.begin(), bbad.end(), 1);
  return {random_bad == 0 && boundary_bad == 0,
          fmt("random: %ld / %zu mismatches; scan table: %ld / %zu mismatches", static_cast<long>(random_bad), samples,
              static_cast<long>(boundary_bad), count)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"exhaustive solvability", exhaustive_scan},
      {"oracle equivalence", oracle_equivalence},
      {"decomposition identities", decomposition_identities},
      {"Gegenbauer constant", gegenbauer},
      {"exponent-pair reproduction", exponent_pair},
      {"Vaughan identity", vaughan},
      {"Vaaler contract", vaaler},
      {"partition contract", partition},
      {"Weyl-van der Corput", weyl_vdc},
      {"B(N) trend", solution_count_trend},
      {"Gamma positivity", gamma_positive},
      {"exact arithmetic", exact_arith},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
