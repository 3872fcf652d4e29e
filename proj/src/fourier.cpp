#include "floorpow/fourier.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "floorpow/errors.hpp"
#include "floorpow/summation.hpp"

namespace floorpow {

namespace {

constexpr double kPi = std::numbers::pi;
// rotations drift by a few ulps per step, so re-anchor from sin/cos this often
constexpr std::int64_t kAnchorEvery = 32;
// slack for floating-point evaluation on top of the analytic tail bound
constexpr double kRoundingAllowance = 1e-12;
constexpr std::uint64_t kMaxTerms = std::uint64_t{1} << 30;

std::complex<double> expi(double x) {
  x -= std::floor(x);
  return {std::cos(2 * kPi * x), std::sin(2 * kPi * x)};
}

// Steps through e(n x) for n = 0, 1, 2, ...
class Rotor {
 public:
  explicit Rotor(double x) : x_(x - std::floor(x)), step_(expi(x_)) {}
  std::complex<double> current() const { return cur_; }
  void advance() {
    ++n_;
    if (n_ % kAnchorEvery == 0) {
      const double nx = static_cast<double>(n_) * x_;
      cur_ = expi(nx - std::floor(nx));
    } else {
      cur_ *= step_;
    }
  }

 private:
  double x_;
  std::complex<double> step_;
  std::complex<double> cur_{1.0, 0.0};
  std::int64_t n_ = 0;
};

double vaaler_phi(double u) {
  u = std::fabs(u);
  return kPi * u * (1 - u) / std::tan(kPi * u) + u;
}

// CDF of the sum of m independent uniforms on [0, 1].
double irwin_hall_cdf(unsigned m, double x) {
  if (x <= 0) return 0.0;
  if (x >= m) return 1.0;
  double fact = 1;
  for (unsigned i = 2; i <= m; ++i) fact *= i;
  double sum = 0, binom = 1;
  for (unsigned j = 0; j <= m && j <= x; ++j) {
    const double term = binom * std::pow(x - j, m);
    sum += (j % 2 ? -term : term);
    binom = binom * (m - j) / (j + 1);
  }
  return sum / fact;
}

double sinc(double x) { return x == 0 ? 1.0 : std::sin(x) / x; }

double shift(const PartitionOfUnity& part, std::uint64_t z, double x) {
  if (z >= 2 * part.Z()) throw DomainError("theta: z must be < 2Z");
  double y = x - static_cast<double>(z) / (2.0 * static_cast<double>(part.Z()));
  return y - std::floor(y);
}

}  // namespace

double psi(double t) { return t - std::floor(t) - 0.5; }

VaalerApprox vaaler_build(std::int64_t H) {
  if (H < 1) throw DomainError("vaaler_build: H must be >= 1");
  if (static_cast<std::uint64_t>(H) > kMaxTerms) throw ResourceError("vaaler_build: H too large");
  VaalerApprox v;
  v.H = H;
  v.a.assign(static_cast<std::size_t>(2 * H + 1), {0.0, 0.0});
  v.b.assign(static_cast<std::size_t>(2 * H + 1), 0.0);
  const double H1 = static_cast<double>(H + 1);
  for (std::int64_t h = -H; h <= H; ++h) {
    const auto i = static_cast<std::size_t>(h + H);
    v.b[i] = (1 - std::fabs(static_cast<double>(h)) / H1) / (2 * H1);
    if (h == 0) continue;
    // -phi / (2 pi i h) = i phi / (2 pi h)
    v.a[i] = {0.0, vaaler_phi(static_cast<double>(h) / H1) / (2 * kPi * static_cast<double>(h))};
  }
  return v;
}

PsiApprox psi_approx_eval(const VaalerApprox& approx, double t) {
  ComplexSum value, major;
  major.add(approx.coeff_b(0));
  Rotor rot(t);
  for (std::int64_t h = 1; h <= approx.H; ++h) {
    rot.advance();
    const auto eh = rot.current();
    value.add(approx.coeff_a(h) * eh);
    value.add(approx.coeff_a(-h) * std::conj(eh));
    major.add(approx.coeff_b(h) * eh);
    major.add(approx.coeff_b(-h) * std::conj(eh));
  }
  const auto v = value.value();
  return {v.real(), v.imag(), major.value().real()};
}

void write_vaaler_csv(std::ostream& out, const VaalerApprox& approx) {
  const auto old = out.precision(17);
  out << "h,re,im,b\n";
  for (std::int64_t h = -approx.H; h <= approx.H; ++h) {
    const auto a = approx.coeff_a(h);
    out << h << ',' << a.real() << ',' << a.imag() << ',' << approx.coeff_b(h) << '\n';
  }
  out.precision(old);
}

double partition_tail_bound(std::uint64_t Z, unsigned order, std::uint64_t n_max) {
  if (Z < 1 || order < 2 || n_max < 1) throw DomainError("partition_tail_bound: bad shape");
  const double m = order - 1;
  const double w = 1.0 / (2.0 * static_cast<double>(Z));
  const double delta = w / m;
  // |g_0(n)| <= (1/pi) (pi delta)^-m n^-order, summed over |n| > n_max
  return 2.0 / kPi * std::pow(kPi * delta, -m) * std::pow(static_cast<double>(n_max), -m) / m;
}

std::uint64_t partition_min_n_max(std::uint64_t Z, unsigned order, double eps) {
  if (!(eps > 0)) throw DomainError("partition_min_n_max: eps must be positive");
  const double m = order - 1;
  const double first = partition_tail_bound(Z, order, 1);
  double guess = std::ceil(std::pow(first / eps, 1.0 / m));
  if (guess > static_cast<double>(kMaxTerms)) throw ResourceError("partition_min_n_max: truncation too long");
  auto n = std::max<std::uint64_t>(2 * Z, static_cast<std::uint64_t>(guess));
  while (n > 2 * Z && partition_tail_bound(Z, order, n - 1) <= eps) --n;
  while (partition_tail_bound(Z, order, n) > eps) ++n;
  return n;
}

PartitionOfUnity partition_build(std::uint64_t Z, unsigned order, std::uint64_t n_max, double eps_target) {
  if (Z < 2) throw DomainError("partition_build: Z must be >= 2");
  if (order < 2) throw DomainError("partition_build: smooth order must be >= 2");
  if (n_max < 2 * Z) throw DomainError("partition_build: n_max must be >= 2Z");
  if (n_max > kMaxTerms) throw ResourceError("partition_build: n_max too large");
  const double tail = partition_tail_bound(Z, order, n_max);
  if (tail > eps_target)
    throw DomainError("partition_build: truncation bound " + std::to_string(tail) + " exceeds target; need n_max >= " +
                      std::to_string(partition_min_n_max(Z, order, eps_target)));

  PartitionOfUnity part;
  part.Z_ = Z;
  part.order_ = order;
  part.n_max_ = n_max;
  part.eps_trunc_ = tail + kRoundingAllowance;
  const double m = order - 1;
  const double w = 1.0 / (2.0 * static_cast<double>(Z));
  const double delta = w / m;
  part.g0_.resize(n_max + 1);
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    const double x = kPi * static_cast<double>(n);
    part.g0_[n] = w * sinc(x * w) * std::pow(sinc(x * delta), m);
  }
  part.roots_.resize(2 * Z);
  for (std::uint64_t k = 0; k < 2 * Z; ++k)
    part.roots_[k] = expi(-static_cast<double>(k) / (2.0 * static_cast<double>(Z)));
  return part;
}

std::complex<double> PartitionOfUnity::phase(std::uint64_t z, std::int64_t n) const {
  if (z >= 2 * Z_) throw DomainError("phase: z must be < 2Z");
  const auto period = static_cast<std::int64_t>(2 * Z_);
  const std::int64_t r = ((n % period) + period) % period;
  return roots_[static_cast<std::uint64_t>(r) * z % (2 * Z_)];
}

std::complex<double> PartitionOfUnity::g(std::uint64_t z, std::int64_t n) const {
  const std::uint64_t an = static_cast<std::uint64_t>(n < 0 ? -n : n);
  if (an > n_max_) {
    if (z >= 2 * Z_) throw DomainError("g: z must be < 2Z");
    return {0.0, 0.0};
  }
  return g0_[an] * phase(z, n);
}

double theta_series(const PartitionOfUnity& part, std::uint64_t z, double x) {
  // sum_n g_0(n) e(-nz/2Z) e(nx) = sum_n g_0(n) e(n (x - z/2Z))
  const double y = shift(part, z, x);
  NeumaierSum s;
  s.add(part.g0()[0]);
  Rotor rot(y);
  for (std::uint64_t n = 1; n <= part.n_max(); ++n) {
    rot.advance();
    s.add(2 * part.g0()[n] * rot.current().real());
  }
  return s.value();
}

std::vector<double> theta_series_all(const PartitionOfUnity& part, double x) {
  const std::uint64_t period = 2 * part.Z();
  // A_r = sum over n = r (mod 2Z) of g_0(n) e(nx); then theta_z = sum_r A_r e(-rz/2Z)
  std::vector<std::complex<double>> A(period, {0.0, 0.0});
  A[0] += part.g0()[0];
  Rotor rot(x);
  for (std::uint64_t n = 1; n <= part.n_max(); ++n) {
    rot.advance();
    const auto t = part.g0()[n] * rot.current();
    A[n % period] += t;
    A[(period - n % period) % period] += std::conj(t);
  }
  std::vector<double> out(period);
  for (std::uint64_t z = 0; z < period; ++z) {
    ComplexSum s;
    for (std::uint64_t r = 0; r < period; ++r) s.add(A[r] * part.phase(z, static_cast<std::int64_t>(r)));
    out[z] = s.value().real();
  }
  return out;
}

double theta_eval(const PartitionOfUnity& part, std::uint64_t z, double x) {
  const double v = theta_series(part, z, x);
  return (v < 0 && v > -part.eps_trunc()) ? 0.0 : v;
}

double theta_exact(const PartitionOfUnity& part, std::uint64_t z, double x) {
  double y = shift(part, z, x);
  if (y >= 0.5) y -= 1.0;
  const unsigned m = part.order() - 1;
  const double w = 1.0 / (2.0 * static_cast<double>(part.Z()));
  const double delta = w / m;
  // P(|y - S| <= w/2) with S a sum of m uniforms on [-delta/2, delta/2]
  auto cdf = [&](double s) { return irwin_hall_cdf(m, s / delta + m / 2.0); };
  return cdf(y + w / 2) - cdf(y - w / 2);
}

}  // namespace floorpow
