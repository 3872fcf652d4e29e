#pragma once

// Accumulators for the long real and complex sums.
//
// NeumaierSum is the usual error-free-transformation compensated sum.
// ExactWeightedSum accumulates integer multiples of doubles that are integer
// multiples of 2^-53 (every ln p with p >= 2 is one) without any rounding, so
// sums built from the same integer weights agree bit for bit.

#include <cmath>
#include <complex>
#include <cstdint>

#include "floorpow/errors.hpp"

namespace floorpow {

class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  NeumaierSum& operator+=(double x) {
    add(x);
    return *this;
  }
  void merge(const NeumaierSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexSum {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  ComplexSum& operator+=(std::complex<double> z) {
    add(z);
    return *this;
  }
  void merge(const ComplexSum& other) {
    re_.merge(other.re_);
    im_.merge(other.im_);
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  NeumaierSum re_;
  NeumaierSum im_;
};

class ExactWeightedSum {
 public:
  static constexpr int kFracBits = 53;

  // Adds weight * x exactly; x must be an integer multiple of 2^-53.
  void add(std::int64_t weight, double x) {
    const double scaled = std::ldexp(x, kFracBits);
    if (!(std::fabs(scaled) < 0x1p100) || std::trunc(scaled) != scaled)
      throw DomainError("ExactWeightedSum: value is not a multiple of 2^-53");
    acc_ += static_cast<__int128>(weight) * static_cast<__int128>(scaled);
  }
  void merge(const ExactWeightedSum& other) { acc_ += other.acc_; }

  // Exact scaled integer; equal sums have equal raw values.
  __int128 raw() const { return acc_; }
  double value() const { return to_double(acc_); }

  static double to_double(__int128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    const double hi = static_cast<double>(static_cast<std::uint64_t>(u >> 64));
    const double lo = static_cast<double>(static_cast<std::uint64_t>(u));
    const double r = std::ldexp(std::ldexp(hi, 64) + lo, -kFracBits);
    return neg ? -r : r;
  }

 private:
  __int128 acc_ = 0;
};

}  // namespace floorpow
