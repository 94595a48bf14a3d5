#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "caralab/types.hpp"

namespace caralab {

// Counter-based random stream.  The i-th output is a pure function of
// (key, i), so any range of indices can be evaluated on any thread (or
// skipped entirely) and the results never depend on the execution
// order.  The mixer is the SplitMix64 finalizer; walking the counter
// with the golden-gamma increment reproduces the SplitMix64 sequence.
struct Stream {
  std::uint64_t key = 0;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t at(std::uint64_t counter) const {
    return mix(key + (counter + 1) * kGamma);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  // Child stream for an independent purpose.  Labels are mixed through
  // the finalizer, so nearby labels give unrelated keys.
  Stream derive(std::uint64_t label) const {
    return Stream{mix(key ^ mix(label + 0x5851F42D4C957F2Dull))};
  }

  Stream derive(std::string_view label) const {
    // FNV-1a over the label bytes, then mixed into the key.
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : label) {
      h ^= c;
      h *= 0x100000001B3ull;
    }
    return derive(h);
  }
};

// Sequential convenience wrapper for consumers that just want "the
// next" variate (optimizers, test data generation).  Monte Carlo
// estimators index Stream directly by sample counter instead.
class SeqStream {
 public:
  explicit SeqStream(Stream s) : stream_(s) {}

  double next_uniform() { return stream_.uniform(pos_++); }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  // Standard normal via Box-Muller (one value per call, pairs drawn).
  double next_normal() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex next_complex_normal() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return Complex(r * std::cos(t), r * std::sin(t));
  }

  // Isotropic direction on the unit sphere of C^n.
  CVec next_direction(int n) {
    CVec v(n);
    do {
      for (int j = 0; j < n; ++j) v[j] = next_complex_normal();
    } while (v.norm() < 1e-12);
    return v / v.norm();
  }

  Stream fork(std::uint64_t label) const { return stream_.derive(label); }

 private:
  Stream stream_;
  std::uint64_t pos_ = 0;
};

}  // namespace caralab
