#pragma once

// Deterministic sample points: a Halton sequence with a seeded
// Cranley-Patterson shift, mapped into the chart with a 5% margin.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "prodgeo/derivatives.hpp"
#include "prodgeo/linalg.hpp"

namespace prodgeo {

inline constexpr double kSampleMargin = 0.05;

inline double radical_inverse(std::uint64_t index, int base) {
  double r = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return r;
}

inline std::vector<Vecd> sample_chart(const Chart& chart, int count, std::uint64_t seed) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  const int m = chart.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vecd shift(static_cast<std::size_t>(m));
  for (auto& s : shift) s = unit(rng);
  std::vector<Vecd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vecd u(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      double t = radical_inverse(static_cast<std::uint64_t>(k + 1), kPrimes[i]) + shift[i];
      t -= std::floor(t);
      const double w = chart.upper[i] - chart.lower[i];
      u[i] = chart.lower[i] + w * (kSampleMargin + (1.0 - 2.0 * kSampleMargin) * t);
    }
    out.push_back(std::move(u));
  }
  return out;
}

/// Independent stream of random directions for one sample point.
class DirectionSampler {
 public:
  DirectionSampler(std::uint64_t seed, std::uint64_t stream) : rng_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  Vecd unit(int dim) {
    Vecd v(static_cast<std::size_t>(dim));
    double n = 0.0;
    while (n < 1e-6) {
      for (auto& x : v) x = normal_(rng_);
      n = norm(v);
    }
    return scaled(v, 1.0 / n);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace prodgeo
