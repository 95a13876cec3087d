#include "snbclust/rng.hpp"

#include "snbclust/common.hpp"

#include <cmath>
#include <limits>

namespace snbclust {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& si : s_) si = splitmix64(x);
}

Rng Rng::fork(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0xD1B54A32D192ED03ULL + stream * 0x9E3779B97F4A7C15ULL);
  return Rng(splitmix64(x));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw ValidationError("uniform_int: n must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  // u1 in (0,1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

double Rng::gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0)
    throw ValidationError("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^(1/a).
    const double u = 1.0 - uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

long Rng::poisson(double rate) {
  if (rate < 0.0) throw ValidationError("poisson: rate must be non-negative");
  if (rate == 0.0) return 0;
  if (rate < 10.0) {
    const double l = std::exp(-rate);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }
  // PTRS transformed rejection (Hormann 1993).
  const double b = 0.931 + 2.53 * std::sqrt(rate);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_rate = std::log(rate);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    if (lhs <= -rate + kf * log_rate - std::lgamma(kf + 1.0))
      return static_cast<long>(kf);
  }
}

double Rng::chi_squared(double df) { return gamma(0.5 * df, 2.0); }

long Rng::binomial(long n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0)
    throw ValidationError("binomial: need n >= 0 and p in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (n <= 128) {
    long k = 0;
    for (long i = 0; i < n; ++i) k += uniform() < p ? 1 : 0;
    return k;
  }
  // Order-statistic split: Y = Beta(a, n+1-a) is the a-th order statistic of
  // n uniforms; condition on which side of Y the threshold p falls.
  const long a = 1 + n / 2;
  const double g1 = gamma(static_cast<double>(a), 1.0);
  const double g2 = gamma(static_cast<double>(n + 1 - a), 1.0);
  const double y = g1 / (g1 + g2);
  if (p < y) return binomial(a - 1, p / y);
  return a + binomial(n - a, (p - y) / (1.0 - y));
}

double Rng::truncated_normal(double mean, double sd, double lower) {
  if (sd <= 0.0) throw ValidationError("truncated_normal: sd must be positive");
  if (std::isinf(lower) && lower < 0.0) return normal(mean, sd);
  const double alpha = (lower - mean) / sd;
  if (alpha < 0.4) {
    // Acceptance probability >= 1 - Phi(0.4) ~ 0.34.
    for (;;) {
      const double z = normal();
      if (z >= alpha) return mean + sd * z;
    }
  }
  // Robert (1995): translated exponential proposal for far-tail truncation.
  const double rate = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
  for (;;) {
    const double e = -std::log(1.0 - uniform()) / rate;
    const double z = alpha + e;
    const double d = z - rate;
    if (uniform() <= std::exp(-0.5 * d * d)) return mean + sd * z;
  }
}

long Rng::negative_binomial(double mu, double phi) {
  if (mu < 0.0 || phi <= 0.0)
    throw ValidationError("negative_binomial: need mu >= 0 and phi > 0");
  if (mu == 0.0) return 0;
  return poisson(gamma(phi, mu / phi));
}

}  // namespace snbclust
