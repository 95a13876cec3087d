#ifndef SNBCLUST_RNG_HPP
#define SNBCLUST_RNG_HPP

#include <cstdint>

namespace snbclust {

/// xoshiro256++ generator with splitmix64 seeding. All samplers are
/// hand-rolled so that a given seed produces the same stream on every
/// platform and standard-library version.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  /// Derives an independent generator for a parallel stream (restart index,
  /// replicate index, ...). Pure function of (seed, stream).
  static Rng fork(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n), unbiased (rejection).
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal via Box-Muller (cosine branch only, no cached spare).
  double normal();
  double normal(double mean, double sd);

  /// Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 handled by boosting.
  double gamma(double shape, double scale);

  /// Poisson(rate): Knuth product method below rate 10, PTRS above.
  long poisson(double rate);

  double chi_squared(double df);

  /// Exact Binomial(n, p): Bernoulli loop for small n, beta splitting above.
  long binomial(long n, double p);

  /// Normal(mean, sd) conditioned on >= lower. Plain rejection near the bulk,
  /// Robert's translated-exponential rejection in the far tail.
  /// lower = -infinity degenerates to the unconditioned normal.
  double truncated_normal(double mean, double sd, double lower);

  /// NB(mu, phi) with Var = mu + mu^2/phi, sampled as Gamma(phi, mu/phi) -> Poisson.
  long negative_binomial(double mu, double phi);

private:
  std::uint64_t s_[4];
};

}  // namespace snbclust

#endif
