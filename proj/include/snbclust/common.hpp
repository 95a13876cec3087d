#ifndef SNBCLUST_COMMON_HPP
#define SNBCLUST_COMMON_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace snbclust {

// Genes are rows everywhere; row-major storage keeps per-gene loops contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Malformed input (unreadable file, bad cell, bad flag value). CLI exit code 2.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally valid input that violates a precondition. CLI exit code 3.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure during model fitting. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Linear-interpolation quantile (R type 7) of an unsorted sample, q in [0,1].
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ValidationError("quantile: empty sample");
  if (q < 0.0 || q > 1.0) throw ValidationError("quantile: q outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return xs.back();
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[lo + 1] - xs[lo]);
}

inline double log_sum_exp(const double* vals, int n) {
  double m = vals[0];
  for (int i = 1; i < n; ++i) m = std::max(m, vals[i]);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(vals[i] - m);
  return m + std::log(s);
}

inline double soft_threshold(double u, double t) {
  if (u > t) return u - t;
  if (u < -t) return u + t;
  return 0.0;
}

}  // namespace snbclust

#endif
