#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "flagframe/errors.hpp"

namespace flagframe {

// Fourth-order first derivative on a uniform grid: central in the interior,
// one-sided at the two points nearest each end. Needs at least 5 samples.
template <class T>
std::vector<T> fd_derivative(const std::vector<T>& f, double dt) {
  const std::size_t n = f.size();
  if (n < 5) throw InputError("finite differences need at least 5 samples");
  const double c = 1.0 / (12.0 * dt);
  std::vector<T> d(n);
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + 1.0 * f[4]) * c;
  for (std::size_t j = 2; j + 2 < n; ++j) d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * c;
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - 1.0 * f[n - 5]) * c;
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * c;
  return d;
}

// Central stencil only; the result covers samples 2..n-3 of the input.
template <class T>
std::vector<T> fd_central(const std::vector<T>& f, double dt) {
  const std::size_t n = f.size();
  if (n < 5) throw InputError("finite differences need at least 5 samples");
  const double c = 1.0 / (12.0 * dt);
  std::vector<T> d;
  d.reserve(n - 4);
  for (std::size_t j = 2; j + 2 < n; ++j) d.push_back((f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * c);
  return d;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double max_abs(const std::vector<Eigen::VectorXd>& v) {
  double m = 0;
  for (const auto& x : v)
    if (x.size()) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace flagframe
