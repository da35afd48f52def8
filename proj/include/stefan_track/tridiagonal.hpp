#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stefan_track {

/// Tridiagonal system; row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored.
struct TridiagonalSystem {
  std::vector<double> lower, diag, upper, rhs;

  explicit TridiagonalSystem(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}

  std::size_t size() const { return diag.size(); }

  /// Thomas algorithm; no pivoting, so the matrix should be diagonally dominant.
  std::vector<double> solve() const {
    const std::size_t n = size();
    if (n == 0) return {};
    std::vector<double> c(n), d(n), x(n);
    double denom = diag[0];
    if (denom == 0.0) throw std::runtime_error("TridiagonalSystem: zero pivot");
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = diag[i] - lower[i] * c[i - 1];
      if (denom == 0.0) throw std::runtime_error("TridiagonalSystem: zero pivot");
      c[i] = (i + 1 < n) ? upper[i] / denom : 0.0;
      d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  }
};

}  // namespace stefan_track
