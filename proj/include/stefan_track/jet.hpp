#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stefan_track {

/// Truncated Taylor series of a scalar function about a fixed time point.
///
/// Coefficients are stored normalized: coeff(k) == f^{(k)}(t0) / k!.
/// Binary operations between jets of different order truncate to the
/// shorter operand.
class Jet {
 public:
  Jet() : coeffs_(1, 0.0) {}

  explicit Jet(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
      throw std::invalid_argument("Jet: at least one coefficient is required");
    }
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (!std::isfinite(coeffs_[k])) {
        throw std::domain_error("Jet: non-finite coefficient at index " + std::to_string(k));
      }
    }
  }

  static Jet zero(int order) { return Jet(std::vector<double>(checked_size(order), 0.0)); }

  static Jet constant(double value, int order) {
    std::vector<double> c(checked_size(order), 0.0);
    c[0] = value;
    return Jet(std::move(c));
  }

  /// Jet of the identity function t -> t0 + (t - t0).
  static Jet variable(double t0, int order) {
    std::vector<double> c(checked_size(order), 0.0);
    c[0] = t0;
    if (order >= 1) c[1] = 1.0;
    return Jet(std::move(c));
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  double value() const { return coeffs_[0]; }
  double coeff(int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
  std::span<const double> coeffs() const { return coeffs_; }

  /// The m-th time derivative f^{(m)}(t0) = m! * coeff(m).
  double derivative_value(int m) const {
    double fact = 1.0;
    for (int j = 2; j <= m; ++j) fact *= j;
    return fact * coeff(m);
  }

  Jet derivative() const {
    if (order() < 1) {
      throw std::domain_error("Jet::derivative: order-0 jet carries no derivative information");
    }
    std::vector<double> c(coeffs_.size() - 1);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = static_cast<double>(k + 1) * coeffs_[k + 1];
    return Jet(std::move(c));
  }

  Jet truncated(int order) const {
    if (order < 0 || order > this->order()) {
      throw std::out_of_range("Jet::truncated: requested order outside [0, order()]");
    }
    return Jet(std::vector<double>(coeffs_.begin(), coeffs_.begin() + order + 1));
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    std::vector<double> c(common_size(a, b));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeffs_[k] + b.coeffs_[k];
    return Jet(std::move(c));
  }

  friend Jet operator-(const Jet& a, const Jet& b) {
    std::vector<double> c(common_size(a, b));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeffs_[k] - b.coeffs_[k];
    return Jet(std::move(c));
  }

  friend Jet operator-(const Jet& a) { return -1.0 * a; }

  // Cauchy product.
  friend Jet operator*(const Jet& a, const Jet& b) {
    std::vector<double> c(common_size(a, b), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j <= k; ++j) sum += a.coeffs_[j] * b.coeffs_[k - j];
      c[k] = sum;
    }
    return Jet(std::move(c));
  }

  friend Jet operator*(double s, const Jet& a) {
    std::vector<double> c(a.coeffs_);
    for (double& x : c) x *= s;
    return Jet(std::move(c));
  }

  friend Jet operator*(const Jet& a, double s) { return s * a; }
  friend Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }

 private:
  static std::size_t checked_size(int order) {
    if (order < 0) throw std::invalid_argument("Jet: negative order");
    return static_cast<std::size_t>(order) + 1;
  }

  static std::size_t common_size(const Jet& a, const Jet& b) {
    return std::min(a.coeffs_.size(), b.coeffs_.size());
  }

  std::vector<double> coeffs_;
};

}  // namespace stefan_track
