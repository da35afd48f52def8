#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "stefan_track/jet.hpp"

using stefan_track::Jet;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Taylor jets from closed-form derivatives: sin^{(k)}(t) = sin(t + k pi/2).
Jet sin_jet(double t0, int order) {
  std::vector<double> c;
  for (int k = 0; k <= order; ++k) c.push_back(std::sin(t0 + k * M_PI / 2) / factorial(k));
  return Jet(c);
}

Jet cos_jet(double t0, int order) {
  std::vector<double> c;
  for (int k = 0; k <= order; ++k) c.push_back(std::cos(t0 + k * M_PI / 2) / factorial(k));
  return Jet(c);
}

Jet exp_jet(double a, double t0, int order) {
  std::vector<double> c;
  for (int k = 0; k <= order; ++k) c.push_back(std::pow(a, k) * std::exp(a * t0) / factorial(k));
  return Jet(c);
}

Jet cos_b_jet(double b, double t0, int order) {
  std::vector<double> c;
  for (int k = 0; k <= order; ++k) c.push_back(std::pow(b, k) * std::cos(b * t0 + k * M_PI / 2) / factorial(k));
  return Jet(c);
}

// k-th derivative of e^{at} cos(bt): r^k e^{at} cos(bt + k phi) with r = |a + ib|, phi = arg(a + ib).
double exp_cos_derivative(double a, double b, double t, int k) {
  const double r = std::hypot(a, b), phi = std::atan2(b, a);
  return std::pow(r, k) * std::exp(a * t) * std::cos(b * t + k * phi);
}

void expect_coeffs(const Jet& j, const std::vector<double>& want, double tol) {
  ASSERT_EQ(j.order() + 1, static_cast<int>(want.size()));
  for (int k = 0; k <= j.order(); ++k) EXPECT_NEAR(j.coeff(k), want[static_cast<std::size_t>(k)], tol) << "k=" << k;
}

}  // namespace

TEST(JetAdd, Coefficientwise) { expect_coeffs(Jet({1, 2, 3}) + Jet({4, 5, 6}), {5, 7, 9}, 0.0); }

TEST(JetAdd, ZeroIsIdentity) {
  const Jet a({0.3, -1.5, 2.25, 7.0});
  expect_coeffs(a + Jet::zero(3), {0.3, -1.5, 2.25, 7.0}, 0.0);
}

TEST(JetAdd, SinPlusCosMatchesClosedForm) {
  const double t0 = 0.3;
  const Jet sum = sin_jet(t0, 6) + cos_jet(t0, 6);
  // sin + cos = sqrt(2) sin(t + pi/4)
  for (int k = 0; k <= 6; ++k) {
    EXPECT_NEAR(sum.coeff(k), std::sqrt(2.0) * std::sin(t0 + M_PI / 4 + k * M_PI / 2) / factorial(k), 1e-12);
  }
}

TEST(JetAdd, MixedOrdersTruncate) {
  const Jet s = Jet({1, 1, 1, 1}) - Jet({1, 2});
  expect_coeffs(s, {0, -1}, 0.0);
}

TEST(JetMul, PolynomialIdentity) { expect_coeffs(Jet({1, 1, 0}) * Jet({1, -1, 0}), {1, 0, -1}, 0.0); }

TEST(JetMul, ConstantScales) {
  const Jet a({1.5, -2.0, 0.25, 4.0});
  const Jet prod = Jet::constant(3.0, 3) * a;
  expect_coeffs(prod, {4.5, -6.0, 0.75, 12.0}, 1e-15);
  expect_coeffs(a * 3.0, {4.5, -6.0, 0.75, 12.0}, 1e-15);
  expect_coeffs(a / 2.0, {0.75, -1.0, 0.125, 2.0}, 1e-15);
}

TEST(JetMul, ExpTimesCosMatchesClosedForm) {
  const double a = -0.7, b = 1.3, t0 = 0.5;
  const Jet prod = exp_jet(a, t0, 8) * cos_b_jet(b, t0, 8);
  for (int k = 0; k <= 8; ++k) {
    const double want = exp_cos_derivative(a, b, t0, k);
    EXPECT_LE(std::abs(prod.derivative_value(k) - want), 1e-10 * std::abs(want)) << "k=" << k;
  }
}

TEST(JetMul, RandomPolynomialsMatchExactProduct) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> ord(0, 8);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    // jet coefficients of a polynomial about 0 are its coefficients
    std::vector<double> p(static_cast<std::size_t>(ord(rng)) + 1), q(p.size());
    for (auto& v : p) v = val(rng);
    for (auto& v : q) v = val(rng);
    std::vector<double> full(2 * p.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) full[i + j] += p[i] * q[j];
    const Jet prod = Jet(p) * Jet(q);
    for (int k = 0; k <= prod.order(); ++k) {
      const double want = full[static_cast<std::size_t>(k)];
      EXPECT_LE(std::abs(prod.coeff(k) - want), 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(JetDerivative, Definition) { expect_coeffs(Jet({2.0, 3.0, 5.0}).derivative(), {3.0, 10.0}, 0.0); }

TEST(JetDerivative, SinToCos) {
  const Jet d = sin_jet(0.0, 5).derivative();
  const Jet c = cos_jet(0.0, 4);
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(d.coeff(k), c.coeff(k), 1e-15);
}

TEST(JetDerivative, SecondDerivativeMatchesFiniteDifference) {
  const double delta = 4e-4, omega = 2e-3, t = 100.0, h = 1e-3;
  const Jet f = exp_jet(-delta, t, 6) * cos_b_jet(omega, t, 6);
  const double second = f.derivative().derivative().value();
  auto first = [&](double tt) { return exp_cos_derivative(-delta, omega, tt, 1); };
  const double fd = (first(t + h) - first(t - h)) / (2 * h);
  EXPECT_LE(std::abs(second - fd), 1e-6 * std::abs(fd));
}

TEST(JetDerivative, LeibnizRule) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(7), q(7);
    for (auto& v : p) v = val(rng);
    for (auto& v : q) v = val(rng);
    const Jet P(p), Q(q);
    const Jet lhs = (P * Q).derivative();
    const Jet rhs = P.derivative() * Q.truncated(5) + P.truncated(5) * Q.derivative();
    for (int k = 0; k <= lhs.order(); ++k) {
      EXPECT_LE(std::abs(lhs.coeff(k) - rhs.coeff(k)), 1e-12 * std::max(1.0, std::abs(rhs.coeff(k))));
    }
  }
}

TEST(JetErrors, RejectsInvalidInput) {
  EXPECT_THROW(Jet(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Jet({1.0, NAN}), std::domain_error);
  EXPECT_THROW(Jet({1.0}).derivative(), std::domain_error);
  EXPECT_THROW(Jet({1.0, 2.0}).truncated(2), std::out_of_range);
}

TEST(JetFactories, VariableAndConstant) {
  expect_coeffs(Jet::variable(2.5, 3), {2.5, 1.0, 0.0, 0.0}, 0.0);
  expect_coeffs(Jet::constant(-1.0, 2), {-1.0, 0.0, 0.0}, 0.0);
  EXPECT_DOUBLE_EQ(Jet({1.0, 2.0, 3.0, 4.0}).derivative_value(3), 24.0);
}
