#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "stefan_track/controller.hpp"
#include "stefan_track/jet.hpp"
#include "stefan_track/planner.hpp"
#include "stefan_track/solver.hpp"

namespace stefan_track {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity (error, ratio, count)
  double threshold = 0.0;  // pass iff value <= threshold unless noted in name
};

namespace verify {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Jet of Re(w exp(z t)) about t0.
inline Jet exponential_jet(std::complex<double> w, std::complex<double> z, double t0, int order) {
  std::vector<double> c(static_cast<std::size_t>(order) + 1);
  std::complex<double> term = w * std::exp(z * t0);
  for (int k = 0; k <= order; ++k) {
    if (k > 0) term *= z / static_cast<double>(k);
    c[static_cast<std::size_t>(k)] = term.real();
  }
  return Jet(std::move(c));
}

inline Jet random_jet(std::mt19937_64& rng, int order) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(order) + 1);
  for (double& x : c) x = coef(rng);
  return Jet(std::move(c));
}

/// Cauchy product against the full polynomial product, Leibniz rule, and
/// the product e^{at} cos(bt) against its closed-form jet.
inline std::vector<CheckResult> jet_identities(unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ord(1, 8);
  double cauchy = 0.0, leibniz = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Jet p = random_jet(rng, ord(rng));
    const Jet q = random_jet(rng, ord(rng));
    std::vector<double> full(static_cast<std::size_t>(p.order() + q.order()) + 1, 0.0);
    for (int i = 0; i <= p.order(); ++i)
      for (int j = 0; j <= q.order(); ++j) full[static_cast<std::size_t>(i + j)] += p.coeff(i) * q.coeff(j);
    const Jet pq = p * q;
    double scale = 0.0;
    for (double x : full) scale = std::max(scale, std::abs(x));
    for (int k = 0; k <= pq.order(); ++k) cauchy = std::max(cauchy, std::abs(pq.coeff(k) - full[k]) / scale);

    const Jet lhs = pq.derivative();
    const Jet rhs = p.derivative() * q.truncated(q.order() - 1) + p.truncated(p.order() - 1) * q.derivative();
    for (int k = 0; k <= std::min(lhs.order(), rhs.order()); ++k)
      leibniz = std::max(leibniz, std::abs(lhs.coeff(k) - rhs.coeff(k)) / std::max(scale, 1e-300));
  }
  const double a = -0.7, b = 2.3, t0 = 0.5;
  const Jet prod = exponential_jet(1.0, a, t0, 10) * exponential_jet(1.0, {0.0, b}, t0, 10);
  const Jet closed = exponential_jet(1.0, {a, b}, t0, 10);
  double product = 0.0;
  for (int k = 0; k <= 10; ++k) product = std::max(product, rel_err(prod.coeff(k), closed.coeff(k)));
  return {{"jet Cauchy product vs exact polynomial product", cauchy <= 1e-12, cauchy, 1e-12},
          {"jet Leibniz rule", leibniz <= 1e-12, leibniz, 1e-12},
          {"jet e^{at} cos(bt) product vs closed form", product <= 1e-10, product, 1e-10}};
}

/// a_0 = 0, beta a_1 + eps s_r'' + s_r' = 0 and alpha a_n - a_{n-2}' + s_r' a_{n-1} = 0.
inline std::vector<CheckResult> planner_identities(const Planner& planner, const std::vector<double>& times) {
  const auto& phys = planner.phys();
  const auto& ref = planner.reference();
  double a0 = 0.0, a1 = 0.0, rec = 0.0, interface = 0.0, flux = 0.0;
  for (double t : times) {
    const SeriesPlan plan = planner.plan_at(t);
    for (double c : plan.a[0].coeffs()) a0 = std::max(a0, std::abs(c));
    const double terms[] = {phys.beta * plan.coefficient(1), phys.epsilon * ref.derivative(t, 2), ref.derivative(t, 1)};
    const double scale1 = std::max({std::abs(terms[0]), std::abs(terms[1]), std::abs(terms[2]), 1e-300});
    a1 = std::max(a1, std::abs(terms[0] + terms[1] + terms[2]) / scale1);
    for (int n = 2; n <= plan.N; ++n) {
      const double x = phys.alpha * plan.coefficient(n);
      const double y = plan.a[static_cast<std::size_t>(n - 2)].derivative_value(1);
      const double z = plan.sdot_r * plan.coefficient(n - 1);
      const double scale = std::max({std::abs(x), std::abs(y), std::abs(z)});
      if (scale > 0.0) rec = std::max(rec, std::abs(x - y + z) / scale);
    }
    interface = std::max(interface, std::abs(reference_temperature(plan, plan.s_r).value - phys.T_m));
    const double grad_flux = -phys.k * reference_gradient(plan, 0.0).value;
    flux = std::max(flux, std::abs(feedforward_flux(plan) - grad_flux) / std::max(std::abs(grad_flux), 1e-300));
  }
  return {{"a_0 identically zero", a0 == 0.0, a0, 0.0},
          {"beta a_1 + eps s_r'' + s_r' = 0 (relative)", a1 <= 1e-12, a1, 1e-12},
          {"recursion residual alpha a_n - a_{n-2}' + s_r' a_{n-1} (relative)", rec <= 1e-10, rec, 1e-10},
          {"T^r(s_r, t) = T_m", interface == 0.0, interface, 0.0},
          {"q_ff = -k T^r_x(0, t) (relative)", flux <= 1e-10, flux, 1e-10}};
}

/// Trapezoid quadrature of T^r - T_m plus the interface terms, for comparison with the closed form.
inline double reference_energy_by_quadrature(const SeriesPlan& plan, std::size_t points) {
  const double h = plan.s_r / static_cast<double>(points - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
    sum += w * (reference_temperature(plan, static_cast<double>(i) * h).value - plan.phys.T_m);
  }
  return sum * h + plan.phys.latent_ratio() * (plan.phys.epsilon * plan.sdot_r + plan.s_r);
}

/// Closed-form E_r against quadrature, and dE_r/dt against (alpha/k) q_ff by central differences.
inline std::vector<CheckResult> reference_energy_checks(const Planner& planner, const std::vector<double>& times) {
  double quad = 0.0, rate = 0.0;
  const double h = 1.0;
  for (double t : times) {
    const SeriesPlan plan = planner.plan_at(t);
    quad = std::max(quad, rel_err(reference_energy(plan), reference_energy_by_quadrature(plan, 10000)));
    if (t >= h) {
      const double fd = (reference_energy(planner.plan_at(t + h)) - reference_energy(planner.plan_at(t - h))) / (2 * h);
      rate = std::max(rate, rel_err(fd, planner.phys().flux_to_energy_rate() * feedforward_flux(plan)));
    }
  }
  return {{"E_r closed form vs trapezoid quadrature (relative)", quad <= 1e-6, quad, 1e-6},
          {"dE_r/dt vs (alpha/k) q_ff (relative, h = 1 s)", rate <= 1e-3, rate, 1e-3}};
}

/// Relative defect |E(T) - E(0) - (alpha/k) q T| / |E(T) - E(0)| of an open-loop run at constant flux.
inline double conservation_defect(const PhysicalParams& phys, SolverConfig solver, double s0, double v0,
                                  const std::function<double(double)>& T0, double flux, double duration) {
  SimState state = initialize(phys, solver, s0, v0, T0);
  const double E0 = energy(state, phys);
  SimState last = state;
  run(phys, solver, state, [&](const SimState&) { return flux; }, duration, 1 << 30,
      [&](const SimState& s, double) { last = s; });
  const double dE = energy(last, phys) - E0;
  return std::abs(dE - phys.flux_to_energy_rate() * flux * duration) / std::abs(dE);
}

}  // namespace verify
}  // namespace stefan_track
