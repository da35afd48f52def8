#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "stefan_track/errors.hpp"
#include "stefan_track/physical.hpp"
#include "stefan_track/planner.hpp"
#include "stefan_track/solver.hpp"

namespace stefan_track {

inline constexpr double kFluxTolerance = 1e-12;       // W/m^2
inline constexpr double kInterfaceTolerance = 1e-6;   // m
inline constexpr double kVelocityTolerance = 1e-12;   // m/s

/// Energy-shaping law q_c = q_ff - c (k/alpha) (E - E_r).
///
/// The k/alpha factor converts the energy error (K m) into a flux so that the
/// closed loop obeys d(E - E_r)/dt = -c (E - E_r).
inline double control_flux(double E, double E_r, double q_ff, double c, const PhysicalParams& phys) {
  return q_ff - c * (E - E_r) / phys.flux_to_energy_rate();
}

struct ControllerConfig {
  double c = 0.002;  // 1/s
  double e0 = 0.0;   // E(0) - E_r(0)

  void validate() const {
    if (!(c > 0.0)) throw ParameterError("ControllerConfig: gain c must be positive");
  }
};

/// Full-state feedback: evaluates the plan at the state's time and applies control_flux.
class TrackingController {
 public:
  TrackingController(const Planner& planner, ControllerConfig config) : planner_(&planner), config_(config) {
    config_.validate();
  }

  double operator()(const SimState& state) const {
    const SeriesPlan plan = planner_->plan_at(state.t);
    return control_flux(energy(state, planner_->phys()), reference_energy(plan), feedforward_flux(plan),
                        config_.c, planner_->phys());
  }

  const ControllerConfig& config() const { return config_; }

 private:
  const Planner* planner_;
  ControllerConfig config_;
};

struct Assumption6Report {
  // Flux form of the first condition: q_ff(t) - c (k/alpha) (E(0) - E_r(0)) e^{-ct} >= 0.
  // It is the first condition multiplied by c (k/alpha) e^{-ct} > 0, so the sign is
  // identical and no exponential of ct is ever formed.
  double flux_margin = std::numeric_limits<double>::infinity();  // W/m^2
  double flux_margin_time = 0.0;
  bool flux_condition = false;

  // Second condition: E_r(t) + (E(0) - E_r(0)) e^{-ct} - (alpha/beta) s_bar < 0.
  double energy_excess = -std::numeric_limits<double>::infinity();  // K m
  double energy_excess_time = 0.0;
  bool energy_condition = false;

  double e0 = 0.0;
  std::size_t samples = 0;

  bool passed() const { return flux_condition && energy_condition; }
};

/// Checks both initial-energy conditions on `samples` uniform times over [0, horizon].
inline Assumption6Report check_assumption6(double E0, const Planner& planner, double c, double horizon,
                                           std::size_t samples) {
  if (!(c > 0.0)) throw ParameterError("check_assumption6: gain c must be positive");
  const auto& phys = planner.phys();
  const double Er0 = reference_energy(planner.plan_at(0.0));
  const double s_bar = planner.reference().limit();
  Assumption6Report r;
  r.e0 = E0 - Er0;
  const auto times = uniform_times(horizon, std::max<std::size_t>(samples, 2));
  r.samples = times.size();
  for (double t : times) {
    const SeriesPlan plan = planner.plan_at(t);
    const double decay = std::exp(-c * t);
    const double flux = feedforward_flux(plan) - c * r.e0 * decay / phys.flux_to_energy_rate();
    if (flux < r.flux_margin) {
      r.flux_margin = flux;
      r.flux_margin_time = t;
    }
    const double excess = reference_energy(plan) + r.e0 * decay - phys.latent_ratio() * s_bar;
    if (excess > r.energy_excess) {
      r.energy_excess = excess;
      r.energy_excess_time = t;
    }
  }
  r.flux_condition = r.flux_margin >= 0.0;
  r.energy_condition = r.energy_excess < 0.0;
  return r;
}

struct SafetyFlags {
  bool flux_nonneg = true;
  bool temp_valid = true;
  bool sdot_nonneg = true;
  bool interface_band = true;

  bool all() const { return flux_nonneg && temp_valid && sdot_nonneg && interface_band; }
};

/// Runtime check of q_c >= 0, T >= T_m, sdot >= 0 and s0 <= s <= s_bar (< L).
/// Reports only; the caller decides whether a violation aborts.
inline SafetyFlags safety_monitor(const SimState& state, double q_c, const PhysicalParams& phys, double s0,
                                  double s_bar) {
  SafetyFlags f;
  f.flux_nonneg = q_c >= -kFluxTolerance;
  f.temp_valid = state.min_temperature() >= phys.T_m - 10.0 * kTemperatureTolerance;
  f.sdot_nonneg = state.sdot >= -kVelocityTolerance;
  f.interface_band = state.s >= s0 - kInterfaceTolerance && state.s <= s_bar + kInterfaceTolerance && state.s < phys.L;
  return f;
}

}  // namespace stefan_track
