#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "stefan_track/errors.hpp"
#include "stefan_track/physical.hpp"
#include "stefan_track/tridiagonal.hpp"

namespace stefan_track {

struct SolverConfig {
  int n_grid = 200;      // interior nodes on y in [0, 1]
  double dt = 0.05;      // s
  double theta = 0.5;    // 1 = backward Euler, 0.5 = Crank-Nicolson
  double s_floor = 0.0;  // m; non-positive means s0 / 2 at initialization
  int startup_steps = 4;   // leading steps taken with theta = 1 (damps the initial corner)

  void validate() const {
    if (n_grid < 16) throw ParameterError("SolverConfig: n_grid must be at least 16");
    if (!(dt > 0.0)) throw ParameterError("SolverConfig: dt must be positive");
    if (!(theta >= 0.5 && theta <= 1.0)) throw ParameterError("SolverConfig: theta must lie in [0.5, 1]");
    if (startup_steps < 0) throw ParameterError("SolverConfig: startup_steps must be non-negative");
  }
};

/// Plant state on the front-fixed grid y_i = i / (n_grid + 1), x_i = y_i s.
struct SimState {
  double t = 0.0;
  double s = 0.0;
  double sdot = 0.0;
  std::vector<double> temp;  // n_grid + 2 nodes; temp.back() == T_m

  std::size_t nodes() const { return temp.size(); }
  double dy() const { return 1.0 / static_cast<double>(temp.size() - 1); }
  double x(std::size_t i) const { return s * static_cast<double>(i) * dy(); }
  double min_temperature() const { return *std::min_element(temp.begin(), temp.end()); }
};

/// Samples T0 on the Landau grid after checking the initial-data assumptions
/// (0 < s0 < L, T0(s0) = T_m, T0 >= T_m, v0 >= 0).
inline SimState initialize(const PhysicalParams& phys, SolverConfig& config, double s0, double v0,
                           const std::function<double(double)>& T0, double tolerance = 1e-9) {
  phys.validate();
  config.validate();
  if (!(s0 > 0.0 && s0 < phys.L)) throw ParameterError("initial data: need 0 < s0 < L (Assumption 1)");
  if (!(v0 >= 0.0)) throw ParameterError("initial data: need v0 >= 0 (Assumption 2)");
  if (std::abs(T0(s0) - phys.T_m) > tolerance) {
    throw ParameterError("initial data: T0(s0) must equal T_m (Assumption 1)");
  }
  if (config.s_floor <= 0.0) config.s_floor = 0.5 * s0;

  SimState st;
  st.s = s0;
  st.sdot = v0;
  const std::size_t nodes = static_cast<std::size_t>(config.n_grid) + 2;
  st.temp.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = s0 * static_cast<double>(i) / static_cast<double>(nodes - 1);
    st.temp[i] = T0(x);
    if (!(st.temp[i] >= phys.T_m - tolerance)) {
      throw ParameterError("initial data: T0 below T_m at x = " + std::to_string(x) + " (Assumption 1)");
    }
  }
  st.temp.back() = phys.T_m;
  return st;
}

/// Second-order one-sided T_x at the interface.
inline double interface_gradient(const SimState& st) {
  const std::size_t last = st.nodes() - 1;
  return (3.0 * st.temp[last] - 4.0 * st.temp[last - 1] + st.temp[last - 2]) / (2.0 * st.dy() * st.s);
}

/// One IMEX step of u_t = (alpha/s^2) u_yy + (y sdot/s) u_y with -k T_x(0) = q_c,
/// T(s) = T_m and eps s'' = -s' - beta T_x(s).
inline SimState step(const SimState& st, double q_c, const PhysicalParams& phys, const SolverConfig& config,
                     double theta) {
  const std::size_t nodes = st.nodes();
  const std::size_t n = nodes - 1;  // unknowns 0..n-1, node n is the interface
  const double dy = st.dy();
  const double dt = config.dt;
  const double th = theta;
  const double D = phys.alpha * dt / (st.s * st.s * dy * dy);
  const double adv = dt * st.sdot / (st.s * 2.0 * dy);
  const auto& u = st.temp;

  TridiagonalSystem sys(n);
  // x = 0: ghost node u_{-1} = u_1 + 2 dy s q_c / k.
  sys.diag[0] = 1.0 + 2.0 * th * D;
  sys.upper[0] = -2.0 * th * D;
  sys.rhs[0] = u[0] + (1.0 - th) * D * (2.0 * u[1] - 2.0 * u[0]) + D * 2.0 * dy * st.s * q_c / phys.k;
  for (std::size_t i = 1; i < n; ++i) {
    const double y = static_cast<double>(i) * dy;
    sys.lower[i] = -th * D;
    sys.diag[i] = 1.0 + 2.0 * th * D;
    sys.upper[i] = -th * D;
    sys.rhs[i] = u[i] + (1.0 - th) * D * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + adv * y * (u[i + 1] - u[i - 1]);
  }
  sys.rhs[n - 1] += th * D * phys.T_m;

  SimState next;
  next.temp = sys.solve();
  next.temp.push_back(phys.T_m);
  next.s = st.s;
  const double grad = interface_gradient(next);

  const double h = dt / phys.epsilon;
  next.sdot = (st.sdot + h * (-phys.beta * grad)) / (1.0 + h);
  next.s = st.s + dt * next.sdot;
  next.t = st.t + dt;
  if (!(next.s >= config.s_floor && next.s < phys.L)) {
    throw DomainViolation("interface left [s_floor, L): s = " + std::to_string(next.s) + " at t = " +
                              std::to_string(next.t),
                          next.t);
  }
  return next;
}

inline SimState step(const SimState& st, double q_c, const PhysicalParams& phys, const SolverConfig& config) {
  return step(st, q_c, phys, config, config.theta);
}

/// E = int_0^s (T - T_m) dx + (alpha/beta)(eps sdot + s), trapezoid rule on the grid.
inline double energy(const SimState& st, const PhysicalParams& phys) {
  const std::size_t last = st.nodes() - 1;
  double sum = 0.5 * ((st.temp[0] - phys.T_m) + (st.temp[last] - phys.T_m));
  for (std::size_t i = 1; i < last; ++i) sum += st.temp[i] - phys.T_m;
  return st.s * st.dy() * sum + phys.latent_ratio() * (phys.epsilon * st.sdot + st.s);
}

struct RunResult {
  enum class Status { completed, domain_violation, divergence };
  Status status = Status::completed;
  double t_end = 0.0;
  std::size_t steps = 0;
  std::string message;

  bool completed() const { return status == Status::completed; }
};

/// Advances the plant to `horizon` under `controller(state) -> q_c`, calling
/// `on_log(state, q_c)` every `log_every` steps (including the first and last).
/// A domain violation or series divergence stops the run; records logged so far remain valid.
template <class Controller, class Observer>
RunResult run(const PhysicalParams& phys, const SolverConfig& config, SimState state, Controller&& controller,
              double horizon, int log_every, Observer&& on_log) {
  const auto steps = static_cast<std::size_t>(std::llround(horizon / config.dt));
  const std::size_t every = static_cast<std::size_t>(std::max(log_every, 1));
  const double t0 = state.t;
  RunResult result;
  try {
    for (std::size_t j = 0;; ++j) {
      const double q = controller(static_cast<const SimState&>(state));
      if (j % every == 0 || j == steps) on_log(static_cast<const SimState&>(state), q);
      if (j == steps) break;
      state = step(state, q, phys, config, j < static_cast<std::size_t>(config.startup_steps) ? 1.0 : config.theta);
      state.t = t0 + static_cast<double>(j + 1) * config.dt;
      result.steps = j + 1;
    }
  } catch (const DomainViolation& e) {
    result.status = RunResult::Status::domain_violation;
    result.message = e.what();
  } catch (const DivergenceError& e) {
    result.status = RunResult::Status::divergence;
    result.message = e.what();
  }
  result.t_end = state.t;
  return result;
}

}  // namespace stefan_track
