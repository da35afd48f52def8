#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stefan_track/config.hpp"
#include "stefan_track/controller.hpp"
#include "stefan_track/diagnostics.hpp"
#include "stefan_track/planner.hpp"
#include "stefan_track/solver.hpp"
#include "stefan_track/verification.hpp"

namespace stefan_track {

inline constexpr char kVersion[] = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitPreflight = 2,
  kExitRuntimeSafety = 3,
  kExitNumerical = 4,
};

inline Planner make_planner(const ScenarioConfig& cfg) {
  return Planner::with_estimated_certificate(cfg.physical(), Reference::exp_trig(cfg.reference_params()), cfg.N,
                                             cfg.gevrey_d, cfg.gevrey_m_max);
}

/// Initial plant state for the configured profile; fills solver.s_floor if unset.
inline SimState initial_state(const ScenarioConfig& cfg, const Planner& planner, SolverConfig& solver) {
  const PhysicalParams phys = planner.phys();
  if (cfg.profile == "reference") {
    const SeriesPlan p0 = planner.plan_at(0.0);
    return initialize(phys, solver, p0.s_r, p0.sdot_r,
                      [p0](double x) { return reference_temperature(p0, std::min(x, p0.s_r)).value; });
  }
  const double s0 = cfg.s0, amp = cfg.T0_amplitude, Tm = phys.T_m;
  return initialize(phys, solver, s0, cfg.v0, [=](double x) { return Tm + amp * (1.0 - x / s0); });
}

struct SafetyCounts {
  std::size_t steps = 0;
  std::size_t flux = 0;
  std::size_t temp = 0;
  std::size_t sdot = 0;
  std::size_t band = 0;
  double min_flux = std::numeric_limits<double>::infinity();
  double min_flux_time = 0.0;
  double min_temp = std::numeric_limits<double>::infinity();
  double min_temp_time = 0.0;
  double max_s = 0.0;

  bool any() const { return flux + temp + sdot + band > 0; }
};

struct SimulationResult {
  bool closed_loop = true;
  double c = 0.0;
  double s0 = 0.0;
  std::vector<TrajectoryRecord> records;
  RunResult run;
  SafetyCounts safety;  // over every step, not just logged ones
  std::vector<FieldRow> field;
};

/// Closed loop (energy shaping) or pure feedforward q_c = q_ff(t).
inline SimulationResult simulate(const ScenarioConfig& cfg, const Planner& planner, bool closed_loop) {
  const PhysicalParams phys = planner.phys();
  SolverConfig solver = cfg.solver;
  SimState state = initial_state(cfg, planner, solver);

  SimulationResult out;
  out.closed_loop = closed_loop;
  out.c = cfg.c;
  out.s0 = state.s;
  const double s_bar = planner.reference().limit();
  const TrackingController tracking(planner, {cfg.c, 0.0});

  const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / solver.dt));
  const std::size_t logs = steps / static_cast<std::size_t>(cfg.log_every) + 1;
  const std::size_t field_stride = std::max<std::size_t>(1, (logs + 199) / 200);
  std::vector<std::size_t> snapshot_logs;
  for (double minutes : {0.05, 1.0, 10.0, 99.0}) {
    const double t = minutes * 60.0;
    if (t <= cfg.horizon) {
      snapshot_logs.push_back(static_cast<std::size_t>(std::llround(t / (solver.dt * cfg.log_every))));
    }
  }
  std::size_t log_index = 0;

  auto controller = [&](const SimState& s) {
    const double q = closed_loop ? tracking(s) : feedforward_flux(planner.plan_at(s.t));
    const SafetyFlags f = safety_monitor(s, q, phys, out.s0, s_bar);
    auto& c = out.safety;
    ++c.steps;
    c.flux += !f.flux_nonneg;
    c.temp += !f.temp_valid;
    c.sdot += !f.sdot_nonneg;
    c.band += !f.interface_band;
    if (q < c.min_flux) {
      c.min_flux = q;
      c.min_flux_time = s.t;
    }
    const double tmin = s.min_temperature();
    if (tmin < c.min_temp) {
      c.min_temp = tmin;
      c.min_temp_time = s.t;
    }
    c.max_s = std::max(c.max_s, s.s);
    return q;
  };

  auto on_log = [&](const SimState& s, double q) {
    const SeriesPlan plan = planner.plan_at(s.t);
    TrajectoryRecord r;
    r.t = s.t;
    r.s = s.s;
    r.sdot = s.sdot;
    r.q_c = q;
    r.E = energy(s, phys);
    r.E_r = reference_energy(plan);
    r.Phi = tracking_functional(s, plan);
    r.T_min = s.min_temperature();
    r.T_at0 = s.temp.front();
    r.flags = safety_monitor(s, q, phys, out.s0, s_bar);
    out.records.push_back(r);

    const bool snapshot = std::find(snapshot_logs.begin(), snapshot_logs.end(), log_index) != snapshot_logs.end();
    if (cfg.field_dump && (log_index % field_stride == 0 || snapshot)) {
      const std::size_t nodes = s.nodes();
      const std::size_t count = std::min<std::size_t>(nodes, 200);
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = (k * (nodes - 1) + (count - 1) / 2) / (count - 1);
        const double frac = static_cast<double>(i) / static_cast<double>(nodes - 1);
        double Tr = std::numeric_limits<double>::quiet_NaN();
        try {
          Tr = reference_temperature(plan, frac * plan.s_r).value;
        } catch (const DivergenceError&) {
        }
        out.field.push_back({s.t, s.x(i), s.temp[i], frac * plan.s_r, Tr});
      }
    }
    ++log_index;
  };

  out.run = run(phys, solver, std::move(state), controller, cfg.horizon, cfg.log_every, on_log);
  return out;
}

struct TrackingSummary {
  double energy_residual = 0.0;
  std::optional<DecayFit> energy_fit;
  std::optional<DecayFit> phi_fit;  // over [10, 90] min
  std::optional<double> phi_ratio_60;
  std::optional<double> gap_60;
};

inline const TrajectoryRecord* record_near(const std::vector<TrajectoryRecord>& records, double t) {
  const TrajectoryRecord* best = nullptr;
  for (const auto& r : records) {
    if (!best || std::abs(r.t - t) < std::abs(best->t - t)) best = &r;
  }
  return best;
}

inline TrackingSummary summarize(const SimulationResult& sim, const Reference& ref) {
  TrackingSummary s;
  if (sim.records.empty()) return s;
  s.energy_residual = energy_decay_residual(sim.records, sim.c);

  std::vector<double> t, e, tp, phi;
  for (const auto& r : sim.records) {
    const double err = std::abs(r.E - r.E_r);
    if (err > 0.0) {
      t.push_back(r.t);
      e.push_back(err);
    }
    if (r.t >= 600.0 && r.t <= 5400.0 && r.Phi > 0.0) {
      tp.push_back(r.t);
      phi.push_back(r.Phi);
    }
  }
  if (t.size() >= 10) s.energy_fit = fit_decay_rate(t, e);
  if (tp.size() >= 10) s.phi_fit = fit_decay_rate(tp, phi);
  if (sim.records.back().t >= 3600.0) {
    const TrajectoryRecord* r60 = record_near(sim.records, 3600.0);
    s.phi_ratio_60 = r60->Phi / sim.records.front().Phi;
    s.gap_60 = std::abs(r60->s - ref.position(r60->t));
  }
  return s;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline const char* yes_no(bool b) { return b ? "pass" : "fail"; }

}  // namespace detail

inline std::string format_summary(const SimulationResult& sim, const TrackingSummary& s) {
  using detail::fmt;
  std::ostringstream out;
  out << "mode: " << (sim.closed_loop ? "closed-loop" : "feedforward") << '\n';
  out << "status: "
      << (sim.run.completed() ? "completed"
                              : sim.run.status == RunResult::Status::domain_violation ? "domain-violation" : "divergence")
      << '\n';
  if (!sim.run.message.empty()) out << "status_message: " << sim.run.message << '\n';
  out << "t_end_s: " << fmt(sim.run.t_end) << '\n';
  out << "gain_c: " << fmt(sim.c) << '\n';
  out << "energy_decay_residual: " << fmt(s.energy_residual) << '\n';
  if (s.energy_fit) {
    out << "energy_error_decay_rate: " << fmt(s.energy_fit->rate) << '\n';
    out << "energy_error_fit_r_squared: " << fmt(s.energy_fit->r_squared) << '\n';
  }
  if (s.phi_fit) {
    out << "phi_decay_rate_10_90min: " << fmt(s.phi_fit->rate) << '\n';
    out << "phi_fit_r_squared_10_90min: " << fmt(s.phi_fit->r_squared) << '\n';
  }
  if (s.phi_ratio_60) out << "phi_ratio_60min: " << fmt(*s.phi_ratio_60) << '\n';
  if (s.gap_60) out << "interface_gap_60min_m: " << fmt(*s.gap_60) << '\n';
  const auto& c = sim.safety;
  out << "steps_monitored: " << c.steps << '\n';
  out << "violations_flux_nonneg: " << c.flux << '\n';
  out << "violations_temp_valid: " << c.temp << '\n';
  out << "violations_sdot_nonneg: " << c.sdot << '\n';
  out << "violations_interface_band: " << c.band << '\n';
  out << "min_flux_Wpm2: " << fmt(c.min_flux) << " at_t_s: " << fmt(c.min_flux_time) << '\n';
  out << "min_temperature_C: " << fmt(c.min_temp) << " at_t_s: " << fmt(c.min_temp_time) << '\n';
  out << "max_interface_m: " << fmt(c.max_s) << '\n';
  return out.str();
}

struct SafetyReport {
  GevreyCertificate certificate;
  Assumption4Report assumption4;
  Assumption5Report assumption5;
  Assumption6Report assumption6;
  ConvergenceReport convergence;

  bool passed() const {
    return certificate.valid() && assumption4.passed() && assumption5.passed() && assumption6.passed() &&
           convergence.passed();
  }
};

inline SafetyReport check_safety(const ScenarioConfig& cfg, const Planner& planner) {
  SafetyReport r;
  r.certificate = planner.certificate();
  r.assumption4 = check_assumption4(planner.reference(), cfg.L, cfg.horizon, 10000);
  r.assumption5 = check_assumption5(planner, uniform_times(cfg.horizon, 200), 200);
  SolverConfig solver = cfg.solver;
  const double E0 = energy(initial_state(cfg, planner, solver), planner.phys());
  r.assumption6 = check_assumption6(E0, planner, cfg.c, cfg.horizon, 10001);
  r.convergence = check_convergence(planner, uniform_times(cfg.horizon, 20));
  return r;
}

inline std::string format_safety_report(const SafetyReport& r) {
  using detail::fmt;
  using detail::yes_no;
  std::ostringstream out;
  const auto& g = r.certificate;
  out << "gevrey_M_mps: " << fmt(g.M) << '\n'
      << "gevrey_R_s: " << fmt(g.R) << '\n'
      << "gevrey_d: " << fmt(g.d) << '\n'
      << "gevrey_m_max: " << g.m_max << '\n'
      << "gevrey_degenerate: " << (g.degenerate ? "true" : "false") << '\n'
      << "gevrey_violations: " << g.violations << '\n'
      << "gevrey_certificate: " << yes_no(g.valid()) << '\n';
  const auto& a4 = r.assumption4;
  out << "assumption4_positive_start: " << yes_no(a4.positive_start) << '\n'
      << "assumption4_nondecreasing: " << yes_no(a4.nondecreasing) << '\n'
      << "assumption4_min_velocity_mps: " << fmt(a4.min_velocity) << " at_t_s: " << fmt(a4.argmin_time) << '\n'
      << "assumption4_limit_m: " << fmt(a4.limit) << '\n'
      << "assumption4_limit_below_L: " << yes_no(a4.limit_below_L) << '\n'
      << "assumption4: " << yes_no(a4.passed()) << '\n';
  const auto& a5 = r.assumption5;
  out << "assumption5_min_margin_K: " << fmt(a5.min_margin) << " at_t_s: " << fmt(a5.t_at) << " at_x_m: "
      << fmt(a5.x_at) << '\n'
      << "assumption5: " << yes_no(a5.passed()) << '\n';
  const auto& a6 = r.assumption6;
  out << "assumption6_energy_error_initial: " << fmt(a6.e0) << '\n'
      << "assumption6_flux_margin_Wpm2: " << fmt(a6.flux_margin) << " at_t_s: " << fmt(a6.flux_margin_time) << '\n'
      << "assumption6_flux_condition: " << yes_no(a6.flux_condition) << '\n'
      << "assumption6_energy_excess: " << fmt(a6.energy_excess) << " at_t_s: " << fmt(a6.energy_excess_time) << '\n'
      << "assumption6_energy_condition: " << yes_no(a6.energy_condition) << '\n'
      << "assumption6: " << yes_no(a6.passed()) << '\n';
  const auto& c = r.convergence;
  out << "convergence_F_spm: " << fmt(c.F) << '\n'
      << "convergence_ratio: " << fmt(c.ratio) << '\n'
      << "convergence_envelope_violations: " << c.envelope_violations << '\n'
      << "convergence: " << yes_no(c.passed()) << '\n';
  out << "overall: " << yes_no(r.passed()) << '\n';
  return out.str();
}

inline std::vector<CheckResult> verify_properties(const ScenarioConfig& cfg, const Planner& planner) {
  std::vector<CheckResult> checks = verify::jet_identities();
  const auto times = uniform_times(std::min(cfg.horizon, 6000.0), 7);
  for (auto& c : verify::planner_identities(planner, times)) checks.push_back(c);
  for (auto& c : verify::reference_energy_checks(planner, times)) checks.push_back(c);

  const auto& cert = planner.certificate();
  checks.push_back({"Gevrey certificate revalidated (violations)", cert.valid(),
                    static_cast<double>(cert.violations), 0.0});
  const int n_max = std::min(10, cfg.N);
  const int m_max = std::min(4, jet_order(cfg.N, n_max));
  const auto bound = verify_coefficient_bound(planner, cert, n_max, m_max, uniform_times(cfg.horizon, 50));
  checks.push_back({"coefficient bound |a_n^(m)| <= M F^{n-1} G H_{n,m} (violations)", bound.passed(),
                    static_cast<double>(bound.violations.size()), 0.0});
  checks.push_back({"convergence ratio F s_bar / R < 1", planner.convergence().convergent,
                    planner.convergence().ratio, 1.0});

  const double s0 = cfg.s0, amp = cfg.T0_amplitude, Tm = cfg.T_m;
  const double defect = verify::conservation_defect(planner.phys(), cfg.solver, s0, cfg.v0,
                                                    [=](double x) { return Tm + amp * (1.0 - x / s0); }, 3000.0, 600.0);
  checks.push_back({"energy conservation dE = (alpha/k) q dt over 600 s at 3000 W/m^2 (relative)",
                    defect <= 5e-3, defect, 5e-3});
  return checks;
}

inline std::string format_checks(const std::vector<CheckResult>& checks) {
  std::ostringstream out;
  std::size_t failed = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name << ": " << detail::fmt(c.value)
        << " (threshold " << detail::fmt(c.threshold) << ")\n";
    failed += !c.passed;
  }
  out << "summary: " << checks.size() - failed << "/" << checks.size() << " passed\n";
  return out.str();
}

inline std::vector<std::string> provenance(const ScenarioConfig& cfg) {
  return {"config-hash: " + config_hash(cfg) + ", version: stefan-track " + kVersion};
}

/// Runs one mode and writes its artifacts into out_dir. Returns the process exit code.
inline int run_mode(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const Planner planner = make_planner(cfg);
  const auto prov = provenance(cfg);
  log << "reference amplitude A = " << detail::fmt(amplitude(cfg.reference_params())) << " m/s\n";

  switch (cfg.mode) {
    case Mode::plan: {
      const double spacing = cfg.solver.dt * cfg.log_every;
      const auto count = static_cast<std::size_t>(std::llround(cfg.horizon / spacing)) + 1;
      try {
        write_plan(plan_rows(planner, uniform_times(spacing * static_cast<double>(count - 1), count)),
                   out_dir / "plan.csv", prov);
      } catch (const DivergenceError& e) {
        log << "plan: " << e.what() << '\n';
        return kExitNumerical;
      }
      log << "wrote " << (out_dir / "plan.csv").string() << '\n';
      return kExitOk;
    }
    case Mode::simulate_closedloop:
    case Mode::simulate_feedforward: {
      const bool closed = cfg.mode == Mode::simulate_closedloop;
      const SimulationResult sim = simulate(cfg, planner, closed);
      write_records(sim.records, out_dir / "trajectory.csv", prov);
      if (cfg.field_dump) write_field(sim.field, out_dir / "field.csv", prov);
      const std::string summary = format_summary(sim, summarize(sim, planner.reference()));
      csv::write_atomic(out_dir / "decay_fit.txt", summary);
      log << summary;
      if (!sim.run.completed()) return kExitNumerical;
      if (closed && sim.safety.any()) return kExitRuntimeSafety;
      return kExitOk;
    }
    case Mode::check_safety: {
      const SafetyReport report = check_safety(cfg, planner);
      const std::string text = format_safety_report(report);
      csv::write_atomic(out_dir / "safety_report.txt", text);
      log << text;
      return report.passed() ? kExitOk : kExitPreflight;
    }
    case Mode::verify: {
      const auto checks = verify_properties(cfg, planner);
      const std::string text = format_checks(checks);
      csv::write_atomic(out_dir / "verify_report.txt", text);
      log << text;
      const bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
      return ok ? kExitOk : kExitNumerical;
    }
  }
  return kExitUsage;
}

}  // namespace stefan_track
