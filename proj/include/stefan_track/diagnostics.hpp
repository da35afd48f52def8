#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan_track/controller.hpp"
#include "stefan_track/csv.hpp"
#include "stefan_track/planner.hpp"
#include "stefan_track/solver.hpp"

namespace stefan_track {

struct TrajectoryRecord {
  double t = 0.0;
  double s = 0.0;
  double sdot = 0.0;
  double q_c = 0.0;
  double E = 0.0;
  double E_r = 0.0;
  double Phi = 0.0;  // NaN when the shifted reference left the series radius
  double T_min = 0.0;
  double T_at0 = 0.0;
  SafetyFlags flags;
};

/// Phi = int_0^s (T(x) - T^r(x - (s - s_r)))^2 dx + (s - s_r)^2 + (sdot - sdot_r)^2,
/// by the trapezoid rule on the solver grid. NaN if the shifted series diverges.
inline double tracking_functional(const SimState& state, const SeriesPlan& plan) {
  const double shift = state.s - plan.s_r;
  const std::size_t last = state.nodes() - 1;
  double sum = 0.0;
  try {
    for (std::size_t i = 0; i <= last; ++i) {
      const double e = state.temp[i] - reference_temperature(plan, state.x(i) - shift).value;
      sum += (i == 0 || i == last) ? 0.5 * e * e : e * e;
    }
  } catch (const DivergenceError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double dv = state.sdot - plan.sdot_r;
  return state.s * state.dy() * sum + shift * shift + dv * dv;
}

/// max_k |(E - E_r)(t_k) - e0 exp(-c (t_k - t_0))| / max(|e0|, floor), e0 taken from the first record.
inline double energy_decay_residual(const std::vector<TrajectoryRecord>& records, double c, double floor = 1e-300) {
  if (records.empty()) throw std::invalid_argument("energy_decay_residual: no records");
  const double t0 = records.front().t;
  const double e0 = records.front().E - records.front().E_r;
  const double scale = std::max(std::abs(e0), floor);
  double worst = 0.0;
  for (const auto& r : records) {
    worst = std::max(worst, std::abs((r.E - r.E_r) - e0 * std::exp(-c * (r.t - t0))) / scale);
  }
  return worst;
}

struct DecayFit {
  double rate = 0.0;  // 1/s, positive for decay
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (t, log v); rate is the negated slope.
inline DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  if (times.size() < 10) throw std::invalid_argument("fit_decay_rate: need at least 10 points");
  const auto n = static_cast<double>(times.size());
  double mt = 0.0, ml = 0.0;
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw std::invalid_argument("fit_decay_rate: values must be positive");
    logs[i] = std::log(values[i]);
    mt += times[i];
    ml += logs[i];
  }
  mt /= n;
  ml /= n;
  double stt = 0.0, stl = 0.0, sll = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dt = times[i] - mt, dl = logs[i] - ml;
    stt += dt * dt;
    stl += dt * dl;
    sll += dl * dl;
  }
  if (stt == 0.0) throw std::invalid_argument("fit_decay_rate: times are all equal");
  const double slope = stl / stt;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double r = logs[i] - (ml + slope * (times[i] - mt));
    ss_res += r * r;
  }
  DecayFit fit;
  fit.rate = -slope;
  fit.r_squared = sll > 0.0 ? 1.0 - ss_res / sll : 1.0;
  fit.points = times.size();
  return fit;
}

inline constexpr char kTrajectoryHeader[] = "t_s,s_m,sdot_mps,qc_Wpm2,E,E_r,Phi,T_min_C,T_at0_C,safe_flux,safe_temp";
inline constexpr char kPlanHeader[] = "t_s,s_r_m,sdot_r_mps,q_ff_Wpm2,E_r";
inline constexpr char kFieldHeader[] = "t_s,x_m,T_C,xr_m,Tr_C";

/// Provenance lines are written verbatim, each prefixed with "# ".
inline std::string format_records(const std::vector<TrajectoryRecord>& records,
                                  const std::vector<std::string>& provenance = {}) {
  std::ostringstream out;
  for (const auto& line : provenance) out << "# " << line << '\n';
  out << kTrajectoryHeader << '\n';
  for (const auto& r : records) {
    using csv::number;
    out << number(r.t) << ',' << number(r.s) << ',' << number(r.sdot) << ',' << number(r.q_c) << ','
        << number(r.E) << ',' << number(r.E_r) << ',' << number(r.Phi) << ',' << number(r.T_min) << ','
        << number(r.T_at0) << ',' << (r.flags.flux_nonneg ? 1 : 0) << ',' << (r.flags.temp_valid ? 1 : 0) << '\n';
  }
  return out.str();
}

inline void write_records(const std::vector<TrajectoryRecord>& records, const std::filesystem::path& path,
                          const std::vector<std::string>& provenance = {}) {
  csv::write_atomic(path, format_records(records, provenance));
}

/// Inverse of format_records; comment lines are skipped. Flags not present in the
/// CSV (sdot_nonneg, interface_band) come back as true.
inline std::vector<TrajectoryRecord> parse_records(std::istream& in) {
  std::vector<TrajectoryRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kTrajectoryHeader) throw std::invalid_argument("parse_records: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = csv::split(line);
    if (f.size() != 11) throw std::invalid_argument("parse_records: expected 11 fields in '" + line + "'");
    TrajectoryRecord r;
    r.t = csv::parse_number(f[0]);
    r.s = csv::parse_number(f[1]);
    r.sdot = csv::parse_number(f[2]);
    r.q_c = csv::parse_number(f[3]);
    r.E = csv::parse_number(f[4]);
    r.E_r = csv::parse_number(f[5]);
    r.Phi = csv::parse_number(f[6]);
    r.T_min = csv::parse_number(f[7]);
    r.T_at0 = csv::parse_number(f[8]);
    r.flags.flux_nonneg = f[9] == "1";
    r.flags.temp_valid = f[10] == "1";
    records.push_back(r);
  }
  if (!header_seen) throw std::invalid_argument("parse_records: missing header");
  return records;
}

inline std::vector<TrajectoryRecord> parse_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_records(in);
}

inline void write_plan(const std::vector<PlanRow>& rows, const std::filesystem::path& path,
                       const std::vector<std::string>& provenance = {}) {
  std::ostringstream out;
  for (const auto& line : provenance) out << "# " << line << '\n';
  out << kPlanHeader << '\n';
  for (const auto& r : rows) {
    using csv::number;
    out << number(r.t) << ',' << number(r.s_r) << ',' << number(r.sdot_r) << ',' << number(r.q_ff) << ','
        << number(r.E_r) << '\n';
  }
  csv::write_atomic(path, out.str());
}

/// One sample of the temperature field dump: plant T at x and reference T^r at xr,
/// both at the same relative position in their own domains.
struct FieldRow {
  double t, x, T, xr, Tr;
};

inline void write_field(const std::vector<FieldRow>& rows, const std::filesystem::path& path,
                        const std::vector<std::string>& provenance = {}) {
  std::ostringstream out;
  for (const auto& line : provenance) out << "# " << line << '\n';
  out << kFieldHeader << '\n';
  for (const auto& r : rows) {
    using csv::number;
    out << number(r.t) << ',' << number(r.x) << ',' << number(r.T) << ',' << number(r.xr) << ',' << number(r.Tr)
        << '\n';
  }
  csv::write_atomic(path, out.str());
}

}  // namespace stefan_track
