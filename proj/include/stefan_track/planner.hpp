#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan_track/errors.hpp"
#include "stefan_track/jet.hpp"
#include "stefan_track/physical.hpp"
#include "stefan_track/reference.hpp"

namespace stefan_track {

/// Floating-point slack on T^r >= T_m (kelvin).
inline constexpr double kTemperatureTolerance = 1e-9;

/// Positive root of 4 alpha F^2 = R M F + R, the growth factor of the coefficient bound.
inline double series_F(double M, double R, double alpha) {
  if (!(M >= 0.0 && R > 0.0 && alpha > 0.0)) {
    throw ParameterError("series_F: need M >= 0, R > 0, alpha > 0");
  }
  return (R * M + std::sqrt(R * R * M * M + 16.0 * alpha * R)) / (4.0 * alpha);
}

struct ConvergenceRecord {
  double F = 0.0;
  double R = 0.0;
  double ratio = 0.0;  // F * sup_t s_r(t) / R
  bool convergent = false;
};

/// Truncated series T^r(x, t) = T_m + sum_n a_n(t)/n! (x - s_r(t))^n at one time.
///
/// a[n] is the Taylor jet of a_n about t, of order jet_order(N, n).
struct SeriesPlan {
  int N = 0;
  double t = 0.0;
  double s_r = 0.0;
  double sdot_r = 0.0;
  PhysicalParams phys{};
  std::vector<Jet> a;
  ConvergenceRecord cert;

  double coefficient(int n) const { return a.at(static_cast<std::size_t>(n)).value(); }
};

/// Each recursion step consumes one time derivative per two indices.
inline int jet_order(int N, int n) { return (N - n) / 2 + 1; }

/// a_0 = 0, a_1 = -(eps s_r'' + s_r')/beta, a_n = (a_{n-2}' - s_r' a_{n-1}) / alpha.
inline std::vector<Jet> series_coefficients(const PhysicalParams& phys, const Reference& ref, double t,
                                            int N) {
  if (N < 1) throw std::invalid_argument("series_coefficients: N must be at least 1");
  const Jet velocity = ref.velocity_jet(t, jet_order(N, 1) + 1);
  std::vector<Jet> a;
  a.reserve(static_cast<std::size_t>(N) + 1);
  a.push_back(Jet::zero(jet_order(N, 0)));
  a.push_back((-(phys.epsilon * velocity.derivative() + velocity) / phys.beta).truncated(jet_order(N, 1)));
  for (int n = 2; n <= N; ++n) {
    const Jet next = (a[n - 2].derivative() - velocity * a[n - 1]) / phys.alpha;
    if (next.order() < jet_order(N, n)) {
      throw std::logic_error("series_coefficients: jet order exhausted at n = " + std::to_string(n));
    }
    a.push_back(next.truncated(jet_order(N, n)));
  }
  return a;
}

class Planner {
 public:
  Planner(PhysicalParams phys, Reference ref, GevreyCertificate cert, int N = 30)
      : phys_(phys), ref_(std::move(ref)), cert_(cert), N_(N) {
    phys_.validate();
    if (N_ < 1) throw ParameterError("Planner: truncation order N must be at least 1");
    double sup = std::max(std::abs(ref_.initial_position()), std::abs(ref_.limit()));
    for (double t : gevrey_sample_times(ref_)) sup = std::max(sup, std::abs(ref_.position(t)));
    sup_position_ = sup;
    conv_.R = cert_.R;
    conv_.F = series_F(cert_.M, cert_.R, phys_.alpha);
    conv_.ratio = conv_.F * sup / cert_.R;
    conv_.convergent = conv_.ratio < 1.0;
  }

  /// Gevrey certificate estimated on the default sample grid.
  static Planner with_estimated_certificate(PhysicalParams phys, Reference ref, int N = 30, double d = 2.0,
                                            int m_max = 10) {
    auto cert = estimate_gevrey(ref, d, m_max, gevrey_sample_times(ref));
    return Planner(phys, std::move(ref), cert, N);
  }

  SeriesPlan plan_at(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("Planner::plan_at: t must be non-negative");
    SeriesPlan plan;
    plan.N = N_;
    plan.t = t;
    plan.s_r = ref_.position(t);
    plan.sdot_r = ref_.velocity(t);
    plan.phys = phys_;
    plan.a = series_coefficients(phys_, ref_, t, N_);
    plan.cert = conv_;
    return plan;
  }

  const PhysicalParams& phys() const { return phys_; }
  const Reference& reference() const { return ref_; }
  const GevreyCertificate& certificate() const { return cert_; }
  const ConvergenceRecord& convergence() const { return conv_; }
  double sup_position() const { return sup_position_; }
  int truncation() const { return N_; }

 private:
  PhysicalParams phys_;
  Reference ref_;
  GevreyCertificate cert_;
  int N_;
  ConvergenceRecord conv_;
  double sup_position_ = 0.0;
};

/// Value of a truncated series together with the magnitude of its last retained term.
struct SeriesValue {
  double value = 0.0;
  double tail = 0.0;
};

namespace detail {

inline void check_radius(const SeriesPlan& plan, double distance) {
  const double r = std::abs(distance) * plan.cert.F / plan.cert.R;
  if (!(r < 1.0)) {
    throw DivergenceError("series evaluated outside its radius of convergence (|x - s_r| F / R = " +
                          std::to_string(r) + ")");
  }
}

// The last retained term must be negligible against the terms already summed.
inline void check_tail(double last, double abs_sum) {
  constexpr double kTailRatio = 1e-9;
  if (std::abs(last) > kTailRatio * abs_sum) {
    throw DivergenceError("series tail term " + std::to_string(last) + " is not negligible");
  }
}

// sum_{n=first}^{N} a_n / (n - shift)! * h^(n - shift)
inline SeriesValue sum_series(const SeriesPlan& plan, double h, int first, int shift) {
  double power = 1.0;  // h^j / j!
  double sum = 0.0;
  double abs_sum = 0.0;
  double last = 0.0;
  for (int j = 0; j + shift <= plan.N; ++j) {
    if (j > 0) power *= h / j;
    const int n = j + shift;
    if (n < first) continue;
    last = plan.coefficient(n) * power;
    sum += last;
    abs_sum += std::abs(last);
  }
  check_tail(last, abs_sum);
  return {sum, std::abs(last)};
}

}  // namespace detail

inline SeriesValue reference_temperature(const SeriesPlan& plan, double x) {
  const double h = x - plan.s_r;
  detail::check_radius(plan, h);
  SeriesValue v = detail::sum_series(plan, h, 1, 0);
  v.value += plan.phys.T_m;
  return v;
}

inline SeriesValue reference_gradient(const SeriesPlan& plan, double x) {
  const double h = x - plan.s_r;
  detail::check_radius(plan, h);
  return detail::sum_series(plan, h, 1, 1);
}

/// q_c^r = -k sum_{n=0}^{N-1} a_{n+1}/n! (-s_r)^n.
inline double feedforward_flux(const SeriesPlan& plan) {
  detail::check_radius(plan, plan.s_r);
  return -plan.phys.k * detail::sum_series(plan, -plan.s_r, 1, 1).value;
}

/// E_r = int_0^{s_r} (T^r - T_m) dx + (alpha/beta)(eps sdot_r + s_r), integral in closed form.
inline double reference_energy(const SeriesPlan& plan) {
  detail::check_radius(plan, plan.s_r);
  const double s = plan.s_r;
  double power = s;  // s^{n+1}/(n+1)! with alternating sign (-1)^n
  double sum = 0.0;
  double abs_sum = 0.0;
  double last = 0.0;
  for (int n = 1; n <= plan.N; ++n) {
    power *= -s / (n + 1);
    last = plan.coefficient(n) * power;
    sum += last;
    abs_sum += std::abs(last);
  }
  detail::check_tail(last, abs_sum);
  return sum + plan.phys.latent_ratio() * (plan.phys.epsilon * plan.sdot_r + s);
}

struct CoefficientBoundViolation {
  int n;
  int m;
  double t;
  double magnitude;
  double bound;
};

struct CoefficientBoundReport {
  std::size_t checks = 0;
  double max_ratio = 0.0;  // largest |a_n^{(m)}| / bound seen
  std::vector<CoefficientBoundViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// log of M F^{n-1} G H_{n,m} with G = (eps + R)/beta and
/// H_{n,m} = ((n+m)!)^d / (R^{n+m} (n!)^{d-1}).
inline double log_coefficient_bound(const GevreyCertificate& cert, double F, const PhysicalParams& phys, int n,
                                    int m) {
  const double G = (phys.epsilon + cert.R) / phys.beta;
  return std::log(cert.M) + (n - 1) * std::log(F) + std::log(G) + cert.d * std::lgamma(n + m + 1.0) -
         (n + m) * std::log(cert.R) - (cert.d - 1.0) * std::lgamma(n + 1.0);
}

inline CoefficientBoundReport verify_coefficient_bound(const Planner& planner, const GevreyCertificate& cert,
                                                       int n_max, int m_max, const std::vector<double>& times) {
  if (n_max > planner.truncation() || jet_order(planner.truncation(), n_max) < m_max) {
    throw std::invalid_argument("verify_coefficient_bound: plan jets too short for (n_max, m_max)");
  }
  const double F = series_F(cert.M, cert.R, planner.phys().alpha);
  CoefficientBoundReport report;
  for (double t : times) {
    const SeriesPlan plan = planner.plan_at(t);
    for (int n = 0; n <= n_max; ++n) {
      for (int m = 0; m <= m_max; ++m) {
        const double lhs = std::abs(plan.a[static_cast<std::size_t>(n)].derivative_value(m));
        ++report.checks;
        if (n == 0) {
          if (lhs != 0.0) report.violations.push_back({n, m, t, lhs, 0.0});
          continue;
        }
        const double rhs = std::exp(log_coefficient_bound(cert, F, planner.phys(), n, m));
        report.max_ratio = std::max(report.max_ratio, lhs / rhs);
        if (lhs > rhs) report.violations.push_back({n, m, t, lhs, rhs});
      }
    }
  }
  return report;
}

struct EnvelopeSample {
  double t;
  double temperature_deviation;  // |T^r(0,t) - T_m|
  double temperature_bound;      // M G R / (F (R - F s_r))
  double gradient;               // |T^r_x(0,t)|
  double gradient_bound;         // M G R / (R - F s_r)^2
};

struct ConvergenceReport {
  double F = 0.0;
  double R = 0.0;
  double ratio = 0.0;
  bool ratio_ok = false;
  std::vector<EnvelopeSample> envelope;
  std::size_t envelope_violations = 0;

  bool passed() const { return ratio_ok && envelope_violations == 0; }
};

/// Radius-of-convergence ratio plus a spot check of the envelopes at x = 0.
inline ConvergenceReport check_convergence(const Planner& planner, const std::vector<double>& times) {
  const auto& cert = planner.certificate();
  const auto& conv = planner.convergence();
  ConvergenceReport r;
  r.F = conv.F;
  r.R = conv.R;
  r.ratio = conv.ratio;
  r.ratio_ok = conv.ratio < 1.0;
  if (!r.ratio_ok) return r;
  const double G = (planner.phys().epsilon + cert.R) / planner.phys().beta;
  const double MGR = cert.M * G * cert.R;
  for (double t : times) {
    const SeriesPlan plan = planner.plan_at(t);
    const double gap = cert.R - conv.F * plan.s_r;
    EnvelopeSample e{t,
                     std::abs(reference_temperature(plan, 0.0).value - plan.phys.T_m),
                     MGR / (conv.F * gap),
                     std::abs(reference_gradient(plan, 0.0).value),
                     MGR / (gap * gap)};
    if (e.temperature_deviation > e.temperature_bound || e.gradient > e.gradient_bound) ++r.envelope_violations;
    r.envelope.push_back(e);
  }
  return r;
}

struct Assumption5Report {
  double min_margin = std::numeric_limits<double>::infinity();  // min (T^r - T_m)
  double t_at = 0.0;
  double x_at = 0.0;
  double tolerance = kTemperatureTolerance;

  bool passed() const { return min_margin >= -tolerance; }
};

/// Minimum of T^r - T_m over x in [0, s_r(t)] (x_count points) at each time.
inline Assumption5Report check_assumption5(const Planner& planner, const std::vector<double>& times,
                                           std::size_t x_count, double tolerance = kTemperatureTolerance) {
  Assumption5Report r;
  r.tolerance = tolerance;
  for (double t : times) {
    const SeriesPlan plan = planner.plan_at(t);
    for (double x : uniform_times(plan.s_r, std::max<std::size_t>(x_count, 2))) {
      const double margin = reference_temperature(plan, x).value - plan.phys.T_m;
      if (margin < r.min_margin) {
        r.min_margin = margin;
        r.t_at = t;
        r.x_at = x;
      }
    }
  }
  return r;
}

struct PlanRow {
  double t;
  double s_r;
  double sdot_r;
  double q_ff;
  double E_r;
};

inline std::vector<PlanRow> plan_rows(const Planner& planner, const std::vector<double>& times) {
  std::vector<PlanRow> rows;
  rows.reserve(times.size());
  for (double t : times) {
    const SeriesPlan plan = planner.plan_at(t);
    rows.push_back({t, plan.s_r, plan.sdot_r, feedforward_flux(plan), reference_energy(plan)});
  }
  return rows;
}

}  // namespace stefan_track
