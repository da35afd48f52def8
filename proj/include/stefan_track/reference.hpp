#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "stefan_track/errors.hpp"
#include "stefan_track/jet.hpp"

namespace stefan_track {

/// Parameters of the exp-trig reference family
///   sdot_r(t) = A (1 + cos(omega t)) exp(-delta1 t) + v_min exp(-delta2 t),
/// with A chosen so that s_r(t) -> s_bar.
struct ReferenceParams {
  double omega;   // rad/s
  double delta1;  // 1/s
  double delta2;  // 1/s
  double v_min;   // m/s
  double s_r0;    // m
  double s_bar;   // m
  double L = 0.2; // m

  static ReferenceParams baseline() { return {0.002, 4.0e-4, 4.0e-3, 7.0e-7, 0.11, 0.15, 0.2}; }
};

/// Amplitude A that makes the reference settle at s_bar.
inline double amplitude(const ReferenceParams& p) {
  const double d1 = p.delta1;
  const double num = p.s_bar - p.s_r0 - p.v_min / p.delta2;
  const double den = d1 / (d1 * d1 + p.omega * p.omega) + 1.0 / d1;
  const double A = num / den;
  if (!(A > 0.0)) {
    throw ParameterError("reference amplitude A = " + std::to_string(A) +
                         " is not positive; need s_bar - s_r0 - v_min/delta2 > 0");
  }
  return A;
}

inline void validate(const ReferenceParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ParameterError(std::string("ReferenceParams: ") + what);
  };
  require(p.omega > 0.0, "omega must be positive");
  require(p.delta1 > 0.0, "delta1 must be positive");
  require(p.delta2 > 0.0, "delta2 must be positive");
  require(p.v_min > 0.0, "v_min must be positive");
  require(p.s_r0 > 0.0, "s_r0 must be positive");
  require(p.s_r0 < p.s_bar, "s_r0 must be below s_bar");
  require(p.s_bar < p.L, "s_bar must be below L");
  amplitude(p);
}

/// One term w * exp(z t) of the reference velocity.
struct ExpTerm {
  std::complex<double> weight;
  std::complex<double> rate;
};

/// Reference interface trajectory whose velocity is a finite sum of (complex)
/// exponentials. The family is closed under differentiation, so derivatives of
/// every order are exact.
class Reference {
 public:
  static Reference exp_trig(const ReferenceParams& p) {
    validate(p);
    const double A = amplitude(p);
    const std::complex<double> osc(-p.delta1, p.omega);
    return Reference(p.s_r0, {{A, -p.delta1}, {0.5 * A, osc}, {0.5 * A, std::conj(osc)}, {p.v_min, -p.delta2}});
  }

  static Reference constant(double s0) { return Reference(s0, {}); }

  /// Every rate must have a negative real part; the velocity Re sum w e^{zt} must be real.
  static Reference from_terms(double s0, std::vector<ExpTerm> terms) {
    for (const auto& term : terms) {
      if (!(term.rate.real() < 0.0)) throw ParameterError("Reference: every rate needs Re(z) < 0");
    }
    return Reference(s0, std::move(terms));
  }

  double initial_position() const { return s0_; }

  double position(double t) const {
    double s = s0_;
    for (const auto& [w, z] : terms_) s += (w / z * (std::exp(z * t) - 1.0)).real();
    return s;
  }

  double velocity(double t) const { return derivative(t, 1); }

  /// m-th time derivative; m = 0 is the position.
  double derivative(double t, int m) const {
    if (m <= 0) return position(t);
    std::complex<double> sum = 0.0;
    for (const auto& [w, z] : terms_) {
      std::complex<double> zp = 1.0;
      for (int j = 1; j < m; ++j) zp *= z;
      sum += w * zp * std::exp(z * t);
    }
    return sum.real();
  }

  /// Taylor jet of sdot_r about t: coeff(k) = s_r^{(k+1)}(t) / k!.
  Jet velocity_jet(double t, int order) const {
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    for (const auto& [w, z] : terms_) {
      std::complex<double> term = w * std::exp(z * t);
      for (int k = 0; k <= order; ++k) {
        if (k > 0) term *= z / static_cast<double>(k);
        c[static_cast<std::size_t>(k)] += term.real();
      }
    }
    return Jet(std::move(c));
  }

  /// lim_{t -> inf} s_r(t).
  double limit() const {
    double s = s0_;
    for (const auto& [w, z] : terms_) s -= (w / z).real();
    return s;
  }

  /// Smallest decay rate |Re z| among the terms; zero for the constant reference.
  double slowest_decay() const {
    double slow = 0.0;
    for (const auto& term : terms_) {
      const double r = -term.rate.real();
      slow = (slow == 0.0) ? r : std::min(slow, r);
    }
    return slow;
  }

  bool is_constant() const { return terms_.empty(); }
  const std::vector<ExpTerm>& terms() const { return terms_; }

 private:
  Reference(double s0, std::vector<ExpTerm> terms) : s0_(s0), terms_(std::move(terms)) {}

  double s0_;
  std::vector<ExpTerm> terms_;
};

inline std::vector<double> uniform_times(double horizon, std::size_t samples) {
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = samples > 1 ? horizon * static_cast<double>(i) / static_cast<double>(samples - 1) : 0.0;
  }
  return t;
}

struct Assumption4Report {
  bool positive_start = false;
  bool nondecreasing = false;
  bool limit_below_L = false;
  double min_velocity = 0.0;
  double argmin_time = 0.0;
  double limit = 0.0;

  bool passed() const { return positive_start && nondecreasing && limit_below_L; }
};

inline Assumption4Report check_assumption4(const Reference& ref, double L, double horizon,
                                           std::size_t samples) {
  if (!(horizon > 0.0)) throw ParameterError("check_assumption4: horizon must be positive");
  Assumption4Report r;
  r.positive_start = ref.position(0.0) > 0.0;
  r.min_velocity = std::numeric_limits<double>::infinity();
  for (double t : uniform_times(horizon, std::max<std::size_t>(samples, 2))) {
    const double v = ref.velocity(t);
    if (v < r.min_velocity) {
      r.min_velocity = v;
      r.argmin_time = t;
    }
  }
  r.nondecreasing = r.min_velocity >= 0.0;
  r.limit = ref.limit();
  r.limit_below_L = r.limit < L;
  return r;
}

/// Constants of the bound |s_r^{(m+1)}(t)| <= M (m!)^d / R^m.
struct GevreyCertificate {
  double M = 0.0;  // m/s
  double R = 0.0;  // s
  double d = 2.0;
  int m_max = 0;
  bool degenerate = false;  // all sampled derivatives vanish
  bool reduced = false;     // m_max was lowered after a non-finite derivative
  std::size_t samples = 0;
  std::size_t violations = 0;

  /// Right-hand side M (m!)^d / R^m.
  double bound(int m) const {
    return std::exp(std::log(M) + d * std::lgamma(m + 1.0) - m * std::log(R));
  }

  bool valid() const { return violations == 0; }
};

/// 10^3 points by default: t = 0 followed by log-spaced times up to 5 / slowest decay.
inline std::vector<double> gevrey_sample_times(const Reference& ref, std::size_t count = 1000) {
  const double slow = ref.slowest_decay();
  const double horizon = slow > 0.0 ? 5.0 / slow : 1.0;
  std::vector<double> t{0.0};
  if (count < 2) return t;
  const double lo = std::log(horizon * 1e-4);
  const double hi = std::log(horizon);
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double f = count > 2 ? static_cast<double>(i) / static_cast<double>(count - 2) : 1.0;
    t.push_back(std::exp(lo + f * (hi - lo)));
  }
  return t;
}

/// Number of (m, t) pairs at which the certificate's bound fails.
inline std::size_t count_gevrey_violations(const Reference& ref, const GevreyCertificate& cert,
                                           const std::vector<double>& times) {
  constexpr double kSlack = 1e-10;
  std::size_t violations = 0;
  for (int m = 0; m <= cert.m_max; ++m) {
    const double rhs = cert.bound(m) * (1.0 + kSlack);
    for (double t : times) {
      if (std::abs(ref.derivative(t, m + 1)) > rhs) ++violations;
    }
  }
  return violations;
}

/// Fits M as the sampled sup of |sdot_r| and R as the largest scale compatible with
/// every sampled derivative up to m_max, then re-validates on the same samples.
inline GevreyCertificate estimate_gevrey(const Reference& ref, double d, int m_max,
                                         const std::vector<double>& times) {
  if (!(d >= 1.0 && d <= 2.0)) throw ParameterError("estimate_gevrey: d must lie in [1, 2]");
  if (m_max < 2) throw ParameterError("estimate_gevrey: m_max must be at least 2");
  constexpr double kDegenerateScale = 1e12;

  auto sup_abs = [&](int order) {
    double s = 0.0;
    for (double t : times) s = std::max(s, std::abs(ref.derivative(t, order)));
    return s;
  };

  GevreyCertificate cert;
  cert.d = d;
  cert.m_max = m_max;
  cert.samples = times.size();
  cert.M = sup_abs(1);
  if (cert.M == 0.0) {
    cert.M = DBL_EPSILON;
    cert.R = kDegenerateScale;
    cert.degenerate = true;
  } else {
    double R = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= m_max; ++m) {
      const double sup = sup_abs(m + 1);
      if (!std::isfinite(sup)) {
        cert.m_max = m - 1;
        cert.reduced = true;
        break;
      }
      if (sup == 0.0) continue;
      R = std::min(R, std::exp((std::log(cert.M) + d * std::lgamma(m + 1.0) - std::log(sup)) / m));
    }
    cert.R = std::isfinite(R) ? R : kDegenerateScale;
  }
  cert.violations = count_gevrey_violations(ref, cert, times);
  return cert;
}

}  // namespace stefan_track
