#pragma once

#include <string>

#include "stefan_track/errors.hpp"

namespace stefan_track {

/// Bulk material data from which diffusivity and Stefan coefficient follow.
struct Material {
  double conductivity;   // W/(m K)
  double density;        // kg/m^3
  double heat_capacity;  // J/(kg K)
  double latent_heat;    // J/kg

  static Material zinc() { return {116.0, 6570.0, 389.57, 111961.0}; }
};

struct PhysicalParams {
  double alpha;    // m^2/s
  double k;        // W/(m K)
  double beta;     // m^2/(s K)
  double epsilon;  // s
  double T_m;      // deg C
  double L;        // m

  static PhysicalParams from_material(const Material& mat, double epsilon, double T_m, double L) {
    PhysicalParams p{mat.conductivity / (mat.density * mat.heat_capacity), mat.conductivity,
                     mat.conductivity / (mat.density * mat.latent_heat), epsilon, T_m, L};
    p.validate();
    return p;
  }

  /// Zinc with epsilon = 10 s, T_m = 0 and a 0.2 m slab.
  static PhysicalParams zinc() { return from_material(Material::zinc(), 10.0, 0.0, 0.2); }

  /// Coefficient of the interface terms in the energy functional (kelvin).
  ///
  /// With E = int_0^s (T - T_m) dx + (alpha/beta)(eps sdot + s), integrating the heat
  /// equation by parts and using the interface law gives dE/dt = -alpha T_x(0) =
  /// (alpha/k) q_c. Multiplying E by k/alpha recovers the energy in J/m^2.
  double latent_ratio() const { return alpha / beta; }

  /// Factor turning a heat flux (W/m^2) into the rate of the energy functional.
  double flux_to_energy_rate() const { return alpha / k; }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw ParameterError(std::string("PhysicalParams: ") + what);
    };
    require(alpha > 0.0, "alpha must be positive");
    require(k > 0.0, "k must be positive");
    require(beta > 0.0, "beta must be positive");
    require(epsilon > 0.0, "epsilon must be positive");
    require(L > 0.0, "L must be positive");
  }
};

}  // namespace stefan_track
