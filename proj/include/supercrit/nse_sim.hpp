#pragma once

/// @file nse_sim.hpp
/// @brief Pseudo-spectral integration of the incompressible Navier-Stokes
/// equations on the 2*pi-periodic torus. Pressure is eliminated by Leray
/// projection; time stepping is RK4 with an exact integrating factor for the
/// viscous term.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "supercrit/spectral_field.hpp"

namespace supercrit {

struct InitialCondition {
  enum class Kind { TaylorGreen, Random };
  Kind kind = Kind::TaylorGreen;
  double amplitude = 1.0;  // taylor-green
  std::uint64_t seed = 0;  // random
  double slope = -2.0;     // random: |u_hat(xi)| ~ |xi|^slope
  double energy = 1.0;     // random: ||u||_2^2
};

struct SimConfig {
  int n = 64;
  double viscosity = 0.05;
  double dt = 1e-3;
  double horizon = 1.0;
  InitialCondition init;
  long snapshot_every = 50;
  std::string out_dir = "run";

  long step_count() const;
  void validate() const;
};

/// Parses the JSON config (keys n, nu, dt, T, init.kind, init.amplitude |
/// init.seed, init.slope, init.energy, snapshot_every, out_dir).
SimConfig parse_sim_config(std::string_view json_text);
SimConfig load_sim_config(const std::string& path);
std::string sim_config_to_json(const SimConfig& config);

struct StateSnapshot {
  long step = 0;
  double time = 0.0;
  SpectralField field;
  double dissipation = 0.0;  ///< nu ||grad u||_2^2
};

/// u = A (sin x cos y cos z, -cos x sin y cos z, 0).
SpectralField init_taylor_green(const Lattice& lattice, double amplitude);

/// Seeded Gaussian coefficients with |u_hat| ~ |xi|^slope inside the dealias
/// ball, made Hermitian and divergence-free, then scaled to ||u||_2^2 = energy.
SpectralField init_random_divfree(const Lattice& lattice, std::uint64_t seed, double slope, double energy);

SpectralField make_initial_condition(const Lattice& lattice, const InitialCondition& init);

/// -P[(u . grad) u] + nu Laplacian u, i.e. du/dt.
SpectralField navier_stokes_rhs(const SpectralField& u, double viscosity);

/// 1/2 ||u||_2^2.
double kinetic_energy(const SpectralField& u);
/// nu ||grad u||_2^2.
double dissipation_rate(const SpectralField& u, double viscosity);
/// Advective RK4 limit 2*sqrt(2) / (R max_x sum_i |u_i(x)|).
double advective_stability_bound(const SpectralField& u);

class NavierStokesStepper {
 public:
  NavierStokesStepper(const Lattice& lattice, double viscosity, double dt);

  /// One integrating-factor RK4 step. Throws BlowUp on non-finite output.
  SpectralField step(const SpectralField& u) const;

  double viscosity() const { return viscosity_; }
  double dt() const { return dt_; }

 private:
  Lattice lattice_;
  double viscosity_;
  double dt_;
  std::vector<double> half_decay_;  // exp(-nu |xi|^2 dt / 2) per mode
};

SpectralField step(const SpectralField& u, double viscosity, double dt);

struct RunSummary {
  long steps = 0;
  std::vector<double> times;
  std::vector<double> energies;     ///< 1/2 ||u||^2 after each step (index 0 = initial)
  std::vector<double> dissipation;  ///< nu ||grad u||^2
  double dissipation_integral = 0.0;  ///< trapezoidal
  /// max_m |E_m - E_0 + trapezoid_{0..m}(dissipation)|
  double energy_balance_residual = 0.0;
  /// max_m (E_m + trapezoid_{0..m} - E_0), the discrete excess over the energy inequality
  double energy_inequality_excess = 0.0;
  bool energy_monotone = true;
  double max_relative_energy_increase = 0.0;
  double dt_stability_bound = 0.0;
  bool dt_exceeds_stability_bound = false;
  double max_divergence = 0.0;
  double max_hermitian_defect = 0.0;
  std::vector<std::string> snapshot_files;  ///< file names within out_dir
};

/// Integrates the configured run, invoking on_snapshot at step 0, every
/// snapshot_every steps, and at the final step. Throws BlowUp on non-finite
/// values or energy growth beyond 1e3 times the initial energy.
RunSummary run_simulation(const SimConfig& config, const std::function<void(const StateSnapshot&)>& on_snapshot);

/// run_simulation writing SHF1 snapshots and summary.json into config.out_dir.
RunSummary run_to_directory(const SimConfig& config);

std::string run_summary_to_json(const SimConfig& config, const RunSummary& summary);

}  // namespace supercrit
