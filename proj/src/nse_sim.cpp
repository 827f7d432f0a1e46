#include "supercrit/nse_sim.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "supercrit/error.hpp"
#include "supercrit/snapshot_io.hpp"

namespace supercrit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEnergyGrowthLimit = 1e3;
constexpr double kMonotoneTolerance = 1e-12;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Box-Muller on two open-interval uniforms.
std::pair<double, double> normal_pair(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

// One representative of each +-xi pair.
bool canonical(const std::array<int, 3>& xi) {
  if (xi[0] != 0) return xi[0] > 0;
  if (xi[1] != 0) return xi[1] > 0;
  return xi[2] > 0;
}

bool all_finite(const SpectralField& u) {
  for (const Complex& c : u.data())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

// -P[div(u (x) u)], projected in place over the band where it is supported.
SpectralField nonlinear_term(const SpectralField& u) {
  SpectralField n = self_convection(u);
  for (const BandMode& m : u.lattice().band_modes()) {
    const std::size_t i = m.flat;
    if (m.radius_squared == 0) {
      for (int c = 0; c < 3; ++c) n(c, i) = -n(c, i);
      continue;
    }
    const double f[3] = {double(m.xi[0]), double(m.xi[1]), double(m.xi[2])};
    const Complex dot = (f[0] * n(0, i) + f[1] * n(1, i) + f[2] * n(2, i)) / double(m.radius_squared);
    for (int c = 0; c < 3; ++c) n(c, i) = f[c] * dot - n(c, i);
  }
  return n;
}

std::string snapshot_name(long step) {
  std::ostringstream name;
  name << "snapshot_";
  name.width(6);
  name.fill('0');
  name << step << ".shf";
  return name.str();
}

}  // namespace

long SimConfig::step_count() const {
  const double ratio = horizon / dt;
  const long steps = std::lround(ratio);
  if (std::abs(static_cast<double>(steps) - ratio) > 1e-9 * std::max(1.0, ratio))
    throw InvalidInput("T must be an integer multiple of dt");
  return steps;
}

void SimConfig::validate() const {
  if (n < 8 || n % 2 != 0) throw InvalidInput("n must be even and at least 8");
  if (!(viscosity > 0.0) || !std::isfinite(viscosity)) throw InvalidInput("nu must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw InvalidInput("T must be nonnegative");
  if (snapshot_every < 1) throw InvalidInput("snapshot_every must be at least 1");
  if (init.kind == InitialCondition::Kind::TaylorGreen && !(init.amplitude > 0.0))
    throw InvalidInput("init.amplitude must be positive");
  if (init.kind == InitialCondition::Kind::Random && !(init.energy > 0.0))
    throw InvalidInput("init.energy must be positive");
  if (out_dir.empty()) throw InvalidInput("out_dir must be nonempty");
  step_count();
}

SimConfig parse_sim_config(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config: top level must be an object");

  SimConfig config;
  try {
    config.n = doc.value("n", config.n);
    config.viscosity = doc.value("nu", config.viscosity);
    config.dt = doc.value("dt", config.dt);
    config.horizon = doc.value("T", config.horizon);
    config.snapshot_every = doc.value("snapshot_every", config.snapshot_every);
    config.out_dir = doc.value("out_dir", config.out_dir);
    if (doc.contains("init")) {
      const auto& init = doc.at("init");
      if (!init.is_object()) throw ParseError("config: init must be an object");
      const std::string kind = init.value("kind", std::string("taylor-green"));
      if (kind == "taylor-green") {
        config.init.kind = InitialCondition::Kind::TaylorGreen;
      } else if (kind == "random") {
        config.init.kind = InitialCondition::Kind::Random;
      } else {
        throw InvalidInput("config: unknown init.kind '" + kind + "'");
      }
      config.init.amplitude = init.value("amplitude", config.init.amplitude);
      config.init.seed = init.value("seed", config.init.seed);
      config.init.slope = init.value("slope", config.init.slope);
      config.init.energy = init.value("energy", config.init.energy);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  config.validate();
  return config;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sim_config(buffer.str());
}

namespace {

nlohmann::ordered_json config_json(const SimConfig& c) {
  nlohmann::ordered_json init;
  if (c.init.kind == InitialCondition::Kind::TaylorGreen) {
    init["kind"] = "taylor-green";
    init["amplitude"] = c.init.amplitude;
  } else {
    init["kind"] = "random";
    init["seed"] = c.init.seed;
    init["slope"] = c.init.slope;
    init["energy"] = c.init.energy;
  }
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["nu"] = c.viscosity;
  j["dt"] = c.dt;
  j["T"] = c.horizon;
  j["init"] = init;
  j["snapshot_every"] = c.snapshot_every;
  j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace

std::string sim_config_to_json(const SimConfig& config) { return config_json(config).dump(2); }

SpectralField init_taylor_green(const Lattice& lattice, double amplitude) {
  if (!(amplitude > 0.0)) throw InvalidInput("amplitude must be positive");
  SpectralField u(lattice);
  // sin x cos y cos z = sum over s in {+-1}^3 of -i s1 / 8 e^{i s.x}; the
  // second component is the same with s2 and the opposite sign.
  const double scale = std::pow(kTwoPi, 1.5) * amplitude / 8.0;
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1})
      for (int s3 : {-1, 1}) {
        const std::size_t flat = lattice.flat_index(s1, s2, s3);
        u(0, flat) = Complex(0.0, -scale * s1);
        u(1, flat) = Complex(0.0, scale * s2);
      }
  return u;
}

SpectralField init_random_divfree(const Lattice& lattice, std::uint64_t seed, double slope, double energy) {
  if (!(energy > 0.0)) throw InvalidInput("energy must be positive");
  std::mt19937_64 rng(seed);
  SpectralField u(lattice);
  for (std::size_t flat = 0; flat < lattice.size(); ++flat) {
    const std::int64_t r2 = lattice.radius_squared(flat);
    if (r2 == 0 || !lattice.in_band(flat) || !canonical(lattice.wavevector(flat))) continue;
    const double weight = std::pow(static_cast<double>(r2), 0.5 * slope);
    const std::size_t mirror = lattice.mirror_index(flat);
    for (int c = 0; c < 3; ++c) {
      const auto [re, im] = normal_pair(rng);
      const Complex value = weight * Complex(re, im);
      u(c, flat) = value;
      u(c, mirror) = std::conj(value);
    }
  }
  u = leray_project(u);
  const double norm = norm_l2(u);
  if (norm > 0.0) u *= std::sqrt(energy) / norm;
  return u;
}

SpectralField make_initial_condition(const Lattice& lattice, const InitialCondition& init) {
  switch (init.kind) {
    case InitialCondition::Kind::TaylorGreen:
      return init_taylor_green(lattice, init.amplitude);
    case InitialCondition::Kind::Random:
      return init_random_divfree(lattice, init.seed, init.slope, init.energy);
  }
  throw InvalidInput("unknown initial condition");
}

SpectralField navier_stokes_rhs(const SpectralField& u, double viscosity) {
  SpectralField rhs = nonlinear_term(u);
  const Lattice& lattice = u.lattice();
  for (int c = 0; c < 3; ++c) {
    auto out = rhs.component(c);
    auto in = u.component(c);
    for (std::size_t i = 0; i < lattice.size(); ++i)
      out[i] -= viscosity * static_cast<double>(lattice.radius_squared(i)) * in[i];
  }
  return rhs;
}

double kinetic_energy(const SpectralField& u) {
  const double norm = norm_l2(u);
  return 0.5 * norm * norm;
}

double dissipation_rate(const SpectralField& u, double viscosity) {
  const double g = gradient_norm_l2(u);
  return viscosity * g * g;
}

double advective_stability_bound(const SpectralField& u) {
  const PhysicalField grid = to_physical(u);
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.components[0].size(); ++i)
    peak = std::max(peak, std::abs(grid.components[0][i]) + std::abs(grid.components[1][i]) +
                              std::abs(grid.components[2][i]));
  if (peak == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::sqrt2 / (u.lattice().dealias_radius() * peak);
}

NavierStokesStepper::NavierStokesStepper(const Lattice& lattice, double viscosity, double dt)
    : lattice_(lattice), viscosity_(viscosity), dt_(dt), half_decay_(lattice.size()) {
  if (!(viscosity > 0.0)) throw InvalidInput("viscosity must be positive");
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  for (std::size_t i = 0; i < lattice.size(); ++i)
    half_decay_[i] = std::exp(-viscosity * static_cast<double>(lattice.radius_squared(i)) * dt / 2.0);
}

SpectralField NavierStokesStepper::step(const SpectralField& u) const {
  if (!(u.lattice() == lattice_)) throw InvalidInput("field lattice does not match stepper");
  const auto modes = lattice_.band_modes();
  const double h = dt_;

  // Integrating-factor RK4 in v = e^{-nu Laplacian t} u. The nonlinear term
  // vanishes outside the band, where the update is pure decay.
  const SpectralField a = nonlinear_term(u);

  SpectralField stage(lattice_);
  for (int c = 0; c < 3; ++c)
    for (const BandMode& m : modes) {
      const std::size_t i = m.flat;
      stage(c, i) = half_decay_[i] * (u(c, i) + 0.5 * h * a(c, i));
    }
  const SpectralField b = nonlinear_term(stage);

  for (int c = 0; c < 3; ++c)
    for (const BandMode& m : modes) {
      const std::size_t i = m.flat;
      stage(c, i) = half_decay_[i] * u(c, i) + 0.5 * h * b(c, i);
    }
  const SpectralField cc = nonlinear_term(stage);

  for (int c = 0; c < 3; ++c)
    for (const BandMode& m : modes) {
      const std::size_t i = m.flat;
      const double e = half_decay_[i];
      stage(c, i) = e * e * u(c, i) + h * e * cc(c, i);
    }
  const SpectralField d = nonlinear_term(stage);

  SpectralField next(lattice_);
  for (int c = 0; c < 3; ++c) {
    auto out = next.component(c);
    auto in = u.component(c);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = half_decay_[i] * half_decay_[i] * in[i];
    for (const BandMode& m : modes) {
      const std::size_t i = m.flat;
      const double e = half_decay_[i];
      out[i] += (h / 6.0) * (e * e * a(c, i) + 2.0 * e * (b(c, i) + cc(c, i)) + d(c, i));
    }
  }
  if (!all_finite(next)) throw BlowUp("non-finite coefficients after step", 0.0, 0);
  return next;
}

SpectralField step(const SpectralField& u, double viscosity, double dt) {
  return NavierStokesStepper(u.lattice(), viscosity, dt).step(u);
}

RunSummary run_simulation(const SimConfig& config, const std::function<void(const StateSnapshot&)>& on_snapshot) {
  config.validate();
  const Lattice lattice(config.n);
  const long steps = config.step_count();
  const NavierStokesStepper stepper(lattice, config.viscosity, config.dt);

  RunSummary summary;
  summary.steps = steps;
  SpectralField u = make_initial_condition(lattice, config.init);

  summary.dt_stability_bound = advective_stability_bound(u);
  summary.dt_exceeds_stability_bound = config.dt > summary.dt_stability_bound;

  const double e0 = kinetic_energy(u);
  double trapezoid = 0.0;
  auto record_state = [&](long m) {
    const double t = static_cast<double>(m) * config.dt;
    const double energy = kinetic_energy(u);
    const double diss = dissipation_rate(u, config.viscosity);
    if (m > 0) {
      trapezoid += 0.5 * config.dt * (summary.dissipation.back() + diss);
      const double previous = summary.energies.back();
      const double increase = (energy - previous) / std::max(previous, std::numeric_limits<double>::min());
      summary.max_relative_energy_increase = std::max(summary.max_relative_energy_increase, increase);
      if (increase > kMonotoneTolerance) summary.energy_monotone = false;
    }
    summary.times.push_back(t);
    summary.energies.push_back(energy);
    summary.dissipation.push_back(diss);
    const double balance = energy - e0 + trapezoid;
    summary.energy_balance_residual = std::max(summary.energy_balance_residual, std::abs(balance));
    summary.energy_inequality_excess = std::max(summary.energy_inequality_excess, balance);
    summary.max_divergence = std::max(summary.max_divergence, divergence_indicator(u));
    if (m % config.snapshot_every == 0 || m == steps) {
      summary.max_hermitian_defect = std::max(summary.max_hermitian_defect, hermitian_defect(u));
      if (on_snapshot) on_snapshot(StateSnapshot{m, t, u, diss});
    }
    return energy;
  };

  record_state(0);
  for (long m = 1; m <= steps; ++m) {
    const double t = static_cast<double>(m) * config.dt;
    try {
      u = stepper.step(u);
    } catch (const BlowUp& e) {
      throw BlowUp(e.what(), t, m);
    }
    const double energy = record_state(m);
    if (!(energy <= kEnergyGrowthLimit * e0) && energy > 0.0)
      throw BlowUp("energy exceeded 1e3 times its initial value", t, m);
  }
  summary.dissipation_integral = trapezoid;
  return summary;
}

RunSummary run_to_directory(const SimConfig& config) {
  config.validate();
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  RunSummary summary = run_simulation(config, [&](const StateSnapshot& s) {
    const std::filesystem::path path = dir / snapshot_name(s.step);
    write_snapshot_file(path.string(), config.viscosity, s.time, s.field);
    files.push_back(path.filename().string());
  });
  summary.snapshot_files = files;
  std::ofstream out(dir / "summary.json");
  if (!out) throw ParseError("cannot write summary.json in " + config.out_dir);
  out << run_summary_to_json(config, summary) << '\n';
  return summary;
}

std::string run_summary_to_json(const SimConfig& config, const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["config"] = config_json(config);
  j["steps"] = summary.steps;
  j["dissipation_integral"] = summary.dissipation_integral;
  j["energy_balance_residual"] = summary.energy_balance_residual;
  j["energy_inequality_excess"] = summary.energy_inequality_excess;
  j["energy_monotone"] = summary.energy_monotone;
  j["max_relative_energy_increase"] = summary.max_relative_energy_increase;
  j["dt_stability_bound"] = summary.dt_stability_bound;
  j["dt_exceeds_stability_bound"] = summary.dt_exceeds_stability_bound;
  j["max_divergence"] = summary.max_divergence;
  j["max_hermitian_defect"] = summary.max_hermitian_defect;
  j["snapshots"] = summary.snapshot_files;
  j["time"] = summary.times;
  j["energy"] = summary.energies;
  j["dissipation"] = summary.dissipation;
  return j.dump(2);
}

}  // namespace supercrit
