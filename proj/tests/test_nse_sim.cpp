#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "supercrit/error.hpp"
#include "supercrit/nse_sim.hpp"
#include "supercrit/snapshot_io.hpp"

using namespace supercrit;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double max_abs_difference(const SpectralField& a, const SpectralField& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

}  // namespace

TEST_CASE("Taylor-Green initial state") {
  const Lattice l(16);
  const double amplitude = 1.7;
  const SpectralField u = init_taylor_green(l, amplitude);
  CHECK(norm_l2(u) * norm_l2(u) == doctest::Approx(amplitude * amplitude * std::pow(kTwoPi, 3) / 4).epsilon(1e-14));
  CHECK(divergence_indicator(u) == 0.0);
  CHECK(hermitian_defect(u) == 0.0);

  const PhysicalField g = to_physical(u);
  const double h = kTwoPi / 16;
  double worst = 0.0;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      for (int c = 0; c < 16; ++c) {
        const std::size_t p = (a * 16 + b) * 16 + c;
        const double x = a * h, y = b * h, z = c * h;
        worst = std::max(worst, std::abs(g.components[0][p] - amplitude * std::sin(x) * std::cos(y) * std::cos(z)));
        worst = std::max(worst, std::abs(g.components[1][p] + amplitude * std::cos(x) * std::sin(y) * std::cos(z)));
        worst = std::max(worst, std::abs(g.components[2][p]));
      }
  CHECK(worst < 1e-14);

  // max_x (|u1| + |u2|) = A, attained on the grid.
  CHECK(advective_stability_bound(u) == doctest::Approx(2 * std::sqrt(2.0) / (16.0 / 3.0) / amplitude).epsilon(1e-13));
}

TEST_CASE("random initial state") {
  const Lattice l(32);
  const SpectralField u = init_random_divfree(l, 11, -2.0, 3.0);
  CHECK(norm_l2(u) * norm_l2(u) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(divergence_indicator(u) <= 1e-12);
  CHECK(hermitian_defect(u) == 0.0);
  CHECK(is_band_limited(u));
  CHECK(init_random_divfree(l, 11, -2.0, 3.0) == u);
  CHECK_FALSE(init_random_divfree(l, 12, -2.0, 3.0) == u);

  // Spectrum decays with the requested slope.
  double low = 0.0, high = 0.0;
  std::size_t n_low = 0, n_high = 0;
  for (const auto& m : l.band_modes()) {
    const double e = std::norm(u(0, m.flat)) + std::norm(u(1, m.flat)) + std::norm(u(2, m.flat));
    if (m.radius_squared >= 1 && m.radius_squared < 4) { low += e; ++n_low; }
    if (m.radius_squared >= 64 && m.radius_squared < 100) { high += e; ++n_high; }
  }
  CHECK(low / n_low > 100 * high / n_high);
  CHECK_THROWS_AS(init_random_divfree(l, 1, -2.0, -1.0), InvalidInput);
}

TEST_CASE("zero field stays zero") {
  const Lattice l(16);
  const SpectralField zero(l);
  CHECK(step(zero, 0.1, 0.01) == zero);
  CHECK(norm_l2(navier_stokes_rhs(zero, 0.1)) == 0.0);
}

TEST_CASE("a shear mode decays at the exact heat rate") {
  // u = (f(2y + z), 0, 0) has (u . grad) u = 0.
  const Lattice l(16);
  SpectralField u(l);
  const std::size_t i = l.flat_index(0, 2, 1);
  u(0, i) = Complex(0.3, -0.4);
  u(0, l.mirror_index(i)) = Complex(0.3, 0.4);
  const double nu = 0.07, dt = 0.01;
  SpectralField v = u;
  const NavierStokesStepper stepper(l, nu, dt);
  for (int m = 0; m < 10; ++m) v = stepper.step(v);
  const double decay = std::exp(-nu * 5 * dt * 10);
  CHECK(std::abs(v(0, i) - decay * u(0, i)) < 1e-15);
  CHECK(std::abs(v(0, l.mirror_index(i)) - decay * u(0, l.mirror_index(i))) < 1e-15);
  CHECK(norm_l2(v) == doctest::Approx(decay * norm_l2(u)).epsilon(1e-14));
}

TEST_CASE("rhs is the projected convection plus viscous decay") {
  const Lattice l(16);
  const SpectralField u = init_random_divfree(l, 5, -1.0, 1.0);
  const double nu = 0.2;
  SpectralField expected = -1.0 * leray_project(convection(u, u));
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < l.size(); ++i) expected(c, i) -= nu * static_cast<double>(l.radius_squared(i)) * u(c, i);
  const SpectralField rhs = navier_stokes_rhs(u, nu);
  CHECK(max_abs_difference(rhs, expected) < 1e-13);
  // Energy identity: <rhs, u> = -nu ||grad u||^2.
  CHECK(inner_product(rhs, u) == doctest::Approx(-dissipation_rate(u, nu)).epsilon(1e-12));
}

TEST_CASE("steps conserve divergence and symmetry") {
  const Lattice l(16);
  SpectralField u = init_random_divfree(l, 21, -1.0, 1.0);
  const NavierStokesStepper stepper(l, 0.05, 1e-3);
  double div = 0.0, herm = 0.0;
  for (int m = 0; m < 10000; ++m) {
    u = stepper.step(u);
    if (m % 100 == 99) {
      div = std::max(div, divergence_indicator(u));
      herm = std::max(herm, hermitian_defect(u));
    }
  }
  CHECK(div <= 1e-10);
  CHECK(herm <= 1e-10);
  CHECK(is_band_limited(u));
}

TEST_CASE("energy is nonincreasing for a short Taylor-Green run") {
  SimConfig config;
  config.n = 32;
  config.horizon = 0.05;
  config.snapshot_every = 10;
  const RunSummary s = run_simulation(config, {});
  CHECK(s.steps == 50);
  CHECK(s.energy_monotone);
  for (std::size_t m = 1; m < s.energies.size(); ++m) CHECK(s.energies[m] <= s.energies[m - 1]);
  // Trapezoidal quadrature error of the dissipation integral, O(dt^2).
  CHECK(s.energy_balance_residual < 1e-9 * s.energies.front());
  CHECK(s.max_divergence < 1e-12);
  CHECK_FALSE(s.dt_exceeds_stability_bound);
}

TEST_CASE("energy balance converges at second order") {
  SimConfig config;
  config.n = 16;
  config.viscosity = 0.05;
  config.horizon = 0.2;
  config.init.kind = InitialCondition::Kind::Random;
  config.init.seed = 3;
  config.init.slope = -1.0;
  config.init.energy = 20.0;
  config.snapshot_every = 1000;
  double previous = 0.0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    config.dt = dt;
    const double r = run_simulation(config, {}).energy_balance_residual;
    if (previous > 0.0) CHECK(std::log2(previous / r) >= 1.9);
    previous = r;
  }
}

TEST_CASE("snapshots are emitted on schedule") {
  SimConfig config;
  config.n = 16;
  config.dt = 0.01;
  config.horizon = 0.25;
  config.snapshot_every = 10;
  std::vector<long> steps;
  std::vector<double> times;
  run_simulation(config, [&](const StateSnapshot& s) {
    steps.push_back(s.step);
    times.push_back(s.time);
    CHECK(s.dissipation == doctest::Approx(dissipation_rate(s.field, config.viscosity)));
  });
  CHECK(steps == std::vector<long>{0, 10, 20, 25});
  CHECK(times.back() == doctest::Approx(0.25));

  config.horizon = 0.0;
  std::vector<SpectralField> fields;
  const RunSummary s = run_simulation(config, [&](const StateSnapshot& snap) { fields.push_back(snap.field); });
  CHECK(s.steps == 0);
  REQUIRE(fields.size() == 1);
  CHECK(fields[0] == init_taylor_green(Lattice(16), 1.0));
}

TEST_CASE("runs are bit-identical") {
  SimConfig config;
  config.n = 16;
  config.dt = 0.01;
  config.horizon = 0.1;
  config.snapshot_every = 5;
  config.init.kind = InitialCondition::Kind::Random;
  config.init.seed = 99;
  const std::string base = SUPERCRIT_TEST_TMP;
  std::filesystem::remove_all(base);
  config.out_dir = base + "/a";
  const RunSummary a = run_to_directory(config);
  config.out_dir = base + "/b";
  const RunSummary b = run_to_directory(config);
  REQUIRE(a.snapshot_files.size() == 3);
  REQUIRE(b.snapshot_files.size() == 3);
  CHECK(a.snapshot_files == b.snapshot_files);
  CHECK(a.snapshot_files.back() == "snapshot_000010.shf");
  for (const auto& f : a.snapshot_files) CHECK(slurp(base + "/a/" + f) == slurp(base + "/b/" + f));
  const SnapshotRecord last = read_snapshot_file(base + "/a/" + a.snapshot_files.back());
  CHECK(last.time == doctest::Approx(0.1));
  CHECK(last.viscosity == config.viscosity);
  CHECK(std::filesystem::exists(base + "/a/summary.json"));
}

TEST_CASE("blow-up is reported") {
  SimConfig config;
  config.n = 16;
  config.viscosity = 1e-4;
  config.dt = 1.0;
  config.horizon = 50.0;
  config.init.kind = InitialCondition::Kind::Random;
  config.init.energy = 1e6;
  config.snapshot_every = 1000;
  try {
    run_simulation(config, {});
    FAIL("expected blow-up");
  } catch (const BlowUp& e) {
    CHECK(e.step() >= 1);
    CHECK(e.time() == doctest::Approx(e.step() * config.dt));
  }
}

TEST_CASE("config parsing") {
  const SimConfig c = parse_sim_config(
      R"({"n": 32, "nu": 0.1, "dt": 0.002, "T": 0.5, "init": {"kind": "random", "seed": 4, "slope": -1.5, "energy": 2},
          "snapshot_every": 25, "out_dir": "x"})");
  CHECK(c.n == 32);
  CHECK(c.viscosity == 0.1);
  CHECK(c.dt == 0.002);
  CHECK(c.horizon == 0.5);
  CHECK(c.step_count() == 250);
  CHECK(c.init.kind == InitialCondition::Kind::Random);
  CHECK(c.init.seed == 4);
  CHECK(c.init.slope == -1.5);
  CHECK(c.init.energy == 2.0);
  CHECK(c.snapshot_every == 25);
  CHECK(c.out_dir == "x");
  CHECK(parse_sim_config(sim_config_to_json(c)).step_count() == 250);

  const SimConfig tg = parse_sim_config(R"({"n": 16, "nu": 0.05, "dt": 0.001, "T": 1.0, "init": {"kind": "taylor-green", "amplitude": 2}})");
  CHECK(tg.init.kind == InitialCondition::Kind::TaylorGreen);
  CHECK(tg.init.amplitude == 2.0);

  CHECK_THROWS_AS(parse_sim_config("{"), ParseError);
  CHECK_THROWS_AS(parse_sim_config(R"({"n": 16, "init": {"kind": "vortex"}})"), InvalidInput);
  CHECK_THROWS_AS(parse_sim_config(R"({"n": 15})"), InvalidInput);
  CHECK_THROWS_AS(parse_sim_config(R"({"nu": -1})"), InvalidInput);
  CHECK_THROWS_AS(parse_sim_config(R"({"dt": 0})"), InvalidInput);
  CHECK_THROWS_AS(parse_sim_config(R"({"dt": 0.3, "T": 1.0})"), InvalidInput);
  CHECK_THROWS_AS(parse_sim_config(R"({"n": "big"})"), ParseError);
  CHECK_THROWS_AS(load_sim_config("/nonexistent/config.json"), ParseError);
}
