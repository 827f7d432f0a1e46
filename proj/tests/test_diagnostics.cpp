#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <tuple>

#include "supercrit/diagnostics.hpp"
#include "supercrit/error.hpp"
#include "supercrit/nse_sim.hpp"
#include "supercrit/sequences.hpp"
#include "supercrit/snapshot_io.hpp"

using namespace supercrit;

namespace {

const double kTorusFactor = std::pow(2.0 * std::numbers::pi, 1.5);

// u_2 = 6 (2 pi)^(-3/2) cos x1: a steady shear with no self-interaction.
SpectralField cosine_mode(const Lattice& l) {
  SpectralField u(l);
  const std::size_t i = l.flat_index(1, 0, 0);
  u(1, i) = 3.0;
  u(1, l.mirror_index(i)) = 3.0;
  return u;
}

SpectralField mode_210(const Lattice& l) {
  SpectralField u(l);
  const std::size_t i = l.flat_index(2, 1, 0);
  u(2, i) = Complex(1.0, 2.0);
  u(2, l.mirror_index(i)) = Complex(1.0, -2.0);
  return u;
}

const InequalityRecord& find(const std::vector<InequalityRecord>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  FAIL("missing record " << name);
  return rs.front();
}

}  // namespace

TEST_CASE("record conventions") {
  CHECK(record_ratio(1.0, 2.0) == 0.5);
  CHECK(record_ratio(0.0, 0.0) == 0.0);
  CHECK(record_ratio(-1.0, 0.0) == 0.0);
  CHECK(std::isinf(record_ratio(1.0, 0.0)));

  CHECK(make_inequality(0, 1, "x", 1.0, 1.0).pass);
  CHECK(make_inequality(0, 1, "x", 1.0 + 1e-10, 1.0).pass);
  CHECK_FALSE(make_inequality(0, 1, "x", 1.0 + 1e-8, 1.0).pass);
  CHECK(make_inequality(0, 1, "x", 1e-14, 0.0, 1e-13).pass);
  CHECK(make_inequality(0, 1, "x", 1e-14, 0.0, 1e-13).ratio == 0.0);
  CHECK_FALSE(make_inequality(0, 1, "x", 1e-14, 0.0).pass);
  CHECK_FALSE(make_inequality(0, 1, "x", std::nan(""), 1.0).pass);
  CHECK(make_measurement(0, 1, "m", 5.0, 1.0).pass);
  CHECK_FALSE(make_measurement(0, 1, "m", 5.0, 0.0).pass);

  const SweepSpec s = SweepSpec::up_to(4.9);
  CHECK(s.shells == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("zero field passes every record") {
  const Lattice l(16);
  const SpectralField zero(l);
  const SnapshotAnalysis a(zero, 0.05);
  for (double k : {1.0, 2.0, 5.0}) {
    CHECK(a.cancellation(k).pass);
    CHECK(a.cancellation(k).lhs == 0.0);
    const auto hf = a.high_frequency_energy(k);
    CHECK(hf.pass);
    CHECK(hf.lhs == 0.0);
    CHECK(hf.rhs == 0.0);
    for (const auto& r : a.trilinear_bounds(k)) CHECK(r.pass);
    for (const auto& r : a.shell_bound(k)) CHECK(r.ratio == 0.0);
    CHECK(a.bernstein(k).c0 == 0.0);
  }
  for (const auto& r : a.superposition()) CHECK(r.pass);
  CHECK(a.c2_bound().lhs == 0.0);
  CHECK(a.c2_bound().pass);
}

TEST_CASE("single cosine mode: closed-form record values") {
  const Lattice l(16);
  const SpectralField u = cosine_mode(l);
  const double amplitude = 6.0 / kTorusFactor;
  const SnapshotAnalysis a(u, 0.1);

  // ||u||^2 = 18, ||grad u||^2 = 18, sigma_1 = sqrt(18), X1 = sqrt(2) sigma_1 / a(1) = 6.
  CHECK(a.x1() == doctest::Approx(6.0));
  CHECK(a.energy(BandMask::high(0.0)) == doctest::Approx(18.0));
  CHECK(a.gradient_energy(BandMask::high(1.0)) == doctest::Approx(18.0));
  CHECK(a.gradient_energy(BandMask::high(1.5)) == 0.0);

  // Steady up to diffusion: the high-frequency growth vanishes.
  const auto [growth, scale] = a.high_frequency_growth(1.0);
  CHECK(std::abs(growth) <= 1e-14 * scale);
  CHECK(a.high_frequency_energy(1.0).pass);
  CHECK(a.cancellation(1.0).lhs <= 1e-15);

  // b(j0(2)) = b(2) = 3/4.
  const auto b = a.bernstein(2.0);
  CHECK(find(b.records, "bernstein_u").lhs == doctest::Approx(amplitude).epsilon(1e-14));
  CHECK(find(b.records, "bernstein_u").rhs == doctest::Approx(0.75 * 2 * 6));
  CHECK(find(b.records, "bernstein_grad").lhs == doctest::Approx(amplitude).epsilon(1e-14));
  CHECK(find(b.records, "bernstein_grad").rhs == doctest::Approx(0.75 * 4 * 6));
  CHECK(find(b.records, "bernstein_grad_half").lhs == 0.0);
  CHECK(b.c0 == doctest::Approx(1.0 / 12.0).epsilon(1e-14));

  // Plancherel step with equality: k^2 ||u^1||^2 = 72 = 4 ||grad u^1||^2.
  const auto shell = a.shell_bound(2.0);
  CHECK(find(shell, "plancherel_half").lhs == doctest::Approx(72.0));
  CHECK(find(shell, "plancherel_half").rhs == doctest::Approx(72.0));
  CHECK(find(shell, "plancherel_half").pass);

  const auto sup = a.superposition();
  CHECK(find(sup, "superposition_u").lhs == 0.0);
  CHECK(find(sup, "superposition_grad").pass);

  // sum_k b(j0(k)) ||grad u^{k/2}||^2 = (b(1) + b(2)) 18.
  const AveragingCertificate cert = certify_b_sum_averaging(lattice_shell_range(l));
  const double c = averaging_constant(cert.n0);
  const auto avg = a.averaging(cert.n0, c);
  CHECK(avg.lhs == doctest::Approx(1.25 * 18));
  CHECK(avg.rhs == doctest::Approx(c * 18 + (cert.n0 <= 1 ? 6 * 18 : 0)));
  CHECK(avg.pass);
}

TEST_CASE("mode at xi = (2, 1, 0): superposition and averaging by hand") {
  const Lattice l(16);
  const SpectralField u = mode_210(l);
  const double e = 10.0;  // 2 |1 + 2i|^2
  const auto sup = check_superposition(u);
  // k = 1, 2 both keep |xi| = sqrt 5; annulus n = 2 carries weight 2.
  CHECK(find(sup, "superposition_u").lhs == 0.0);
  CHECK(find(sup, "superposition_grad").lhs == 0.0);

  const SnapshotAnalysis a(u, 0.0);
  CHECK(a.energy(BandMask::annulus(2, 3)) == doctest::Approx(e));
  CHECK(a.energy(BandMask::annulus(1, 2)) == 0.0);

  // k = 1..4 keep the mode: b(1) + b(2) + b(3) + b(3).
  const double weights = averaged_b(1) + averaged_b(2) + 2 * averaged_b(3);
  const AveragingCertificate cert = certify_b_sum_averaging(lattice_shell_range(l));
  const auto avg = check_averaging(u);
  CHECK(avg.lhs == doctest::Approx(weights * 5 * e));
  CHECK(avg.rhs == doctest::Approx(averaging_constant(cert.n0) * 5 * e + (cert.n0 <= 2 ? 6 * 2 * 5 * e : 0)));
  CHECK(avg.pass);
}

TEST_CASE("cancellation holds for random fields and Taylor-Green") {
  const Lattice l(32);
  const SpectralField tg = init_taylor_green(l, 1.0);
  for (double k : {1.0, 1.5, 2.0}) CHECK(check_cancellation(tg, k).pass);
  for (std::uint64_t seed : {1, 2, 3}) {
    const SpectralField u = init_random_divfree(l, seed, -1.0, 1.0);
    for (double k : {1.0, 3.0, 6.0, 10.0}) {
      const auto r = check_cancellation(u, k);
      CHECK(r.pass);
      CHECK(r.rhs > 0.0);
    }
  }
}

TEST_CASE("high-frequency energy and trilinear bounds on random fields") {
  const Lattice l(32);
  for (std::uint64_t seed : {4, 5}) {
    const SpectralField u = init_random_divfree(l, seed, -1.5, 4.0);
    const SnapshotAnalysis a(u, 0.02);
    for (double k : {1.0, 2.0, 3.0, 5.0, 8.0}) {
      CHECK(a.high_frequency_energy(k).pass);
      for (const auto& r : a.trilinear_bounds(k)) {
        INFO(r.name << " k=" << k << " lhs=" << r.lhs << " rhs=" << r.rhs);
        CHECK(r.pass);
      }
      CHECK(find(a.shell_bound(k), "plancherel_half").pass);
    }
    for (const auto& r : a.superposition()) CHECK(r.pass);
  }
}

TEST_CASE("records hold on roundoff-level tails") {
  // A few steps of Taylor-Green populate high shells only at rounding level.
  const Lattice l(32);
  SpectralField u = init_taylor_green(l, 1.0);
  const NavierStokesStepper stepper(l, 0.05, 1e-3);
  for (int m = 0; m < 30; ++m) u = stepper.step(u);
  const SnapshotAnalysis a(u, 0.05, 0.03);
  for (int k = 1; k <= 10; ++k) {
    CAPTURE(k);
    CHECK(a.high_frequency_energy(k).pass);
    for (const auto& r : a.trilinear_bounds(k)) {
      INFO(r.name << " lhs=" << r.lhs << " rhs=" << r.rhs);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("analytic time derivative matches a finite difference") {
  const Lattice l(16);
  const SpectralField u = init_random_divfree(l, 8, -1.0, 1.0);
  const double nu = 0.05, dt = 1e-5;
  const SnapshotAnalysis a(u, nu);
  const SpectralField forward = step(u, nu, dt);
  const SpectralField fd = (1.0 / dt) * (forward - u);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < fd.data().size(); ++i) {
    worst = std::max(worst, std::abs(fd.data()[i] - a.time_derivative().data()[i]));
    scale = std::max(scale, std::abs(a.time_derivative().data()[i]));
  }
  CHECK(worst <= 1e-3 * scale);
}

TEST_CASE("measured Bernstein constant stays below the lattice count") {
  const Lattice l(32);
  const double c0_lattice = lattice_bernstein_constant(l);
  std::vector<SpectralField> fields{init_taylor_green(l, 1.0)};
  for (std::uint64_t seed : {1, 2, 3}) fields.push_back(init_random_divfree(l, seed, -1.0, 1.0));
  fields.push_back(init_random_divfree(l, 4, 0.0, 1.0));
  for (const auto& u : fields) {
    const SnapshotAnalysis a(u, 0.0);
    for (double k : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0}) {
      const double c0 = a.bernstein(k).c0;
      CHECK(std::isfinite(c0));
      CHECK(c0 <= c0_lattice);
    }
  }
}

TEST_CASE("lattice shell range") {
  CHECK(lattice_shell_range(Lattice(8)) == 6);    // |xi|^2 <= 48
  CHECK(lattice_shell_range(Lattice(16)) == 13);  // |xi|^2 <= 192
  CHECK(lattice_shell_range(Lattice(64)) == 55);  // |xi|^2 <= 3072
}

TEST_CASE("lattice Bernstein constant against a brute-force count") {
  for (int n : {8, 16, 32}) {
    const Lattice l(n);
    std::map<int, long> counts;
    for (std::size_t i = 0; i < l.size(); ++i) {
      const auto r2 = l.radius_squared(i);
      if (r2 == 0 || !l.in_band(i)) continue;
      int j = 1;
      while (r2 >= (std::int64_t{1} << (2 * j))) ++j;
      ++counts[j];
    }
    double expected = 0.0;
    for (const auto& [j, c] : counts) expected = std::max(expected, std::sqrt(double(c)) / std::pow(2.0, 1.5 * j));
    CHECK(lattice_bernstein_constant(l) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("diagnostics run bookkeeping") {
  const Lattice l(16);
  std::vector<SnapshotInput> inputs;
  inputs.push_back({"b", 0.5, 0.05, init_random_divfree(l, 1, -2.0, 1.0)});
  inputs.push_back({"a", 0.0, 0.05, init_taylor_green(l, 1.0)});
  SweepSpec sweep = SweepSpec::up_to(3);
  const DiagnosticsRun run = run_diagnostics(inputs, sweep);

  CHECK(run.records.size() == 2 * (3 * 12 + 4));
  std::set<std::tuple<double, double, std::string>> keys;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const auto& r = run.records[i];
    keys.emplace(r.time, r.k, r.name);
    if (i > 0) {
      const auto& p = run.records[i - 1];
      CHECK(std::tie(p.time, p.k, p.name) < std::tie(r.time, r.k, r.name));
    }
  }
  CHECK(keys.size() == run.records.size());
  CHECK(run.records.front().time == 0.0);
  CHECK(run.records.front().k == 0.0);
  CHECK(run.profiles.size() == 2);
  REQUIRE(run.scaling.has_value());
  CHECK(run.scaling->pass);

  std::set<std::string> constants;
  for (const auto& c : run.constants) {
    constants.insert(c.name);
    CHECK(std::isfinite(c.value));
  }
  CHECK(constants == std::set<std::string>{"c0", "c0_lattice", "C1", "4C1", "C2", "n0", "c(n0)", "sup_refinement"});
  CHECK(run.passed());
  CHECK(run.failed_records() == 0);

  CHECK_THROWS_AS(run_diagnostics({}, sweep), InvalidInput);
  SweepSpec bad = sweep;
  bad.shells = {0.5};
  CHECK_THROWS_AS(run_diagnostics(inputs, bad), InvalidInput);
}

TEST_CASE("directory diagnostics skip corrupted files") {
  const std::string dir = SUPERCRIT_TEST_TMP;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const Lattice l(16);
  write_snapshot_file(dir + "/snapshot_000000.shf", 0.05, 0.0, init_taylor_green(l, 1.0));
  write_snapshot_file(dir + "/snapshot_000010.shf", 0.05, 0.1, init_random_divfree(l, 2, -2.0, 1.0));
  {
    std::ofstream bad(dir + "/snapshot_000005.shf", std::ios::binary);
    bad << "SHF1garbage";
  }
  std::ofstream(dir + "/notes.txt") << "ignored";

  const auto files = list_snapshot_files(dir);
  REQUIRE(files.size() == 3);
  CHECK(std::filesystem::path(files[1]).filename() == "snapshot_000005.shf");

  SweepSpec sweep = SweepSpec::up_to(2);
  const DiagnosticsRun run = diagnose_directory(dir, sweep);
  CHECK(run.sources.size() == 2);
  REQUIRE(run.errors.size() == 1);
  CHECK(run.errors[0].source == files[1]);
  CHECK(run.failed_records() == 0);
  CHECK_FALSE(run.passed());

  const std::string empty = dir + "/empty";
  std::filesystem::create_directories(empty);
  CHECK_THROWS_AS(diagnose_directory(empty, sweep), ParseError);
  CHECK_THROWS_AS(list_snapshot_files(dir + "/missing"), ParseError);
}
