#include "supercrit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "supercrit/error.hpp"
#include "supercrit/nse_sim.hpp"
#include "supercrit/snapshot_io.hpp"

namespace supercrit {

namespace {

constexpr double kRoundoffFloor = 1e-12;
const double kTorusFactor = std::pow(2.0 * std::numbers::pi, 1.5);

std::int64_t isqrt(std::int64_t r2) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(r2)));
  while (r * r > r2) --r;
  while ((r + 1) * (r + 1) <= r2) ++r;
  return r;
}

std::string describe_sweep(std::size_t snapshots, const std::vector<double>& shells) {
  std::ostringstream out;
  out << snapshots << " snapshots";
  if (!shells.empty()) out << " x " << shells.size() << " shells k in [" << shells.front() << ", " << shells.back() << "]";
  return out.str();
}

}  // namespace

double record_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  if (lhs <= 0.0) return 0.0;
  return std::numeric_limits<double>::infinity();
}

InequalityRecord make_inequality(double time, double k, std::string name, double lhs, double rhs, double floor) {
  InequalityRecord r{time, k, std::move(name), lhs, rhs, record_ratio(lhs, rhs), false};
  r.pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs * (1.0 + kRecordTolerance) + floor;
  if (r.pass && rhs <= 0.0) r.ratio = 0.0;
  return r;
}

InequalityRecord make_measurement(double time, double k, std::string name, double lhs, double rhs) {
  InequalityRecord r{time, k, std::move(name), lhs, rhs, record_ratio(lhs, rhs), false};
  r.pass = std::isfinite(lhs) && std::isfinite(rhs) && std::isfinite(r.ratio);
  return r;
}

SweepSpec SweepSpec::up_to(double kmax) {
  SweepSpec s;
  for (int k = 1; k <= static_cast<int>(std::floor(kmax)); ++k) s.shells.push_back(k);
  return s;
}

SnapshotAnalysis::SnapshotAnalysis(const SpectralField& u, double viscosity, double time)
    : u_(u), rhs_(navier_stokes_rhs(u, viscosity)), viscosity_(viscosity), time_(time) {
  const Lattice& lattice = u.lattice();
  profile_ = decompose_shells(u);
  x1_ = x1_norm(profile_);
  norm_ = norm_l2(u);
  const std::size_t radii = 3 * static_cast<std::size_t>(lattice.n() / 2) * (lattice.n() / 2) + 1;
  radial_energy_.assign(radii, 0.0);
  radial_transfer_.assign(radii, 0.0);
  radial_magnitude_.assign(radii, 0.0);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto r2 = static_cast<std::size_t>(lattice.radius_squared(i));
    double e = 0.0, p = 0.0, a2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Complex v = u_(c, i), w = rhs_(c, i);
      e += std::norm(v);
      p += v.real() * w.real() + v.imag() * w.imag();
      a2 += std::norm(w);
    }
    radial_energy_[r2] += e;
    radial_transfer_[r2] += p;
    radial_magnitude_[r2] += std::sqrt(a2 * e);
  }
  transfer_reference_ = sup_norms(u_).value * std::sqrt(gradient_energy(BandMask::high(0.0)));
}

double SnapshotAnalysis::roundoff_floor(double k, double scale) const {
  return kRoundoffFloor * (scale + transfer_reference_ * std::sqrt(energy(BandMask::high(k))));
}

double SnapshotAnalysis::energy_where(const BandMask& mask, bool gradient) const {
  double sum = 0.0;
  for (std::size_t r2 = 0; r2 < radial_energy_.size(); ++r2) {
    if (radial_energy_[r2] == 0.0 || !mask.contains(static_cast<std::int64_t>(r2))) continue;
    sum += (gradient ? static_cast<double>(r2) : 1.0) * radial_energy_[r2];
  }
  return sum;
}

double SnapshotAnalysis::energy(const BandMask& mask) const { return energy_where(mask, false); }
double SnapshotAnalysis::gradient_energy(const BandMask& mask) const { return energy_where(mask, true); }

SpectralField SnapshotAnalysis::masked(const BandMask& mask) const { return apply_mask(u_, mask); }

SnapshotAnalysis::Sups SnapshotAnalysis::ball_sups(double k, bool refined) const {
  const auto key = std::make_pair(k, refined);
  if (auto it = sup_cache_.find(key); it != sup_cache_.end()) return it->second;
  Sups s;
  if (energy(BandMask::ball(k)) > 0.0) {
    const SpectralField part = masked(BandMask::ball(k));
    const SupNorms n = refined ? sup_norms(resample(part, Lattice(2 * u_.lattice().n()))) : sup_norms(part);
    s = {n.value, n.gradient};
  }
  sup_cache_.emplace(key, s);
  return s;
}

SupNorms SnapshotAnalysis::sup_norms_refined(int factor) const {
  if (factor < 1) throw InvalidInput("refinement factor must be positive");
  if (factor == 1) return sup_norms(u_);
  return sup_norms(resample(u_, Lattice(factor * u_.lattice().n())));
}

InequalityRecord SnapshotAnalysis::cancellation(double k) const {
  const BandMask high = BandMask::high(k);
  double lhs = 0.0;
  const double e = energy(high);
  if (e > 0.0) {
    const SpectralField uk = masked(high);
    lhs = std::abs(inner_product(convection(u_, uk), uk));
  }
  const double rhs = kCancellationTolerance * norm_ * std::sqrt(gradient_energy(high)) * std::sqrt(e);
  InequalityRecord r{time_, k, "cancellation", lhs, rhs, record_ratio(lhs, rhs), lhs <= rhs};
  return r;
}

std::pair<double, double> SnapshotAnalysis::high_frequency_growth(double k) const {
  const BandMask high = BandMask::high(k);
  double value = 0.0, scale = 0.0;
  for (std::size_t r2 = 0; r2 < radial_energy_.size(); ++r2) {
    if (radial_energy_[r2] == 0.0 || !high.contains(static_cast<std::int64_t>(r2))) continue;
    const double viscous = viscosity_ * static_cast<double>(r2) * radial_energy_[r2];
    value += radial_transfer_[r2] + viscous;
    scale += radial_magnitude_[r2] + viscous;
  }
  return {value, scale};
}

InequalityRecord SnapshotAnalysis::high_frequency_energy(double k) const {
  const auto [lhs, scale] = high_frequency_growth(k);
  const double e_half = energy(BandMask::high(k / 2.0));
  auto evaluate = [&](bool refined) {
    const Sups low = ball_sups(k, refined);
    const Sups half = ball_sups(k / 2.0, refined);
    const double rhs = (half.gradient + low.gradient + k * low.value) * e_half;
    return make_inequality(time_, k, "high_frequency_energy", lhs, rhs, roundoff_floor(k, scale));
  };
  InequalityRecord r = evaluate(false);
  return r.pass ? r : evaluate(true);
}

std::vector<InequalityRecord> SnapshotAnalysis::trilinear_bounds(double k) const {
  const BandMask high = BandMask::high(k);
  const auto [growth, scale] = high_frequency_growth(k);
  const double e_high = energy(high);
  const double e_half = energy(BandMask::high(k / 2.0));
  const double g_mid = gradient_energy(BandMask::annulus(k / 2.0, k));

  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  if (e_high > 0.0) {
    const SpectralField low = masked(BandMask::ball(k));
    const SpectralField mid = masked(BandMask::annulus(k / 2.0, k));
    const SpectralField half = masked(BandMask::ball(k / 2.0));
    const SpectralField top = masked(high);
    t1 = inner_product(convection(low, mid), top);
    t2 = inner_product(convection(mid, half), top);
    t3 = inner_product(convection(top, low), top);
  }
  const double magnitude = std::abs(growth) + std::abs(t1) + std::abs(t2) + std::abs(t3);

  auto bounds = [&](bool refined) {
    const Sups low = ball_sups(k, refined);
    const Sups half = ball_sups(k / 2.0, refined);
    const double single = low.value * std::sqrt(g_mid) * std::sqrt(e_high);
    return std::vector<InequalityRecord>{
        make_inequality(time_, k, "holder_pair", std::abs(t2 + t3), (half.gradient + low.gradient) * e_half),
        make_inequality(time_, k, "holder_single", std::abs(t1), single),
        make_inequality(time_, k, "k_factor", single, k * low.value * e_half),
    };
  };
  std::vector<InequalityRecord> out = bounds(false);
  if (!std::all_of(out.begin(), out.end(), [](const InequalityRecord& r) { return r.pass; })) out = bounds(true);
  out.insert(out.begin(), make_inequality(time_, k, "trilinear_split", std::abs(growth + t1 + t2 + t3),
                                          kRecordTolerance * magnitude, roundoff_floor(k, scale)));
  return out;
}

SnapshotAnalysis::Bernstein SnapshotAnalysis::bernstein(double k) const {
  const Sups low = ball_sups(k, false);
  const Sups half = ball_sups(k / 2.0, false);
  const double b = averaged_b(cutoff_shell_index(k));
  Bernstein out;
  out.records = {
      make_measurement(time_, k, "bernstein_u", low.value, b * k * x1_),
      make_measurement(time_, k, "bernstein_grad", low.gradient, b * k * k * x1_),
      make_measurement(time_, k, "bernstein_grad_half", half.gradient, b * k * k * x1_),
  };
  const double scale[3] = {kTorusFactor / 8.0, kTorusFactor / 8.0, kTorusFactor / 4.0};
  for (int i = 0; i < 3; ++i) {
    if (std::isfinite(out.records[i].ratio)) out.c0 = std::max(out.c0, out.records[i].ratio * scale[i]);
  }
  return out;
}

std::vector<InequalityRecord> SnapshotAnalysis::shell_bound(double k) const {
  const double lhs = high_frequency_growth(k).first;
  const double e_half = energy(BandMask::high(k / 2.0));
  const double g_half = gradient_energy(BandMask::high(k / 2.0));
  const double b = averaged_b(cutoff_shell_index(k));
  return {
      make_measurement(time_, k, "shell_k2", lhs, b * k * k * x1_ * e_half),
      make_measurement(time_, k, "shell", lhs, b * x1_ * g_half),
      make_inequality(time_, k, "plancherel_half", k * k * e_half, 4.0 * g_half),
  };
}

std::vector<InequalityRecord> SnapshotAnalysis::superposition() const {
  std::size_t top = 0;
  for (std::size_t r2 = 0; r2 < radial_energy_.size(); ++r2)
    if (radial_energy_[r2] != 0.0) top = r2;
  const std::int64_t kmax = isqrt(static_cast<std::int64_t>(top));

  std::vector<InequalityRecord> out;
  for (bool gradient : {false, true}) {
    double tails = 0.0, annuli = 0.0;
    for (std::int64_t k = 1; k <= kmax; ++k) tails += energy_where(BandMask::high(static_cast<double>(k)), gradient);
    for (std::int64_t n = 1; n <= kmax; ++n)
      annuli += static_cast<double>(n) * energy_where(BandMask::annulus(n, n + 1), gradient);
    const double diff = std::abs(tails - annuli);
    out.push_back(make_inequality(time_, 0.0, gradient ? "superposition_grad" : "superposition_u", diff,
                                  kIdentityTolerance * std::max(std::abs(tails), std::abs(annuli))));
    out.back().pass = diff <= kIdentityTolerance * std::max(std::abs(tails), std::abs(annuli));
  }
  return out;
}

InequalityRecord SnapshotAnalysis::averaging(std::int64_t n0, double c_n0) const {
  std::size_t top = 0;
  for (std::size_t r2 = 0; r2 < radial_energy_.size(); ++r2)
    if (radial_energy_[r2] != 0.0) top = r2;
  const std::int64_t rmax = isqrt(static_cast<std::int64_t>(top));

  double lhs = 0.0;
  for (std::int64_t k = 1; k <= 2 * rmax + 2; ++k) {
    const double g = gradient_energy(BandMask::high(static_cast<double>(k) / 2.0));
    if (g > 0.0) lhs += averaged_b(cutoff_shell_index(static_cast<double>(k))) * g;
  }
  double tail = 0.0;
  for (std::int64_t n = n0; n <= rmax; ++n)
    tail += static_cast<double>(n) * gradient_energy(BandMask::annulus(n, n + 1));
  const double rhs = c_n0 * gradient_energy(BandMask::high(0.0)) + 6.0 * tail;
  return make_inequality(time_, 0.0, "b_sum_averaging", lhs, rhs);
}

InequalityRecord SnapshotAnalysis::c2_bound() const {
  double lhs = 0.0, weighted = 0.0;
  for (std::size_t r2 = 1; r2 < radial_energy_.size(); ++r2) {
    if (radial_energy_[r2] == 0.0) continue;
    const double n = static_cast<double>(isqrt(static_cast<std::int64_t>(r2)));
    const double grad = static_cast<double>(r2) * radial_energy_[r2];
    lhs += n * (radial_transfer_[r2] + viscosity_ * grad);
    weighted += n * grad;
  }
  const double rhs = x1_ * (gradient_energy(BandMask::high(0.0)) + weighted);
  return make_measurement(time_, 0.0, "c2_bound", lhs, rhs);
}

InequalityRecord check_cancellation(const SpectralField& u, double k) {
  return SnapshotAnalysis(u, 0.0).cancellation(k);
}

InequalityRecord check_high_frequency_energy(const SpectralField& u, double viscosity, double k) {
  return SnapshotAnalysis(u, viscosity).high_frequency_energy(k);
}

SnapshotAnalysis::Bernstein check_bernstein(const SpectralField& u, double k) {
  return SnapshotAnalysis(u, 0.0).bernstein(k);
}

std::vector<InequalityRecord> check_shell_bound(const SpectralField& u, double viscosity, double k) {
  return SnapshotAnalysis(u, viscosity).shell_bound(k);
}

std::vector<InequalityRecord> check_superposition(const SpectralField& u) {
  return SnapshotAnalysis(u, 0.0).superposition();
}

std::int64_t lattice_shell_range(const Lattice& lattice) {
  const std::int64_t half = lattice.n() / 2;
  return isqrt(3 * half * half);
}

InequalityRecord check_averaging(const SpectralField& u) {
  const AveragingCertificate cert = certify_b_sum_averaging(lattice_shell_range(u.lattice()));
  if (!cert.report.passed()) throw InvalidInput("no admissible n0 over the lattice shell range");
  return SnapshotAnalysis(u, 0.0).averaging(cert.n0, averaging_constant(cert.n0));
}

double lattice_bernstein_constant(const Lattice& lattice) {
  std::map<int, std::int64_t> counts;
  for (const BandMode& m : lattice.band_modes()) {
    if (m.radius_squared == 0) continue;
    ++counts[(std::bit_width(static_cast<std::uint32_t>(m.radius_squared)) - 1) / 2 + 1];
  }
  double c0 = 0.0;
  for (const auto& [j, count] : counts)
    c0 = std::max(c0, std::sqrt(static_cast<double>(count)) / std::pow(2.0, 1.5 * j));
  return c0;
}

std::size_t DiagnosticsRun::failed_records() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.pass; }));
}

bool DiagnosticsRun::passed() const {
  return failed_records() == 0 && errors.empty() && !sources.empty() && (!scaling || scaling->pass);
}

DiagnosticsAccumulator::DiagnosticsAccumulator(SweepSpec sweep) {
  if (!(sweep.epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  for (double k : sweep.shells)
    if (!(k >= 1.0) || !std::isfinite(k)) throw InvalidInput("shell indices must be at least 1");
  run_.sweep = std::move(sweep);
}

void DiagnosticsAccumulator::add_error(SnapshotError error) { run_.errors.push_back(std::move(error)); }

void DiagnosticsAccumulator::add(const SnapshotInput& snapshot) {
  const SnapshotAnalysis a(snapshot.field, snapshot.viscosity, snapshot.time);
  if (run_.sweep.shells.empty()) run_.sweep.shells = SweepSpec::up_to(snapshot.field.lattice().dealias_radius()).shells;
  c0_lattice_ = std::max(c0_lattice_, lattice_bernstein_constant(snapshot.field.lattice()));
  const std::int64_t range = lattice_shell_range(snapshot.field.lattice());
  auto cert = averaging_.find(range);
  if (cert == averaging_.end()) {
    cert = averaging_.emplace(range, certify_b_sum_averaging(range)).first;
    if (!cert->second.report.passed()) throw InvalidInput("no admissible n0 over the lattice shell range");
  }
  const std::int64_t n0 = cert->second.n0;
  const double c_n0 = averaging_constant(n0);
  if (n0 > n0_) {
    n0_ = n0;
    c_n0_ = c_n0;
  }
  shell_range_ = std::max(shell_range_, range);

  auto& out = run_.records;
  for (double k : run_.sweep.shells) {
    out.push_back(a.cancellation(k));
    for (auto& r : a.trilinear_bounds(k)) out.push_back(std::move(r));
    out.push_back(a.high_frequency_energy(k));
    for (auto& r : a.bernstein(k).records) out.push_back(std::move(r));
    for (auto& r : a.shell_bound(k)) out.push_back(std::move(r));
  }
  for (auto& r : a.superposition()) out.push_back(std::move(r));
  out.push_back(a.averaging(n0, c_n0));
  out.push_back(a.c2_bound());

  const SupNorms native = sup_norms(snapshot.field);
  const SupNorms fine = a.sup_norms_refined(2);
  if (native.value > 0.0) sup_refinement_ = std::max(sup_refinement_, fine.value / native.value);
  if (native.gradient > 0.0) sup_refinement_ = std::max(sup_refinement_, fine.gradient / native.gradient);

  run_.profiles.push_back(a.profile());
  run_.sources.push_back(snapshot.source);
}

DiagnosticsRun DiagnosticsAccumulator::finish() {
  auto& records = run_.records;
  std::stable_sort(records.begin(), records.end(), [](const InequalityRecord& a, const InequalityRecord& b) {
    return std::tie(a.time, a.k, a.name) < std::tie(b.time, b.k, b.name);
  });

  auto sup_ratio = [&](const std::string& name) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : records)
      if (r.name == name && std::isfinite(r.ratio)) best = std::max(best, r.ratio);
    return std::isfinite(best) ? best : 0.0;
  };
  double c0 = 0.0;
  for (const auto& r : records) {
    if (!std::isfinite(r.ratio)) continue;
    if (r.name == "bernstein_u" || r.name == "bernstein_grad") c0 = std::max(c0, r.ratio * kTorusFactor / 8.0);
    if (r.name == "bernstein_grad_half") c0 = std::max(c0, r.ratio * kTorusFactor / 4.0);
  }
  const std::string sweep = describe_sweep(run_.sources.size(), run_.sweep.shells);
  std::ostringstream avg;
  avg << "minimal n0 with both b-sums <= 3n on [n0, " << shell_range_ << "], the lattice shell range";
  run_.constants = {
      {"c0", c0, sweep},
      {"c0_lattice", c0_lattice_, "band-limited lattice shells"},
      {"C1", sup_ratio("shell_k2"), sweep},
      {"4C1", sup_ratio("shell"), sweep},
      {"C2", sup_ratio("c2_bound"), describe_sweep(run_.sources.size(), {})},
      {"n0", static_cast<double>(n0_), avg.str()},
      {"c(n0)", c_n0_, avg.str()},
      {"sup_refinement", sup_refinement_, "grid maximum on a 2x refined grid over native grid"},
  };
  if (!run_.profiles.empty())
    run_.scaling = verify_scaling_smallness_uniform(run_.profiles, run_.sweep.epsilon, run_.sweep.extra_levels);
  return std::move(run_);
}

DiagnosticsRun run_diagnostics(const std::vector<SnapshotInput>& snapshots, const SweepSpec& sweep) {
  if (snapshots.empty()) throw InvalidInput("no snapshots to diagnose");
  DiagnosticsAccumulator acc(sweep);
  for (const auto& s : snapshots) acc.add(s);
  return acc.finish();
}

std::vector<std::string> list_snapshot_files(const std::string& directory) {
  std::vector<std::string> files;
  std::error_code ec;
  std::filesystem::directory_iterator it(directory, ec);
  if (ec) throw ParseError("cannot list " + directory + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.path().extension() == ".shf") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

DiagnosticsRun diagnose_directory(const std::string& directory, const SweepSpec& sweep) {
  const auto files = list_snapshot_files(directory);
  if (files.empty()) throw ParseError("no .shf snapshots in " + directory);
  DiagnosticsAccumulator acc(sweep);
  for (const auto& path : files) {
    try {
      SnapshotRecord rec = read_snapshot_file(path);
      acc.add(SnapshotInput{path, rec.time, rec.viscosity, std::move(rec.field)});
    } catch (const std::exception& e) {
      acc.add_error({path, e.what()});
    }
  }
  return acc.finish();
}

}  // namespace supercrit
