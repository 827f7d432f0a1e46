#pragma once

/// @file diagnostics.hpp
/// @brief High-frequency energy inequalities evaluated on velocity snapshots.
///
/// Notation: u^k keeps |xi| >= k, u_k = u - u^k, u_{h,k} keeps h <= |xi| < k.
/// Shell indices k are real; records not tied to one shell carry k = 0.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "supercrit/sequences.hpp"
#include "supercrit/shell_profile.hpp"
#include "supercrit/spectral_field.hpp"

namespace supercrit {

inline constexpr double kRecordTolerance = 1e-9;
inline constexpr double kCancellationTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;

struct InequalityRecord {
  double time = 0.0;
  double k = 0.0;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  ///< lhs / rhs; 0 when both vanish, +inf when only rhs does
  bool pass = true;
};

/// Ratio convention shared by all records.
double record_ratio(double lhs, double rhs);
/// pass iff lhs <= rhs (1 + 1e-9) + floor.
InequalityRecord make_inequality(double time, double k, std::string name, double lhs, double rhs,
                                 double floor = 0.0);
/// A ratio standing for a constant the estimate leaves generic: pass iff finite.
InequalityRecord make_measurement(double time, double k, std::string name, double lhs, double rhs);

struct ConstantEstimate {
  std::string name;
  double value = 0.0;
  std::string sweep;
};

struct SweepSpec {
  std::vector<double> shells;  ///< k values
  double epsilon = 0.1;        ///< scaling-smallness target for the snapshot profiles
  int extra_levels = 3;

  /// Integer k from 1 to floor(kmax).
  static SweepSpec up_to(double kmax);
};

/// Shared per-snapshot state: radial tables, the analytic time derivative, the
/// X1 norm, and cached sup norms of frequency-truncated parts.
class SnapshotAnalysis {
 public:
  /// The time derivative is -P[(u . grad) u] + nu Laplacian u; u must be band-limited.
  SnapshotAnalysis(const SpectralField& u, double viscosity, double time = 0.0);

  const SpectralField& field() const { return u_; }
  const SpectralField& time_derivative() const { return rhs_; }
  double time() const { return time_; }
  double viscosity() const { return viscosity_; }
  double x1() const { return x1_; }
  const ShellProfile& profile() const { return profile_; }

  /// ||u masked||_2^2 and ||grad u masked||_2^2.
  double energy(const BandMask& mask) const;
  double gradient_energy(const BandMask& mask) const;

  /// |<(u . grad) u^k, u^k>| against 1e-9 ||u||_2 ||grad u^k||_2 ||u^k||_2.
  InequalityRecord cancellation(double k) const;

  /// d/2dt ||u^k||^2 + nu ||grad u^k||^2 as <du/dt, u^k> + nu ||grad u^k||^2,
  /// with the absolute rounding scale of that sum.
  std::pair<double, double> high_frequency_growth(double k) const;

  /// Energy inequality for u^k with sup norms on the bounding side. Sup norms
  /// are grid maxima; a failing record is re-evaluated on a twice finer grid.
  InequalityRecord high_frequency_energy(double k) const;

  /// The three-term splitting of the high-frequency transfer and the bounds on
  /// its pieces: split identity, Holder pair bound, single-term Holder bound,
  /// and the k-factor step.
  std::vector<InequalityRecord> trilinear_bounds(double k) const;

  struct Bernstein {
    std::vector<InequalityRecord> records;  ///< u_k, grad u_k, grad u_{k/2}
    double c0 = 0.0;                        ///< max normalized ratio
  };
  /// Sup norms of truncated parts against b(j0(k)) k ||u||_X1 and the k^2 forms.
  Bernstein bernstein(double k) const;

  /// k^2 form, gradient form, and the Plancherel step k^2 ||u^{k/2}||^2 <= 4 ||grad u^{k/2}||^2.
  std::vector<InequalityRecord> shell_bound(double k) const;

  /// sum_k ||u^k||^2 = sum_n n ||u_{n,n+1}||^2 and the gradient version.
  std::vector<InequalityRecord> superposition() const;

  /// sum_k b(j0(k)) ||grad u^{k/2}||^2 <= c(n0) ||grad u||^2 + 6 sum_{n >= n0} n ||grad u_{n,n+1}||^2.
  InequalityRecord averaging(std::int64_t n0, double c_n0) const;

  /// d/2dt sum_n n ||u_{n,n+1}||^2 + nu sum_n n ||grad u_{n,n+1}||^2 against
  /// ||u||_X1 (||grad u||^2 + sum_n n ||grad u_{n,n+1}||^2); the ratio estimates C2.
  InequalityRecord c2_bound() const;

  /// Grid sup of |u| and |grad u| on a grid refined by the given factor.
  SupNorms sup_norms_refined(int factor) const;

 private:
  struct Sups {
    double value = 0.0;
    double gradient = 0.0;
  };
  Sups ball_sups(double k, bool refined) const;
  /// Absolute rounding level of a high-frequency transfer term for u^k.
  double roundoff_floor(double k, double scale) const;
  SpectralField masked(const BandMask& mask) const;
  double energy_where(const BandMask& mask, bool gradient) const;

  SpectralField u_;
  SpectralField rhs_;
  double viscosity_;
  double time_;
  ShellProfile profile_;
  double x1_ = 0.0;
  double norm_ = 0.0;
  double transfer_reference_ = 0.0;  // sup|u| ||grad u||_2
  std::vector<double> radial_energy_;      // sum |u_hat|^2 per |xi|^2
  std::vector<double> radial_transfer_;    // sum Re <du/dt, u_hat> per |xi|^2
  std::vector<double> radial_magnitude_;   // sum |du/dt| |u_hat| per |xi|^2
  mutable std::map<std::pair<double, bool>, Sups> sup_cache_;
};

InequalityRecord check_cancellation(const SpectralField& u, double k);
InequalityRecord check_high_frequency_energy(const SpectralField& u, double viscosity, double k);
SnapshotAnalysis::Bernstein check_bernstein(const SpectralField& u, double k);
std::vector<InequalityRecord> check_shell_bound(const SpectralField& u, double viscosity, double k);
std::vector<InequalityRecord> check_superposition(const SpectralField& u);
/// Largest annulus index n with lattice points at |xi| >= n.
std::int64_t lattice_shell_range(const Lattice& lattice);
/// Uses n0 from certify_b_sum_averaging over the lattice shell range and c(n0)
/// from averaging_constant.
InequalityRecord check_averaging(const SpectralField& u);

/// max_j sqrt(#{xi : 2^(j-1) <= |xi| < 2^j}) / 2^(3j/2) over the lattice shells.
double lattice_bernstein_constant(const Lattice& lattice);

struct SnapshotInput {
  std::string source;
  double time = 0.0;
  double viscosity = 0.0;
  SpectralField field;
};

struct SnapshotError {
  std::string source;
  std::string message;
};

struct DiagnosticsRun {
  std::vector<std::string> sources;
  SweepSpec sweep;
  std::vector<InequalityRecord> records;  ///< sorted by (t, k, name)
  std::vector<ConstantEstimate> constants;
  std::optional<SmallnessCertificate> scaling;  ///< uniform over all snapshot profiles
  std::vector<ShellProfile> profiles;
  std::vector<SnapshotError> errors;

  std::size_t failed_records() const;
  bool passed() const;  ///< no failed record, no snapshot error, scaling certificate passes
};

/// Incremental driver: feed snapshots one at a time, then finish().
class DiagnosticsAccumulator {
 public:
  explicit DiagnosticsAccumulator(SweepSpec sweep);

  void add(const SnapshotInput& snapshot);
  void add_error(SnapshotError error);
  DiagnosticsRun finish();

 private:
  DiagnosticsRun run_;
  std::map<std::int64_t, AveragingCertificate> averaging_;  // by shell range
  std::int64_t n0_ = 0;
  std::int64_t shell_range_ = 0;
  double c_n0_ = 0.0;
  double c0_lattice_ = 0.0;
  double sup_refinement_ = 0.0;
};

/// Every record and constant for a nonempty list of snapshots.
DiagnosticsRun run_diagnostics(const std::vector<SnapshotInput>& snapshots, const SweepSpec& sweep);

/// SHF1 files in a directory, sorted by file name; unreadable files are reported
/// as errors and skipped. Throws ParseError when the directory cannot be listed.
std::vector<std::string> list_snapshot_files(const std::string& directory);
DiagnosticsRun diagnose_directory(const std::string& directory, const SweepSpec& sweep);

}  // namespace supercrit
