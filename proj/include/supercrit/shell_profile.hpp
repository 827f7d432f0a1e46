#pragma once

/// @file shell_profile.hpp
/// @brief Dyadic shell magnitudes sigma_j = ||Delta_j v||_2 and the norms built on
/// them: the shell-sum Sobolev norm, the sparse-weight X1 norm, exact dyadic
/// rescaling, and the rescaling-smallness certificate.
///
/// Magnitudes are stored premultiplied by 2^(j/2) ("critical amplitudes"
/// w_j = 2^(j/2) sigma_j). Critical amplitudes are invariant under dyadic
/// rescaling, so shifts by m = 2^32 stay representable even though the raw
/// magnitude 2^(-m/2) sigma underflows.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace supercrit {

class ShellProfile {
 public:
  ShellProfile() = default;

  /// Sets sigma_j. Zero erases the entry; negative or non-finite values throw.
  void set_magnitude(std::int64_t j, double sigma);
  /// Sets w_j = 2^(j/2) sigma_j directly.
  void set_critical_amplitude(std::int64_t j, double amplitude);

  /// sigma_j; may underflow to zero for very large j.
  double magnitude(std::int64_t j) const;
  double critical_amplitude(std::int64_t j) const;

  /// Nonzero entries keyed by shell index.
  const std::map<std::int64_t, double>& critical_amplitudes() const { return amplitudes_; }

  bool empty() const { return amplitudes_.empty(); }
  std::size_t size() const { return amplitudes_.size(); }

  friend bool operator==(const ShellProfile&, const ShellProfile&) = default;

 private:
  std::map<std::int64_t, double> amplitudes_;
};

/// A dyadic rescaling v -> lambda v(lambda .) with lambda = 2^shift.
struct ScalingParams {
  std::int64_t shift = 0;  ///< m

  /// The tower shift m = 2^(2^level); level <= kMaxMaterializedLevel.
  static ScalingParams tower(int level);
};

/// Largest tower level whose shift fits a 64-bit shell index.
inline constexpr int kMaxMaterializedLevel = 5;
/// Largest level evaluated by the closed-form tower route.
inline constexpr int kMaxTowerLevel = 62;

/// (sum_j 2^(2sj) sigma_j^2)^(1/2).
double shell_sobolev_norm(const ShellProfile& p, double s);
/// (sum_j 2^j a(j)^-2 sigma_j^2)^(1/2).
double x1_norm(const ShellProfile& p);
/// Unweighted (sum_j sigma_j^2)^(1/2).
double plain_l2_norm(const ShellProfile& p);

/// sigma'_j = 2^(-m/2) sigma_{j-m}. Throws InvalidInput if a shifted index overflows.
ShellProfile scale_profile(const ShellProfile& p, ScalingParams params);

/// X1 norm of the profile shifted by m = 2^(2^level), evaluated without
/// materializing shifted indices. For level <= kMaxMaterializedLevel this equals
/// x1_norm(scale_profile(p, ScalingParams::tower(level))).
double tower_x1_norm(const ShellProfile& p, int level);

/// Smallest M >= 1 with sum_{|j| >= M} 2^j sigma_j^2 <= epsilon^2 / 2.
std::int64_t find_tail_cutoff(const ShellProfile& p, double epsilon);

/// max{M + 1, ceil(log2(max(1, log2 max(2, M)) * x1 / epsilon)) + 1}.
std::int64_t l0_threshold(std::int64_t tail_cutoff, double x1, double epsilon);

struct LevelCheck {
  int level = 0;
  double x1_after_scaling = 0.0;
  bool materialized = false;  ///< evaluated via scale_profile + x1_norm
};

struct SmallnessCertificate {
  double epsilon = 0.0;
  std::int64_t tail_cutoff = 0;  ///< M
  std::int64_t l0 = 0;
  double x1 = 0.0;  ///< X1 norm (max over profiles for the uniform variant)
  std::vector<LevelCheck> checked_levels;
  bool range_limited = false;
  bool pass = true;
};

/// Certifies ||lambda v(lambda .)||_X1 <= epsilon at levels l0 .. l0 + extra_levels.
SmallnessCertificate verify_scaling_smallness(const ShellProfile& p, double epsilon, int extra_levels = 3);

/// One M and one l0 for every profile of a time series, then the same check on each.
SmallnessCertificate verify_scaling_smallness_uniform(const std::vector<ShellProfile>& profiles,
                                                      double epsilon, int extra_levels = 3);

/// Reads the "j<TAB>sigma" text format; '#' lines and blank lines are skipped.
ShellProfile read_profile(std::istream& in);
ShellProfile read_profile_file(const std::string& path);
void write_profile(std::ostream& out, const ShellProfile& p);

/// Random profile with support in [lo, hi]: each index kept with probability 1/2,
/// critical amplitude U * 2^-|j| with U uniform in [0, 1).
ShellProfile random_decaying_profile(std::mt19937_64& rng, std::int64_t lo = -30, std::int64_t hi = 30);

}  // namespace supercrit
