#pragma once

/// @file sequences.hpp
/// @brief The sparse weight a(j), its dyadic running average b(j), the sparse
/// index set S(n), and exhaustive certifiers for the bounds they satisfy.
///
/// Windows sit around the tower indices 2^(2^k), k >= 1 (4, 16, 256, 65536, 2^32).
/// The weight window of generation k is [c-k, c+k]; the bound window used by
/// b(j) and S(n) is the wider [c-k, c+2k].

#include <cstdint>
#include <optional>
#include <vector>

namespace supercrit {

/// Largest index any certifier accepts (covers windows k <= 5).
inline constexpr std::int64_t kMaxCertifiedIndex = std::int64_t{1} << 40;

struct WindowIndex {
  int generation = 0;       ///< k
  std::int64_t center = 0;  ///< 2^(2^k)

  std::int64_t weight_lo() const { return center - generation; }
  std::int64_t weight_hi() const { return center + generation; }
  std::int64_t bound_lo() const { return center - generation; }
  std::int64_t bound_hi() const { return center + 2 * generation; }
};

/// Window generation whose weight window contains j, if any.
std::optional<WindowIndex> weight_window_of(std::int64_t j);
/// Window generation whose bound window contains j, if any.
std::optional<WindowIndex> bound_window_of(std::int64_t j);

/// a(j): log2 j inside a weight window, 1 elsewhere (including all j <= 0).
double weight_a(std::int64_t j);

/// b(j) by the streaming recurrence b(1) = 1/2, b(j+1) = (b(j) + a(j+1)) / 2.
/// O(j); use averaged_b_table for repeated lookups.
double averaged_b(std::int64_t j);

/// b(j) = 2^(-j-1) * sum_{i=1..j} 2^i a(i) evaluated directly. Only valid for
/// j <= 64; used to cross-check the recurrence.
double averaged_b_closed_sum(std::int64_t j);

/// Table t with t[j] = b(j) for 1 <= j <= j_max (t[0] is unused and zero).
std::vector<double> averaged_b_table(std::int64_t j_max);

/// Upper bound on b(j): log2 j inside a bound window, 2 elsewhere.
double averaged_b_bound(std::int64_t j);

struct Violation {
  std::int64_t index = 0;
  double value = 0.0;
  double bound = 0.0;
};

struct SequenceReport {
  std::int64_t range_lo = 0;
  std::int64_t range_hi = 0;
  /// First violations found (at most kMaxStoredViolations); violation_count is exact.
  std::vector<Violation> violations;
  std::int64_t violation_count = 0;
  double max_ratio = 0.0;        ///< max value/bound over the range
  std::int64_t argmax_ratio = 0;

  static constexpr std::size_t kMaxStoredViolations = 64;

  bool passed() const { return violation_count == 0; }
  void record(std::int64_t index, double value, double bound, bool violated);
};

/// Streams b(j) for 1 <= j <= j_max and checks it against averaged_b_bound with
/// relative slack 1e-9. Requires 4 <= j_max <= kMaxCertifiedIndex.
SequenceReport certify_averaged_bound(std::int64_t j_max);

/// S(n) in increasing order: indices l <= n lying in some bound window.
std::vector<std::int64_t> sparse_set_members(std::int64_t n);
/// |S(n)| without materializing the set.
std::int64_t sparse_set_size(std::int64_t n);
/// (3 L + 5) L / 2 with L = log2 log2 n.
double sparse_count_bound(std::int64_t n);

/// Checks |S(n)| <= sparse_count_bound(n) exactly for 3 <= n <= n_max.
SequenceReport certify_sparse_count(std::int64_t n_max);

/// j0(k) = ceil(log2 k) + 1 for real k >= 1, computed without rounding error.
int cutoff_shell_index(double k);

struct AveragingCertificate {
  /// Smallest n0 such that both partial sums stay <= 3n for every n0 <= n <= n_max.
  std::int64_t n0 = 1;
  /// Number of n < n0 where one of the sums exceeded 3n.
  std::int64_t exceedances_before_n0 = 0;
  /// Smallest n where one of the sums exceeds 3n (0 if none up to n_max).
  std::int64_t first_exceedance = 0;
  /// Checks over [n0, n_max]; violations there are impossible by the choice of
  /// n0, so the report fails only when no such n0 <= n_max exists.
  SequenceReport report;
  double even_sum_at_nmax = 0.0;
  double odd_sum_at_nmax = 0.0;
};

/// Accumulates sum_{k<=n} b(j0(2k)) and sum_{k<=n} b(j0(2k+1)) against 3n.
AveragingCertificate certify_b_sum_averaging(std::int64_t n_max);

/// c(n0) = 2 * sum_{k=1..n0} (b(j0(2k)) + b(j0(2k+1))) + 1, an explicit constant
/// admissible in the averaging bound over the lattice shells.
double averaging_constant(std::int64_t n0);

}  // namespace supercrit
