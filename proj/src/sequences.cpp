#include "supercrit/sequences.hpp"

#include <cmath>
#include <string>

#include "supercrit/error.hpp"

namespace supercrit {
namespace {

// Generations whose center 2^(2^k) fits a signed 64-bit index. The next center,
// 2^64, lies beyond every representable j.
constexpr int kMaxGeneration = 5;

constexpr std::int64_t tower_center(int k) { return std::int64_t{1} << (1 << k); }

constexpr double kBoundSlack = 1e-9;

void require_range(std::int64_t value, std::int64_t lo, const char* name) {
  if (value < lo || value > kMaxCertifiedIndex) {
    throw InvalidInput(std::string(name) + " must lie in [" + std::to_string(lo) + ", 2^40], got " +
                       std::to_string(value));
  }
}

}  // namespace

std::optional<WindowIndex> weight_window_of(std::int64_t j) {
  for (int k = 1; k <= kMaxGeneration; ++k) {
    const WindowIndex w{k, tower_center(k)};
    if (j < w.weight_lo()) break;
    if (j <= w.weight_hi()) return w;
  }
  return std::nullopt;
}

std::optional<WindowIndex> bound_window_of(std::int64_t j) {
  for (int k = 1; k <= kMaxGeneration; ++k) {
    const WindowIndex w{k, tower_center(k)};
    if (j < w.bound_lo()) break;
    if (j <= w.bound_hi()) return w;
  }
  return std::nullopt;
}

double weight_a(std::int64_t j) {
  return weight_window_of(j) ? std::log2(static_cast<double>(j)) : 1.0;
}

double averaged_b(std::int64_t j) {
  if (j < 1) throw InvalidInput("averaged_b requires j >= 1");
  double b = 0.5;
  for (std::int64_t i = 2; i <= j; ++i) b = 0.5 * (b + weight_a(i));
  return b;
}

double averaged_b_closed_sum(std::int64_t j) {
  if (j < 1 || j > 64) throw InvalidInput("closed-sum b(j) is only evaluated for 1 <= j <= 64");
  double sum = 0.0;
  for (std::int64_t i = 1; i <= j; ++i) sum += std::ldexp(weight_a(i), static_cast<int>(i));
  return std::ldexp(sum, static_cast<int>(-j - 1));
}

std::vector<double> averaged_b_table(std::int64_t j_max) {
  if (j_max < 1) throw InvalidInput("averaged_b_table requires j_max >= 1");
  std::vector<double> table(static_cast<std::size_t>(j_max) + 1, 0.0);
  table[1] = 0.5;
  for (std::int64_t i = 2; i <= j_max; ++i) table[i] = 0.5 * (table[i - 1] + weight_a(i));
  return table;
}

double averaged_b_bound(std::int64_t j) {
  return bound_window_of(j) ? std::log2(static_cast<double>(j)) : 2.0;
}

void SequenceReport::record(std::int64_t index, double value, double bound, bool violated) {
  const double ratio = bound > 0.0 ? value / bound : (value > 0.0 ? INFINITY : 0.0);
  if (argmax_ratio == 0 || ratio > max_ratio) {
    max_ratio = ratio;
    argmax_ratio = index;
  }
  if (violated) {
    ++violation_count;
    if (violations.size() < kMaxStoredViolations) violations.push_back({index, value, bound});
  }
}

SequenceReport certify_averaged_bound(std::int64_t j_max) {
  require_range(j_max, 4, "j_max");
  SequenceReport report;
  report.range_lo = 4;
  report.range_hi = j_max;
  double b = 0.5;
  for (std::int64_t j = 2; j <= j_max; ++j) {
    b = 0.5 * (b + weight_a(j));
    if (j < 4) continue;
    const double bound = averaged_b_bound(j);
    report.record(j, b, bound, b > bound * (1.0 + kBoundSlack));
  }
  return report;
}

std::vector<std::int64_t> sparse_set_members(std::int64_t n) {
  std::vector<std::int64_t> members;
  for (int k = 1; k <= kMaxGeneration; ++k) {
    const WindowIndex w{k, tower_center(k)};
    if (w.bound_lo() > n) break;
    const std::int64_t hi = std::min(n, w.bound_hi());
    for (std::int64_t l = std::max<std::int64_t>(1, w.bound_lo()); l <= hi; ++l) members.push_back(l);
  }
  return members;
}

std::int64_t sparse_set_size(std::int64_t n) {
  std::int64_t count = 0;
  for (int k = 1; k <= kMaxGeneration; ++k) {
    const WindowIndex w{k, tower_center(k)};
    if (w.bound_lo() > n) break;
    count += std::min(n, w.bound_hi()) - std::max<std::int64_t>(1, w.bound_lo()) + 1;
  }
  return count;
}

double sparse_count_bound(std::int64_t n) {
  const double loglog = std::log2(std::log2(static_cast<double>(n)));
  return (3.0 * loglog + 5.0) * loglog / 2.0;
}

SequenceReport certify_sparse_count(std::int64_t n_max) {
  require_range(n_max, 3, "n_max");
  SequenceReport report;
  report.range_lo = 3;
  report.range_hi = n_max;
  std::int64_t size = 0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (bound_window_of(n)) ++size;
    if (n < 3) continue;
    const double bound = sparse_count_bound(n);
    const double value = static_cast<double>(size);
    report.record(n, value, bound, value > bound);
  }
  return report;
}

int cutoff_shell_index(double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) throw InvalidInput("j0(k) requires finite k >= 1");
  int exponent = 0;
  const double mantissa = std::frexp(k, &exponent);  // k = mantissa * 2^exponent, mantissa in [1/2, 1)
  const int ceil_log2 = mantissa == 0.5 ? exponent - 1 : exponent;
  return ceil_log2 + 1;
}

AveragingCertificate certify_b_sum_averaging(std::int64_t n_max) {
  require_range(n_max, 1, "n_max");
  const auto b = averaged_b_table(cutoff_shell_index(2.0 * static_cast<double>(n_max) + 1.0));

  // First pass: locate the last n where either sum exceeds 3n.
  std::int64_t first_exceedance = 0, last_exceedance = 0;
  std::int64_t exceedances = 0, worst_n = 1;
  double even = 0.0, odd = 0.0, worst = 0.0, worst_ratio = 0.0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    even += b[cutoff_shell_index(2.0 * n)];
    odd += b[cutoff_shell_index(2.0 * n + 1.0)];
    if (std::max(even, odd) / (3.0 * n) > worst_ratio) {
      worst = std::max(even, odd);
      worst_ratio = worst / (3.0 * n);
      worst_n = n;
    }
    if (even > 3.0 * n || odd > 3.0 * n) {
      if (first_exceedance == 0) first_exceedance = n;
      last_exceedance = n;
      ++exceedances;
    }
  }

  AveragingCertificate cert;
  cert.n0 = last_exceedance + 1;
  cert.exceedances_before_n0 = exceedances;
  cert.first_exceedance = first_exceedance;
  cert.even_sum_at_nmax = even;
  cert.odd_sum_at_nmax = odd;
  cert.report.range_lo = cert.n0;
  cert.report.range_hi = n_max;
  if (cert.n0 > n_max) {
    cert.report.record(worst_n, worst, 3.0 * worst_n, true);
    return cert;
  }

  // Second pass re-verifies the tail [n0, n_max] and records the worst ratio.
  even = odd = 0.0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    even += b[cutoff_shell_index(2.0 * n)];
    odd += b[cutoff_shell_index(2.0 * n + 1.0)];
    if (n < cert.n0) continue;
    const double worst = std::max(even, odd);
    cert.report.record(n, worst, 3.0 * n, worst > 3.0 * n);
  }
  return cert;
}

double averaging_constant(std::int64_t n0) {
  if (n0 < 1) throw InvalidInput("averaging_constant requires n0 >= 1");
  const auto b = averaged_b_table(cutoff_shell_index(2.0 * static_cast<double>(n0) + 1.0));
  double sum = 0.0;
  for (std::int64_t k = 1; k <= n0; ++k) {
    sum += b[cutoff_shell_index(2.0 * k)] + b[cutoff_shell_index(2.0 * k + 1.0)];
  }
  return 2.0 * sum + 1.0;
}

}  // namespace supercrit
