#include "supercrit/shell_profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "supercrit/error.hpp"
#include "supercrit/sequences.hpp"

namespace supercrit {
namespace {

int clamp_exponent(std::int64_t e) {
  return static_cast<int>(std::clamp<std::int64_t>(e, -100000, 100000));
}

// value * 2^(j/2), exact for even j.
double scale_by_half_power(double value, std::int64_t j) {
  if (j % 2 == 0) return std::ldexp(value, clamp_exponent(j / 2));
  return std::ldexp(value * std::numbers::sqrt2, clamp_exponent((j - 1) / 2));
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

void ShellProfile::set_magnitude(std::int64_t j, double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidInput("shell magnitude must be finite and >= 0");
  set_critical_amplitude(j, scale_by_half_power(sigma, j));
}

void ShellProfile::set_critical_amplitude(std::int64_t j, double amplitude) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw InvalidInput("critical amplitude must be finite and >= 0");
  }
  if (amplitude == 0.0) {
    amplitudes_.erase(j);
  } else {
    amplitudes_[j] = amplitude;
  }
}

double ShellProfile::magnitude(std::int64_t j) const {
  const auto it = amplitudes_.find(j);
  if (it == amplitudes_.end()) return 0.0;
  return scale_by_half_power(it->second, -j);
}

double ShellProfile::critical_amplitude(std::int64_t j) const {
  const auto it = amplitudes_.find(j);
  return it == amplitudes_.end() ? 0.0 : it->second;
}

ScalingParams ScalingParams::tower(int level) {
  if (level < 0 || level > kMaxMaterializedLevel) {
    throw InvalidInput("tower level must lie in [0, 5] for a materialized shift");
  }
  return ScalingParams{std::int64_t{1} << (1 << level)};
}

double shell_sobolev_norm(const ShellProfile& p, double s) {
  double sum = 0.0;
  for (const auto& [j, w] : p.critical_amplitudes()) {
    sum += std::exp2((2.0 * s - 1.0) * static_cast<double>(j)) * w * w;
  }
  return std::sqrt(sum);
}

double x1_norm(const ShellProfile& p) {
  double sum = 0.0;
  for (const auto& [j, w] : p.critical_amplitudes()) {
    const double weighted = w / weight_a(j);
    sum += weighted * weighted;
  }
  return std::sqrt(sum);
}

double plain_l2_norm(const ShellProfile& p) {
  double sum = 0.0;
  for (const auto& [j, w] : p.critical_amplitudes()) {
    const double sigma = p.magnitude(j);
    sum += sigma * sigma;
  }
  return std::sqrt(sum);
}

ShellProfile scale_profile(const ShellProfile& p, ScalingParams params) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
  ShellProfile out;
  for (const auto& [j, w] : p.critical_amplitudes()) {
    if ((params.shift > 0 && j > kMax - params.shift) || (params.shift < 0 && j < kMin - params.shift)) {
      throw InvalidInput("scaled shell index overflows the 64-bit index range");
    }
    out.set_critical_amplitude(j + params.shift, w);
  }
  return out;
}

double tower_x1_norm(const ShellProfile& p, int level) {
  if (level < 0 || level > kMaxTowerLevel) throw InvalidInput("tower level out of range");
  double sum = 0.0;
  if (level <= kMaxMaterializedLevel) {
    const std::int64_t shift = ScalingParams::tower(level).shift;
    for (const auto& [j, w] : p.critical_amplitudes()) {
      // Indices pushed past 2^63 sit beyond every window (the last is near 2^32).
      const double a = j > std::numeric_limits<std::int64_t>::max() - shift ? 1.0 : weight_a(j + shift);
      sum += (w / a) * (w / a);
    }
  } else {
    // For level >= 6 the shift 2^(2^level) exceeds 2^64. A shifted 64-bit index
    // j + 2^(2^level) lands in the weight window of generation `level` iff
    // |j| <= level, where log2(j + 2^(2^level)) rounds to 2^level exactly; every
    // other window is out of reach.
    const double window_weight = std::ldexp(1.0, level);
    for (const auto& [j, w] : p.critical_amplitudes()) {
      const double a = (j >= -level && j <= level) ? window_weight : 1.0;
      sum += (w / a) * (w / a);
    }
  }
  return std::sqrt(sum);
}

std::int64_t find_tail_cutoff(const ShellProfile& p, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  const double threshold = epsilon * epsilon / 2.0;

  std::map<std::int64_t, double, std::greater<>> by_radius;  // |j| -> sum of w_j^2
  for (const auto& [j, w] : p.critical_amplitudes()) {
    if (j == 0) continue;  // never inside a tail |j| >= M >= 1
    const std::int64_t r = j == std::numeric_limits<std::int64_t>::min() ? std::numeric_limits<std::int64_t>::max()
                                                                          : (j < 0 ? -j : j);
    by_radius[r] += w * w;
  }
  // tail(M) only changes at M = |j|; walk radii from the outside in.
  double tail = 0.0;
  for (const auto& [r, energy] : by_radius) {
    tail += energy;
    if (tail > threshold) return r == std::numeric_limits<std::int64_t>::max() ? r : r + 1;
  }
  return 1;
}

std::int64_t l0_threshold(std::int64_t tail_cutoff, double x1, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  const std::int64_t first = tail_cutoff + 1;
  if (!(x1 > 0.0)) return first;
  const double log_cutoff = std::max(1.0, std::log2(std::max(2.0, static_cast<double>(tail_cutoff))));
  const double second = std::ceil(std::log2(log_cutoff * x1 / epsilon)) + 1.0;
  return std::max(first, static_cast<std::int64_t>(second));
}

namespace {

SmallnessCertificate check_levels(const std::vector<const ShellProfile*>& profiles, double epsilon,
                                  int extra_levels, std::int64_t cutoff, double x1) {
  SmallnessCertificate cert;
  cert.epsilon = epsilon;
  cert.tail_cutoff = cutoff;
  cert.x1 = x1;
  cert.l0 = l0_threshold(cutoff, x1, epsilon);
  for (std::int64_t level = cert.l0; level <= cert.l0 + extra_levels; ++level) {
    if (level > kMaxTowerLevel) {
      cert.range_limited = true;
      break;
    }
    LevelCheck check;
    check.level = static_cast<int>(level);
    check.materialized = level <= kMaxMaterializedLevel;
    for (const ShellProfile* p : profiles) {
      const double value = check.materialized
                               ? x1_norm(scale_profile(*p, ScalingParams::tower(check.level)))
                               : tower_x1_norm(*p, check.level);
      check.x1_after_scaling = std::max(check.x1_after_scaling, value);
    }
    if (check.x1_after_scaling > epsilon) cert.pass = false;
    cert.checked_levels.push_back(check);
  }
  return cert;
}

}  // namespace

SmallnessCertificate verify_scaling_smallness(const ShellProfile& p, double epsilon, int extra_levels) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (extra_levels < 0) throw InvalidInput("extra_levels must be >= 0");
  return check_levels({&p}, epsilon, extra_levels, find_tail_cutoff(p, epsilon), x1_norm(p));
}

SmallnessCertificate verify_scaling_smallness_uniform(const std::vector<ShellProfile>& profiles,
                                                      double epsilon, int extra_levels) {
  if (profiles.empty()) throw InvalidInput("uniform smallness needs at least one profile");
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (extra_levels < 0) throw InvalidInput("extra_levels must be >= 0");
  std::vector<const ShellProfile*> refs;
  std::int64_t cutoff = 1;
  double x1 = 0.0;
  for (const auto& p : profiles) {
    refs.push_back(&p);
    cutoff = std::max(cutoff, find_tail_cutoff(p, epsilon));
    x1 = std::max(x1, x1_norm(p));
  }
  return check_levels(refs, epsilon, extra_levels, cutoff, x1);
}

ShellProfile read_profile(std::istream& in) {
  ShellProfile p;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto sep = text.find_first_of(" \t");
    if (sep == std::string_view::npos) throw ParseError("expected \"j<TAB>sigma\"", line_no);
    const std::string_view index_text = text.substr(0, sep);
    const std::string_view sigma_text = trim(text.substr(sep));

    std::int64_t j = 0;
    auto [ip, iec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), j);
    if (iec != std::errc{} || ip != index_text.data() + index_text.size()) {
      throw ParseError("bad shell index '" + std::string(index_text) + "'", line_no);
    }
    double sigma = 0.0;
    auto [sp, sec] = std::from_chars(sigma_text.data(), sigma_text.data() + sigma_text.size(), sigma);
    if (sec != std::errc{} || sp != sigma_text.data() + sigma_text.size()) {
      throw ParseError("bad magnitude '" + std::string(sigma_text) + "'", line_no);
    }
    if (!std::isfinite(sigma) || sigma < 0.0) throw ParseError("magnitude must be finite and >= 0", line_no);
    if (p.critical_amplitude(j) != 0.0) throw ParseError("duplicate shell index", line_no);
    p.set_magnitude(j, sigma);
  }
  return p;
}

ShellProfile read_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open profile file " + path);
  return read_profile(in);
}

void write_profile(std::ostream& out, const ShellProfile& p) {
  char buf[64];
  for (const auto& [j, w] : p.critical_amplitudes()) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p.magnitude(j));
    out << j << '\t' << std::string_view(buf, end - buf) << '\n';
  }
}

ShellProfile random_decaying_profile(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  ShellProfile p;
  for (std::int64_t j = lo; j <= hi; ++j) {
    const bool keep = (rng() >> 63) != 0;
    const double u = unit_uniform(rng);
    if (keep) p.set_critical_amplitude(j, std::ldexp(u, static_cast<int>(-(j < 0 ? -j : j))));
  }
  return p;
}

}  // namespace supercrit
