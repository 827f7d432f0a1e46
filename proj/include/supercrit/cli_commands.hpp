#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace supercrit::cli {

enum ExitCode : int { kPass = 0, kViolations = 1, kUsageError = 2 };

struct CertifyOptions {
  std::int64_t j_max = std::int64_t{1} << 20;
  std::int64_t n_max = 1000000;
  std::int64_t sum_n_max = 100000;
  std::string out;  ///< directory; empty prints one combined document to stdout
};

struct ScalingOptions {
  std::optional<std::string> profile;
  std::optional<int> random_count;
  std::uint64_t seed = 0;
  double epsilon = 0.1;
  int extra_levels = 3;
  std::string out;  ///< file; empty prints to stdout
};

struct SimulateOptions {
  std::string config;
  std::optional<std::string> out_dir;  ///< overrides the config's out_dir
};

struct DiagnoseOptions {
  std::string snapshots;
  std::optional<double> k_max;  ///< defaults to the dealias radius
  double epsilon = 0.1;
  int extra_levels = 3;
  std::string out;  ///< directory; empty prints the summary only
};

int certify_sequences(const CertifyOptions& options, std::ostream& out, std::ostream& log);
int verify_scaling(const ScalingOptions& options, std::ostream& out, std::ostream& log);
int simulate(const SimulateOptions& options, std::ostream& out, std::ostream& log);
int diagnose(const DiagnoseOptions& options, std::ostream& out, std::ostream& log);

/// Parses argv and dispatches to a subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace supercrit::cli
