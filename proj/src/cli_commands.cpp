#include "supercrit/cli_commands.hpp"

#include <filesystem>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "supercrit/diagnostics.hpp"
#include "supercrit/error.hpp"
#include "supercrit/nse_sim.hpp"
#include "supercrit/reports.hpp"
#include "supercrit/shell_profile.hpp"

namespace supercrit::cli {

namespace {

void emit(const Json& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    write_text_file(path, doc.dump(2));
  }
}

// Runs a subcommand body, mapping precondition and IO failures to exit code 2.
template <typename F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const InvalidInput& e) {
    log << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
  }
  return kUsageError;
}

}  // namespace

int certify_sequences(const CertifyOptions& o, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    if (o.j_max < 4 || o.j_max > kMaxCertifiedIndex) throw InvalidInput("--jmax must lie in [4, 2^40]");
    if (o.n_max < 3 || o.n_max > kMaxCertifiedIndex) throw InvalidInput("--nmax must lie in [3, 2^40]");
    if (o.sum_n_max < 1 || o.sum_n_max > kMaxCertifiedIndex) throw InvalidInput("--sum-nmax must lie in [1, 2^40]");

    const Json averaged = averaged_bound_report(o.j_max);
    const Json sparse = sparse_count_report(o.n_max);
    const Json averaging = averaging_report(o.sum_n_max);
    const bool pass = averaged["report"]["passed"].get<bool>() && sparse["report"]["passed"].get<bool>() &&
                      averaging["report"]["passed"].get<bool>();

    if (o.out.empty()) {
      Json all;
      all["averaged_bound"] = averaged;
      all["sparse_count"] = sparse;
      all["b_sum_averaging"] = averaging;
      all["passed"] = pass;
      out << all.dump(2) << '\n';
    } else {
      std::filesystem::create_directories(o.out);
      const std::filesystem::path dir(o.out);
      write_text_file((dir / "averaged_bound.json").string(), averaged.dump(2));
      write_text_file((dir / "sparse_count.json").string(), sparse.dump(2));
      write_text_file((dir / "b_sum_averaging.json").string(), averaging.dump(2));
    }
    log << "averaged bound j <= " << o.j_max << ": " << (averaged["report"]["passed"].get<bool>() ? "pass" : "FAIL")
        << "\nsparse count n <= " << o.n_max << ": " << (sparse["report"]["passed"].get<bool>() ? "pass" : "FAIL")
        << "\nb-sum averaging n <= " << o.sum_n_max << ": n0 = " << averaging["n0"].get<std::int64_t>() << ", "
        << (averaging["report"]["passed"].get<bool>() ? "pass" : "FAIL") << '\n';
    return pass ? kPass : kViolations;
  });
}

int verify_scaling(const ScalingOptions& o, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    if (!(o.epsilon > 0.0)) throw InvalidInput("--epsilon must be positive");
    if (o.extra_levels < 0) throw InvalidInput("--extra-levels must be nonnegative");
    if (o.profile.has_value() == o.random_count.has_value())
      throw InvalidInput("give exactly one of --profile or --random");

    std::vector<std::pair<std::string, ShellProfile>> profiles;
    if (o.profile) {
      profiles.emplace_back(*o.profile, read_profile_file(*o.profile));
    } else {
      if (*o.random_count < 1) throw InvalidInput("--random must be positive");
      std::mt19937_64 rng(o.seed);
      for (int i = 0; i < *o.random_count; ++i)
        profiles.emplace_back("random:" + std::to_string(i), random_decaying_profile(rng));
    }

    Json list = Json::array();
    std::size_t failed = 0;
    for (const auto& [source, profile] : profiles) {
      const SmallnessCertificate cert = verify_scaling_smallness(profile, o.epsilon, o.extra_levels);
      if (!cert.pass) ++failed;
      list.push_back({{"source", source}, {"certificate", to_json(cert)}});
    }
    Json doc;
    doc["epsilon"] = o.epsilon;
    doc["extra_levels"] = o.extra_levels;
    if (o.random_count) doc["seed"] = o.seed;
    doc["profiles"] = list;
    doc["passed"] = failed == 0;
    emit(doc, o.out, out);
    log << profiles.size() - failed << "/" << profiles.size() << " profiles certified at epsilon " << o.epsilon
        << '\n';
    return failed == 0 ? kPass : kViolations;
  });
}

int simulate(const SimulateOptions& o, std::ostream& out, std::ostream& log) {
  return guarded(log, [&]() -> int {
    SimConfig config = load_sim_config(o.config);
    if (o.out_dir) config.out_dir = *o.out_dir;
    config.validate();
    try {
      const RunSummary summary = run_to_directory(config);
      if (summary.dt_exceeds_stability_bound)
        log << "warning: dt = " << config.dt << " exceeds the advective stability bound "
            << summary.dt_stability_bound << '\n';
      log << summary.steps << " steps, " << summary.snapshot_files.size() << " snapshots in " << config.out_dir
          << ", energy " << summary.energies.front() << " -> " << summary.energies.back()
          << ", balance residual " << summary.energy_balance_residual << '\n';
      out << (std::filesystem::path(config.out_dir) / "summary.json").string() << '\n';
      if (!summary.energy_monotone) {
        log << "energy increased by " << summary.max_relative_energy_increase << " relative in one step\n";
        return kViolations;
      }
      return kPass;
    } catch (const BlowUp& e) {
      Json report = {{"blow_up", e.what()}, {"time", e.time()}, {"step", e.step()}};
      std::filesystem::create_directories(config.out_dir);
      write_text_file((std::filesystem::path(config.out_dir) / "blowup.json").string(), report.dump(2));
      log << "blow-up at step " << e.step() << " (t = " << e.time() << "): " << e.what() << '\n';
      return kViolations;
    }
  });
}

int diagnose(const DiagnoseOptions& o, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    if (!(o.epsilon > 0.0)) throw InvalidInput("--epsilon must be positive");
    SweepSpec sweep;
    if (o.k_max) {
      if (!(*o.k_max >= 1.0)) throw InvalidInput("--kmax must be at least 1");
      sweep = SweepSpec::up_to(*o.k_max);
    }
    sweep.epsilon = o.epsilon;
    sweep.extra_levels = o.extra_levels;
    const DiagnosticsRun run = diagnose_directory(o.snapshots, sweep);

    Json summary = diagnostics_summary(run);
    summary["constants"] = constants_json(run);
    if (o.out.empty()) {
      out << summary.dump(2) << '\n';
    } else {
      std::filesystem::create_directories(o.out);
      const std::filesystem::path dir(o.out);
      std::ostringstream csv;
      write_records_csv(csv, run.records);
      write_text_file((dir / "records.csv").string(), csv.str());
      write_text_file((dir / "constants.json").string(), constants_json(run).dump(2));
      write_text_file((dir / "summary.json").string(), summary.dump(2));
    }
    for (const auto& e : run.errors) log << "error: " << e.source << ": " << e.message << '\n';
    log << run.sources.size() << " snapshots, " << run.records.size() << " records, " << run.failed_records()
        << " failed\n";
    if (!run.errors.empty()) return kUsageError;
    return run.passed() ? kPass : kViolations;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  CLI::App app{"Supercritical-space certification and Navier-Stokes inequality diagnostics", "supercrit"};
  app.require_subcommand(1);

  CertifyOptions certify;
  auto* c = app.add_subcommand("certify-sequences", "Certify the weight-sequence lemmas");
  c->add_option("--jmax", certify.j_max, "Largest j for the averaged-sequence bound");
  c->add_option("--nmax", certify.n_max, "Largest n for the sparse-set count");
  c->add_option("--sum-nmax", certify.sum_n_max, "Largest n for the b-sum averaging");
  c->add_option("--out", certify.out, "Output directory for the JSON reports");

  ScalingOptions scaling;
  std::string profile;
  int random_count = 0;
  auto* v = app.add_subcommand("verify-scaling", "Certify smallness of tower-rescaled shell profiles");
  auto* profile_opt = v->add_option("--profile", profile, "Shell profile file (j<TAB>sigma per line)");
  auto* random_opt = v->add_option("--random", random_count, "Number of seeded random profiles");
  profile_opt->excludes(random_opt);
  v->add_option("--seed", scaling.seed, "Seed for --random");
  v->add_option("--epsilon", scaling.epsilon, "Smallness target");
  v->add_option("--extra-levels", scaling.extra_levels, "Levels checked beyond l0");
  v->add_option("--out", scaling.out, "Output JSON file");

  SimulateOptions sim;
  std::string sim_out;
  auto* s = app.add_subcommand("simulate", "Integrate the Navier-Stokes equations from a JSON config");
  s->add_option("--config", sim.config, "JSON config")->required();
  s->add_option("--out", sim_out, "Output directory (overrides out_dir)");

  DiagnoseOptions diag;
  double k_max = 0.0;
  auto* d = app.add_subcommand("diagnose", "Evaluate the high-frequency inequality suite on snapshots");
  d->add_option("--snapshots", diag.snapshots, "Directory of SHF1 snapshots")->required();
  auto* kmax_opt = d->add_option("--kmax", k_max, "Largest shell index k");
  d->add_option("--epsilon", diag.epsilon, "Smallness target for the snapshot profiles");
  d->add_option("--extra-levels", diag.extra_levels, "Levels checked beyond l0");
  d->add_option("--out", diag.out, "Output directory for records.csv, constants.json, summary.json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsageError;
  }

  if (c->parsed()) return certify_sequences(certify, out, log);
  if (v->parsed()) {
    if (*profile_opt) scaling.profile = profile;
    if (*random_opt) scaling.random_count = random_count;
    return verify_scaling(scaling, out, log);
  }
  if (s->parsed()) {
    if (!sim_out.empty()) sim.out_dir = sim_out;
    return simulate(sim, out, log);
  }
  if (*kmax_opt) diag.k_max = k_max;
  return diagnose(diag, out, log);
}

}  // namespace supercrit::cli
