#include "supercrit/reports.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "supercrit/error.hpp"

namespace supercrit {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

Json to_json(const SequenceReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"index", v.index}, {"value", v.value}, {"bound", v.bound}});
  return {
      {"range", {report.range_lo, report.range_hi}},
      {"passed", report.passed()},
      {"violation_count", report.violation_count},
      {"violations", violations},
      {"max_ratio", report.max_ratio},
      {"argmax_ratio", report.argmax_ratio},
  };
}

Json averaged_bound_report(std::int64_t j_max) {
  Json anchors = Json::array();
  for (std::int64_t j = 1; j <= 6; ++j) anchors.push_back({{"j", j}, {"b", averaged_b(j)}});
  Json j = {{"check", "b(j) <= log2 j on bound windows, <= 2 elsewhere"}, {"j_max", j_max}};
  j["anchors"] = anchors;
  j["report"] = to_json(certify_averaged_bound(j_max));
  return j;
}

Json sparse_count_report(std::int64_t n_max) {
  Json j = {{"check", "|S(n)| <= (3L + 5) L / 2, L = log2 log2 n"}, {"n_max", n_max}};
  j["size_at_n_max"] = sparse_set_size(n_max);
  j["bound_at_n_max"] = sparse_count_bound(n_max);
  Json samples = Json::array();
  for (std::int64_t n : {10, 20, 100, 1000, 100000, 1000000})
    if (n <= n_max) samples.push_back({{"n", n}, {"size", sparse_set_size(n)}});
  j["samples"] = samples;
  j["report"] = to_json(certify_sparse_count(n_max));
  return j;
}

Json averaging_report(std::int64_t n_max) {
  const AveragingCertificate cert = certify_b_sum_averaging(n_max);
  Json j = {{"check", "sum_{k<=n} b(j0(2k)) <= 3n and sum_{k<=n} b(j0(2k+1)) <= 3n for n >= n0"},
            {"n_max", n_max}};
  j["n0"] = cert.n0;
  j["c_n0"] = averaging_constant(cert.n0);
  j["exceedances_before_n0"] = cert.exceedances_before_n0;
  j["first_exceedance"] = cert.first_exceedance;
  j["even_sum_at_n_max"] = cert.even_sum_at_nmax;
  j["odd_sum_at_n_max"] = cert.odd_sum_at_nmax;
  j["report"] = to_json(cert.report);
  return j;
}

Json to_json(const SmallnessCertificate& c) {
  Json levels = Json::array();
  for (const auto& l : c.checked_levels)
    levels.push_back({{"level", l.level}, {"x1_after_scaling", l.x1_after_scaling}, {"materialized", l.materialized}});
  return {
      {"epsilon", c.epsilon},   {"tail_cutoff", c.tail_cutoff},     {"l0", c.l0},  {"x1", c.x1},
      {"levels", levels},       {"range_limited", c.range_limited}, {"pass", c.pass},
  };
}

Json to_json(const ConstantEstimate& c) { return {{"name", c.name}, {"value", c.value}, {"sweep", c.sweep}}; }

Json constants_json(const DiagnosticsRun& run) {
  Json out = Json::array();
  for (const auto& c : run.constants) out.push_back(to_json(c));
  return out;
}

Json diagnostics_summary(const DiagnosticsRun& run) {
  Json errors = Json::array();
  for (const auto& e : run.errors) errors.push_back({{"source", e.source}, {"message", e.message}});
  Json j;
  j["snapshots"] = run.sources.size();
  j["records"] = run.records.size();
  j["failed_records"] = run.failed_records();
  j["errors"] = errors;
  j["scaling_certificate"] = run.scaling ? to_json(*run.scaling) : Json(nullptr);
  j["passed"] = run.passed();
  return j;
}

void write_records_csv(std::ostream& out, const std::vector<InequalityRecord>& records) {
  out << "t,k,equation,lhs,rhs,ratio,pass\n";
  for (const auto& r : records) {
    out << format_double(r.time) << ',' << format_double(r.k) << ',' << r.name << ',' << format_double(r.lhs) << ','
        << format_double(r.rhs) << ',' << format_double(r.ratio) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw ParseError("write failed for " + path);
}

}  // namespace supercrit
