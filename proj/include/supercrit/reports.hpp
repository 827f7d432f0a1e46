#pragma once

// JSON and CSV renderings of certificates and diagnostics. All number output
// is shortest round-trip, so identical inputs give byte-identical files.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "supercrit/diagnostics.hpp"
#include "supercrit/sequences.hpp"
#include "supercrit/shell_profile.hpp"

namespace supercrit {

using Json = nlohmann::ordered_json;

Json to_json(const SequenceReport& report);
Json averaged_bound_report(std::int64_t j_max);
Json sparse_count_report(std::int64_t n_max);
Json averaging_report(std::int64_t n_max);

Json to_json(const SmallnessCertificate& certificate);
Json to_json(const ConstantEstimate& constant);
Json constants_json(const DiagnosticsRun& run);
/// Certificate, error list, and record counts of a diagnostics run.
Json diagnostics_summary(const DiagnosticsRun& run);

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" otherwise).
std::string format_double(double value);

/// Header t,k,equation,lhs,rhs,ratio,pass then one row per record.
void write_records_csv(std::ostream& out, const std::vector<InequalityRecord>& records);

/// Writes text to a file, throwing ParseError when it cannot be opened.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace supercrit
