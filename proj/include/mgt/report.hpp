#pragma once

#include "mgt/fit.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mgt {

enum class OutputFormat { csv, json };

OutputFormat output_format_from_string(const std::string& s);

/// Shortest round-trip decimal representation, '.' separator, independent of locale.
std::string format_double(double v);

struct ReportContext {
    int n = 1;
    double p = 2.0;
    double beta = 1.0;
    double R = 1.0;
};

/// Writes lifespan.{csv,json}, fits.json, trace_<k>.{csv,json}, envelopes.{csv,json} and
/// summary.txt into out_dir. Throws std::runtime_error with the offending path on I/O failure.
void emit_report(const std::vector<LifespanRecord>& records, const std::vector<FitResult>& fits,
                 const std::vector<FunctionalTrace>& traces, const std::filesystem::path& out_dir,
                 OutputFormat format, const ReportContext& ctx);

void write_lifespan_csv(const std::vector<LifespanRecord>& records,
                        const std::filesystem::path& path);
/// Reads eps, T_num, reason and dt back.
std::vector<LifespanRecord> read_lifespan_csv(const std::filesystem::path& path);

/// Envelope columns on the records' eps grid: the measured T, the subcritical law
/// calibrated on the largest-eps blow-up, and the sharp law calibrated the same way.
struct EnvelopeRow {
    double eps = 0.0;
    std::optional<double> T_num;
    std::optional<double> theorem_envelope;
    std::optional<double> sharp_envelope;
};
std::vector<EnvelopeRow> calibrated_envelopes(const std::vector<LifespanRecord>& records,
                                              const ReportContext& ctx);

} // namespace mgt
