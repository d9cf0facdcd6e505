#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "codesum/metrics.hpp"
#include "codesum/stats.hpp"

namespace codesum {

// Per-metric rank-sum tests of one system's per-sample scores against another's.
struct MetricComparison {
  SignificanceResult bleu;
  SignificanceResult meteor;
  SignificanceResult rouge_l;
};

MetricComparison compare_reports(const MetricReport& system, const MetricReport& baseline);

// Aligned text, scores x100 with two decimals.
std::string format_report(const MetricReport& report, const std::optional<MetricComparison>& compare = std::nullopt);

// Machine-readable record: per-sample scores, means, percentiles, buckets and
// significance (JSON).
std::string report_record(const MetricReport& report, const std::optional<MetricComparison>& compare = std::nullopt);

// Writes the table to `table` and the record to `record_path`. Throws IoError.
void emit_report(const MetricReport& report, const std::optional<MetricComparison>& compare, std::ostream& table,
                 const std::filesystem::path& record_path);

}  // namespace codesum
