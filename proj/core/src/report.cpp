#include "codesum/report.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "codesum/error.hpp"
#include "json.hpp"

namespace codesum {
namespace {

using nlohmann::json;

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
  return buf;
}

std::string row(const std::string& label, const MetricScores& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %8s\n", label.c_str(), pct(s.bleu).c_str(), pct(s.meteor).c_str(),
                pct(s.rouge_l).c_str());
  return buf;
}

std::string table(const MetricReport& r) {
  std::string out;
  char head[128];
  std::snprintf(head, sizeof head, "%-10s %8s %8s %8s\n", "", "BLEU", "METEOR", "ROUGE-L");
  out += head;
  out += row("mean", r.mean);
  for (std::size_t k = 0; k < kReportPercentiles.size(); ++k) {
    out += row("p" + std::to_string(kReportPercentiles[k]), r.percentiles[k]);
  }
  return out;
}

std::vector<double> column(const MetricReport& r, double MetricScores::*field) {
  std::vector<double> out;
  out.reserve(r.samples.size());
  for (const auto& s : r.samples) out.push_back(s.*field);
  return out;
}

json scores_json(const MetricScores& s) { return {{"bleu", s.bleu}, {"meteor", s.meteor}, {"rouge_l", s.rouge_l}}; }

json significance_json(const SignificanceResult& s) {
  return {{"u", s.u_statistic},
          {"p", s.p_value},
          {"method", std::string(method_name(s.method))},
          {"band", std::string(band_label(s.band))}};
}

json summary_json(const MetricReport& r) {
  json out;
  out["samples"] = r.samples.size();
  out["mean"] = scores_json(r.mean);
  json pcts = json::object();
  for (std::size_t k = 0; k < kReportPercentiles.size(); ++k) {
    pcts["p" + std::to_string(kReportPercentiles[k])] = scores_json(r.percentiles[k]);
  }
  out["percentiles"] = pcts;
  return out;
}

}  // namespace

MetricComparison compare_reports(const MetricReport& system, const MetricReport& baseline) {
  auto test = [&](double MetricScores::*field) {
    const auto a = column(system, field);
    const auto b = column(baseline, field);
    return mann_whitney_u_test(a, b);
  };
  return {test(&MetricScores::bleu), test(&MetricScores::meteor), test(&MetricScores::rouge_l)};
}

std::string format_report(const MetricReport& report, const std::optional<MetricComparison>& compare) {
  std::string out = "samples: " + std::to_string(report.samples.size()) + "\n" + table(report);
  for (std::size_t b = 0; b < report.buckets.size(); ++b) {
    const auto& bucket = report.buckets[b];
    out += "\n";
    out += report.bucket_kind == BucketKind::kCode ? "code lines " : "comment tokens ";
    out += bucket.label + " (n=" + std::to_string(bucket.members.size()) + ")\n";
    if (bucket.members.empty()) {
      out += "  (empty)\n";
    } else {
      out += table(report.bucket_reports[b]);
    }
  }
  if (compare) {
    out += "\n";
    const std::pair<const char*, const SignificanceResult*> lines[] = {
        {"BLEU", &compare->bleu}, {"METEOR", &compare->meteor}, {"ROUGE-L", &compare->rouge_l}};
    for (const auto& [name, s] : lines) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-8s U=%.1f p=%.4g (%s) %s\n", name, s->u_statistic, s->p_value,
                    std::string(method_name(s->method)).c_str(), std::string(band_label(s->band)).c_str());
      out += buf;
    }
  }
  return out;
}

std::string report_record(const MetricReport& report, const std::optional<MetricComparison>& compare) {
  json out = summary_json(report);
  json per_sample = json::array();
  for (const auto& s : report.samples) per_sample.push_back(scores_json(s));
  out["per_sample"] = per_sample;
  if (report.bucket_kind) {
    out["bucket_kind"] = *report.bucket_kind == BucketKind::kCode ? "code" : "comment";
    json buckets = json::array();
    for (std::size_t b = 0; b < report.buckets.size(); ++b) {
      const auto& bucket = report.buckets[b];
      json entry;
      entry["label"] = bucket.label;
      entry["lower"] = bucket.lower;
      entry["upper"] = bucket.upper ? json(*bucket.upper) : json(nullptr);
      entry["members"] = bucket.members;
      if (!bucket.members.empty()) entry["summary"] = summary_json(report.bucket_reports[b]);
      buckets.push_back(entry);
    }
    out["buckets"] = buckets;
  }
  if (compare) {
    out["significance"] = {{"bleu", significance_json(compare->bleu)},
                           {"meteor", significance_json(compare->meteor)},
                           {"rouge_l", significance_json(compare->rouge_l)}};
  }
  return out.dump(2) + "\n";
}

void emit_report(const MetricReport& report, const std::optional<MetricComparison>& compare, std::ostream& table_out,
                 const std::filesystem::path& record_path) {
  const auto record = report_record(report, compare);
  std::ofstream out(record_path);
  if (!out) throw IoError("cannot write " + record_path.string());
  out << record;
  if (!out) throw IoError("write failed for " + record_path.string());
  table_out << format_report(report, compare);
}

}  // namespace codesum
