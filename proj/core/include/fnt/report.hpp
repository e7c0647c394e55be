#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fnt/evaluate.hpp"

namespace fnt {

struct ReportRow {
  std::string model;       // embedding model, e.g. "sskip"
  std::string classifier;  // "LR" or "MLP"
  EvalReport report;
};

enum class ReportFormat { Tsv, HumanTable };
ReportFormat parse_report_format(std::string_view name);  // tsv | table

// Percent with one decimal, e.g. 0.2344 -> "23.4".
std::string format_percent(double fraction);

// TSV: header `model<TAB>classifier<TAB>acc<TAB>micro_f1`, one row per entry.
// Human table: one line per model with ACC / Micro-F1 per classifier; the best
// value of each column is marked with '*'. Throws ConfigError on no rows.
std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format);

// Writes the rendered report to path. For TSV output a companion
// `<stem>.<model>.<classifier>.breakdown.csv` with columns
// `n,group_size,micro_f1` is written next to it for every row.
void emit_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path, ReportFormat format);

std::filesystem::path breakdown_path(const std::filesystem::path& report_path, const ReportRow& row);
std::string render_breakdown_csv(const EvalReport& report);

// Full results, including counts and breakdowns, as JSON.
void save_results(const std::vector<ReportRow>& rows, const std::filesystem::path& path);
std::vector<ReportRow> load_results(const std::filesystem::path& path);

}  // namespace fnt
