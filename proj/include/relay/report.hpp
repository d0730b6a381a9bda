#pragma once

// CSV and JSON writers for experiment rows.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "relay/experiments.hpp"

namespace relay {

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(std::string_view text);

struct ReportMeta {
  std::string experiment;       // "two-user-sweep", "multi-user", ...
  std::string coordinate_name;  // CSV header of the first column
  std::uint64_t seed = 0;
  std::string rng;              // generator identifier; empty if unused
};

/// Columns: coordinate, then per mechanism total, utilization, price,
/// variance, feasible, ne_check and one column per user. Every row must list
/// the same mechanisms with the same user counts.
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows,
               const ReportMeta& meta);

/// Full-precision mirror of the CSV plus the metadata.
void write_json(std::ostream& out, const std::vector<ReportRow>& rows,
                const ReportMeta& meta);

std::vector<ReportRow> read_json_rows(std::istream& in);
ReportMeta read_json_meta(std::istream& in);

/// Writes <dir>/<meta.experiment>.<csv|json>; returns the path.
std::filesystem::path emit_report(const std::vector<ReportRow>& rows,
                                  ReportFormat format,
                                  const std::filesystem::path& dir,
                                  const ReportMeta& meta);

}  // namespace relay
