#pragma once

#include "minet/metric_series.hpp"
#include "minet/panel.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minet {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);
/// Empty string for an undefined value.
std::string format_optional(const std::optional<double>& v);

double parse_number(const std::string& text);
std::optional<double> parse_optional(const std::string& text);

/// Comma-separated table with a header row. Fields holding commas or quotes are double-quoted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Metric table: `window` followed by one column per metric, in the given order.
CsvTable metric_table(std::span<const MetricSeries> metrics);
std::vector<MetricSeries> parse_metric_table(const CsvTable& table);

/// Per-window index levels and the change series:
/// window,index_open,index_close,delta,absolute,squared (changes empty for the last `lag` windows).
CsvTable change_table(std::span<const HourWindow> windows, const ChangeSeries& changes);

struct ChangeTable {
    std::vector<double> index_open;
    std::vector<double> index_close;
    ChangeSeries changes;
};
ChangeTable parse_change_table(const CsvTable& table);

}  // namespace minet
