#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace minet {

/// Epoch seconds (UTC).
using Timestamp = std::int64_t;

/// Aligned minute-close panel. Rows are timestamps, columns are tickers.
/// Missing cells hold NaN until impute_locf() has run.
struct PricePanel {
    std::vector<Timestamp> timestamps;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;
    std::string index_name;
    Eigen::VectorXd index_series;

    std::size_t rows() const { return timestamps.size(); }
    std::size_t cols() const { return tickers.size(); }
    std::size_t missing_count() const;
};

/// Column layout of the per-ticker delimited files.
struct TabularFormat {
    char delimiter = ',';
    std::string time_column = "timestamp";
    std::string close_column = "close";
};

/// Side information gathered while loading.
struct LoadReport {
    std::vector<std::string> rejected_tickers;  // files without a single record
    std::vector<std::filesystem::path> files;   // every file read, sorted, index included
};

/// Parses one timestamp field; ISO-8601 (`YYYY-MM-DD[T ]HH:MM[:SS][Z]`) or
/// integer epoch seconds. Throws DataError on anything else.
Timestamp parse_timestamp(const std::string& field);
bool is_epoch_field(const std::string& field);
std::string format_iso8601(Timestamp ts);

/// Loads every `<ticker>.csv` next to a `manifest.json` naming the index series.
/// `source` is either the data directory or the manifest file itself.
/// A non-empty `index_override` replaces the manifest's index name.
PricePanel load_panel(const std::filesystem::path& source,
                      const TabularFormat& format = {},
                      LoadReport* report = nullptr,
                      const std::string& index_override = {});

/// Last observation carried forward, column by column (index series included).
/// Leading gaps are back-filled from the first observed value.
PricePanel impute_locf(PricePanel panel);

/// One non-overlapping block of `window_length` minutes.
struct HourWindow {
    std::size_t window_index = 0;  // 1-based
    Eigen::MatrixXd prices;        // window_length x tickers
    double index_open = 0.0;
    double index_close = 0.0;
};

struct WindowSplit {
    std::vector<HourWindow> windows;
    std::size_t dropped_rows = 0;  // trailing partial window
};

WindowSplit split_windows(const PricePanel& panel, std::size_t window_length = 60);

/// Index change between consecutive window closes.
/// values[k] pairs with window t = k + 1 and equals close(t + lag) - close(t).
struct ChangeSeries {
    std::size_t lag = 1;
    std::vector<double> values;
    std::vector<double> absolute;
    std::vector<double> squared;

    std::size_t size() const { return values.size(); }
};

ChangeSeries index_changes(std::span<const HourWindow> windows, std::size_t lag = 1);

/// Per-column log returns of a window (one row shorter). Used by the
/// returns series mode; raw prices are the default input to MI.
Eigen::MatrixXd log_returns(const Eigen::MatrixXd& prices);

}  // namespace minet
