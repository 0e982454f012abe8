#include "minet/panel.hpp"

#include "minet/error.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace minet {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delimiter)) out.push_back(trim(field));
    if (!line.empty() && line.back() == delimiter) out.emplace_back();
    return out;
}

struct SeriesRecords {
    std::vector<std::pair<Timestamp, double>> rows;
};

SeriesRecords read_series_file(const std::filesystem::path& path, const TabularFormat& format) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    const auto where = [&](std::size_t line_no) {
        return path.filename().string() + ":" + std::to_string(line_no);
    };

    std::string line;
    std::size_t line_no = 0;
    std::size_t time_col = 0;
    std::size_t close_col = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto header = split_fields(line, format.delimiter);
        const auto t = std::find(header.begin(), header.end(), format.time_column);
        const auto c = std::find(header.begin(), header.end(), format.close_column);
        if (t == header.end() || c == header.end()) {
            throw DataError(where(line_no) + ": header must contain '" + format.time_column +
                            "' and '" + format.close_column + "'");
        }
        time_col = static_cast<std::size_t>(t - header.begin());
        close_col = static_cast<std::size_t>(c - header.begin());
        have_header = true;
        break;
    }
    if (!have_header) throw DataError(path.filename().string() + ": empty file");

    SeriesRecords records;
    std::set<Timestamp> seen;
    int epoch_style = -1;  // -1 unknown, 0 ISO, 1 epoch
    const std::size_t needed = std::max(time_col, close_col) + 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, format.delimiter);
        if (fields.size() < needed) throw DataError(where(line_no) + ": too few fields");

        const int style = is_epoch_field(fields[time_col]) ? 1 : 0;
        if (epoch_style < 0) epoch_style = style;
        if (style != epoch_style) {
            throw DataError(where(line_no) + ": timestamp format differs from earlier rows");
        }
        Timestamp ts = 0;
        try {
            ts = parse_timestamp(fields[time_col]);
        } catch (const DataError& e) {
            throw DataError(where(line_no) + ": " + e.what());
        }

        const std::string& close_field = fields[close_col];
        double close = 0.0;
        auto [ptr, ec] = std::from_chars(close_field.data(), close_field.data() + close_field.size(), close);
        if (ec != std::errc{} || ptr != close_field.data() + close_field.size() || !std::isfinite(close) ||
            close <= 0.0) {
            throw DataError(where(line_no) + ": invalid close price '" + close_field + "'");
        }
        if (!seen.insert(ts).second) throw DataError(where(line_no) + ": duplicate timestamp");
        records.rows.emplace_back(ts, close);
    }
    std::sort(records.rows.begin(), records.rows.end());
    return records;
}

}  // namespace

std::size_t PricePanel::missing_count() const {
    std::size_t n = static_cast<std::size_t>(prices.array().isNaN().count());
    n += static_cast<std::size_t>(index_series.array().isNaN().count());
    return n;
}

bool is_epoch_field(const std::string& field) {
    if (field.empty()) return false;
    const std::size_t start = field[0] == '-' ? 1 : 0;
    if (start == field.size()) return false;
    return std::all_of(field.begin() + static_cast<std::ptrdiff_t>(start), field.end(),
                       [](char ch) { return ch >= '0' && ch <= '9'; });
}

Timestamp parse_timestamp(const std::string& field) {
    if (is_epoch_field(field)) {
        Timestamp ts = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), ts);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            throw DataError("epoch timestamp out of range '" + field + "'");
        }
        return ts;
    }

    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    std::string_view s(field);
    if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
    unsigned year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    const bool date_ok = s.size() >= 16 && s[4] == '-' && s[7] == '-' && (s[10] == 'T' || s[10] == ' ') &&
                         s[13] == ':' && parse_uint(s.substr(0, 4), year) && parse_uint(s.substr(5, 2), month) &&
                         parse_uint(s.substr(8, 2), day) && parse_uint(s.substr(11, 2), hour) &&
                         parse_uint(s.substr(14, 2), minute);
    bool ok = date_ok;
    if (ok && s.size() > 16) ok = s.size() == 19 && s[16] == ':' && parse_uint(s.substr(17, 2), second);
    if (!ok || month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
        throw DataError("unparseable timestamp '" + field + "'");
    }
    const std::int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_iso8601(Timestamp ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

PricePanel load_panel(const std::filesystem::path& source, const TabularFormat& format, LoadReport* report,
                      const std::string& index_override) {
    namespace fs = std::filesystem;
    if (!fs::exists(source)) throw DataError("data source does not exist: " + source.string());

    const fs::path manifest_path = fs::is_directory(source) ? source / "manifest.json" : source;
    const fs::path dir = manifest_path.parent_path();
    if (!fs::exists(manifest_path)) throw DataError("no manifest.json in " + source.string());

    std::string index_name;
    {
        std::ifstream in(manifest_path);
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(manifest_path.string() + ": " + e.what());
        }
        if (!manifest.contains("index") || !manifest["index"].is_string()) {
            throw DataError(manifest_path.string() + ": missing string field 'index'");
        }
        index_name = manifest["index"].get<std::string>();
    }
    if (!index_override.empty()) index_name = index_override;

    const fs::path index_path = dir / (index_name + ".csv");
    if (!fs::exists(index_path)) throw DataError("index series file not found: " + index_path.string());

    std::vector<fs::path> ticker_paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        if (entry.path().stem() == index_name) continue;
        ticker_paths.push_back(entry.path());
    }
    std::sort(ticker_paths.begin(), ticker_paths.end());

    const SeriesRecords index_records = read_series_file(index_path, format);
    if (index_records.rows.empty()) throw DataError("index series '" + index_name + "' has no records");

    std::vector<std::string> tickers;
    std::vector<SeriesRecords> columns;
    std::vector<std::string> rejected;
    for (const auto& path : ticker_paths) {
        SeriesRecords rec = read_series_file(path, format);
        if (rec.rows.empty()) {
            rejected.push_back(path.stem().string());
            continue;
        }
        tickers.push_back(path.stem().string());
        columns.push_back(std::move(rec));
    }
    if (!rejected.empty()) {
        std::string list;
        for (const auto& t : rejected) list += (list.empty() ? "" : ", ") + t;
        spdlog::warn("rejected tickers with no records: {}", list);
    }
    if (tickers.size() < 2) {
        throw DataError("need at least 2 tickers with records, found " + std::to_string(tickers.size()));
    }

    std::vector<Timestamp> stamps;
    for (const auto& [ts, v] : index_records.rows) stamps.push_back(ts);
    for (const auto& col : columns)
        for (const auto& [ts, v] : col.rows) stamps.push_back(ts);
    std::sort(stamps.begin(), stamps.end());
    stamps.erase(std::unique(stamps.begin(), stamps.end()), stamps.end());

    PricePanel panel;
    panel.timestamps = stamps;
    panel.tickers = tickers;
    panel.index_name = index_name;
    panel.prices = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(stamps.size()),
                                             static_cast<Eigen::Index>(tickers.size()), kMissing);
    panel.index_series = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(stamps.size()), kMissing);

    const auto row_of = [&](Timestamp ts) {
        return static_cast<Eigen::Index>(std::lower_bound(stamps.begin(), stamps.end(), ts) - stamps.begin());
    };
    for (const auto& [ts, v] : index_records.rows) panel.index_series(row_of(ts)) = v;
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (const auto& [ts, v] : columns[c].rows) panel.prices(row_of(ts), static_cast<Eigen::Index>(c)) = v;

    if (report != nullptr) {
        report->rejected_tickers = rejected;
        report->files = ticker_paths;
        report->files.push_back(index_path);
        std::sort(report->files.begin(), report->files.end());
    }
    return panel;
}

namespace {

void locf_column(Eigen::Ref<Eigen::VectorXd> column, const std::string& name) {
    const Eigen::Index n = column.size();
    Eigen::Index first = 0;
    while (first < n && std::isnan(column(first))) ++first;
    if (first == n) throw DataError("column '" + name + "' has no observed values");
    for (Eigen::Index i = 0; i < first; ++i) column(i) = column(first);
    for (Eigen::Index i = first + 1; i < n; ++i)
        if (std::isnan(column(i))) column(i) = column(i - 1);
}

}  // namespace

PricePanel impute_locf(PricePanel panel) {
    for (Eigen::Index c = 0; c < panel.prices.cols(); ++c)
        locf_column(panel.prices.col(c), panel.tickers[static_cast<std::size_t>(c)]);
    locf_column(panel.index_series, panel.index_name.empty() ? "index" : panel.index_name);
    return panel;
}

WindowSplit split_windows(const PricePanel& panel, std::size_t window_length) {
    if (window_length < 2) throw UsageError("window length must be at least 2");
    if (panel.rows() < window_length) {
        throw DataError("panel has " + std::to_string(panel.rows()) + " rows, fewer than the window length " +
                        std::to_string(window_length));
    }
    if (panel.missing_count() != 0) throw DataError("panel must be imputed before splitting into windows");

    WindowSplit split;
    const std::size_t count = panel.rows() / window_length;
    split.dropped_rows = panel.rows() - count * window_length;
    if (split.dropped_rows != 0) {
        spdlog::warn("dropping {} trailing rows that do not fill a {}-minute window", split.dropped_rows,
                     window_length);
    }
    split.windows.reserve(count);
    const auto len = static_cast<Eigen::Index>(window_length);
    for (std::size_t w = 0; w < count; ++w) {
        const auto start = static_cast<Eigen::Index>(w * window_length);
        HourWindow window;
        window.window_index = w + 1;
        window.prices = panel.prices.middleRows(start, len);
        window.index_open = panel.index_series(start);
        window.index_close = panel.index_series(start + len - 1);
        split.windows.push_back(std::move(window));
    }
    return split;
}

ChangeSeries index_changes(std::span<const HourWindow> windows, std::size_t lag) {
    if (lag == 0) throw UsageError("target lag must be at least 1");
    if (lag >= windows.size()) {
        throw DataError("target lag " + std::to_string(lag) + " needs more than " + std::to_string(windows.size()) +
                        " windows");
    }
    ChangeSeries out;
    out.lag = lag;
    const std::size_t n = windows.size() - lag;
    out.values.reserve(n);
    out.absolute.reserve(n);
    out.squared.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double delta = windows[k + lag].index_close - windows[k].index_close;
        out.values.push_back(delta);
        out.absolute.push_back(std::abs(delta));
        out.squared.push_back(delta * delta);
    }
    return out;
}

Eigen::MatrixXd log_returns(const Eigen::MatrixXd& prices) {
    if (prices.rows() < 2) throw DataError("log returns need at least 2 rows");
    const Eigen::Index n = prices.rows() - 1;
    return (prices.bottomRows(n).array() / prices.topRows(n).array()).log().matrix();
}

}  // namespace minet
