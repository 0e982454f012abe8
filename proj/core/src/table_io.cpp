#include "minet/table_io.hpp"

#include "minet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace minet {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw NumericError("cannot format number");
    return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

double parse_number(const std::string& text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) throw DataError("invalid number '" + text + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return parse_number(text);
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("table has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

void write_field(std::ostream& out, const std::string& field) {
    if (field.find_first_of("\r\n") != std::string::npos) throw DataError("table field contains a line break");
    if (field.find_first_of(",\"") == std::string::npos) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

// Splits one line; double-quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_row(const std::string& line, const std::string& where) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c != '"') field += c;
            else if (i + 1 < line.size() && line[i + 1] == '"') field += line[++i];
            else quoted = false;
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw DataError(where + ": unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_row(out, table.header);
    for (const auto& row : table.rows) write_row(out, row);
    if (!out) throw DataError("error writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_row(line, path.filename().string() + ":" + std::to_string(line_no));
        if (line_no == 1) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw DataError(path.filename().string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw DataError(path.string() + ": empty table");
    return table;
}

CsvTable metric_table(std::span<const MetricSeries> metrics) {
    CsvTable t;
    t.header.push_back("window");
    std::size_t rows = 0;
    for (const auto& m : metrics) {
        t.header.push_back(m.name);
        rows = std::max(rows, m.size());
    }
    for (const auto& m : metrics)
        if (m.size() != rows) throw DataError("metric '" + m.name + "' has a different number of windows");
    for (std::size_t k = 0; k < rows; ++k) {
        std::vector<std::string> row{std::to_string(k + 1)};
        for (const auto& m : metrics) row.push_back(format_optional(m.values[k]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<MetricSeries> parse_metric_table(const CsvTable& table) {
    if (table.header.empty() || table.header.front() != "window") throw DataError("metric table must start with 'window'");
    std::vector<MetricSeries> metrics(table.header.size() - 1);
    for (std::size_t c = 1; c < table.header.size(); ++c) metrics[c - 1].name = table.header[c];
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r][0] != std::to_string(r + 1)) throw DataError("metric table windows must be 1, 2, 3, ...");
        for (std::size_t c = 1; c < table.header.size(); ++c) metrics[c - 1].values.push_back(parse_optional(table.rows[r][c]));
    }
    return metrics;
}

CsvTable change_table(std::span<const HourWindow> windows, const ChangeSeries& changes) {
    CsvTable t;
    t.header = {"window", "index_open", "index_close", "delta", "absolute", "squared"};
    for (std::size_t k = 0; k < windows.size(); ++k) {
        std::vector<std::string> row{std::to_string(windows[k].window_index), format_number(windows[k].index_open),
                                     format_number(windows[k].index_close)};
        if (k < changes.size()) {
            row.push_back(format_number(changes.values[k]));
            row.push_back(format_number(changes.absolute[k]));
            row.push_back(format_number(changes.squared[k]));
        } else {
            row.insert(row.end(), 3, std::string{});
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

ChangeTable parse_change_table(const CsvTable& table) {
    ChangeTable out;
    const std::size_t open = table.column("index_open");
    const std::size_t close = table.column("index_close");
    const std::size_t delta = table.column("delta");
    const std::size_t abs = table.column("absolute");
    const std::size_t sq = table.column("squared");
    bool ended = false;
    for (const auto& row : table.rows) {
        out.index_open.push_back(parse_number(row[open]));
        out.index_close.push_back(parse_number(row[close]));
        const auto d = parse_optional(row[delta]);
        if (!d) {
            ended = true;
            continue;
        }
        if (ended) throw DataError("change table has gaps in the delta column");
        out.changes.values.push_back(*d);
        out.changes.absolute.push_back(parse_number(row[abs]));
        out.changes.squared.push_back(parse_number(row[sq]));
    }
    out.changes.lag = table.rows.size() - out.changes.values.size();
    return out;
}

}  // namespace minet
