#include "minet/pipeline.hpp"

#include "minet/centrality.hpp"
#include "minet/error.hpp"
#include "minet/modularity.hpp"
#include "minet/parallel.hpp"
#include "minet/table_io.hpp"

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace minet {

namespace fs = std::filesystem;

namespace {

/// Rethrows `e` with the same kind and a stage/window prefix.
[[noreturn]] void rethrow_in_stage(const Error& e, const std::string& stage, std::size_t window) {
    std::string what = "stage '" + stage + "'";
    if (window > 0) what += " window " + std::to_string(window);
    what += ": " + std::string(e.what());
    switch (e.kind()) {
        case ErrorKind::usage: throw UsageError(what);
        case ErrorKind::data: throw DataError(what);
        case ErrorKind::numeric: throw NumericError(what);
    }
    throw Error(e.kind(), what);
}

template <typename F>
auto in_stage(const std::string& stage, std::size_t window, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        rethrow_in_stage(e, stage, window);
    }
}

/// Output files land in a sibling staging directory and are moved into place
/// only by commit(); an exception leaves the destination untouched.
class Staging {
public:
    explicit Staging(const fs::path& output) {
        dest_ = fs::absolute(output).lexically_normal();
        if (dest_.filename().empty()) dest_ = dest_.parent_path();
        dir_ = dest_.parent_path() / ("." + dest_.filename().string() + ".staging");
        std::error_code ec;
        fs::remove_all(dir_, ec);
        fs::create_directories(dir_, ec);
        if (ec) throw DataError("cannot create staging directory " + dir_.string() + ": " + ec.message());
    }
    Staging(const Staging&) = delete;
    Staging& operator=(const Staging&) = delete;
    ~Staging() {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }

    fs::path path(const fs::path& rel) const { return dir_ / rel; }

    void write_text(const fs::path& rel, const std::string& text) const {
        const fs::path p = path(rel);
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        out << text;
        if (!out) throw DataError("write failed: " + p.string());
    }

    void commit() const {
        std::error_code ec;
        fs::create_directories(dest_, ec);
        if (ec) throw DataError("cannot create output directory " + dest_.string() + ": " + ec.message());
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(dir_))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const fs::path target = dest_ / fs::relative(f, dir_);
            fs::create_directories(target.parent_path());
            fs::rename(f, target, ec);
            if (ec) throw DataError("cannot move " + f.string() + " to " + target.string() + ": " + ec.message());
        }
    }

private:
    fs::path dest_;
    fs::path dir_;
};

std::string crc32_of(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot read " + file.string());
    boost::crc_32_type crc;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        crc.process_bytes(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    char hex[16];
    std::snprintf(hex, sizeof hex, "%08x", static_cast<unsigned>(crc.checksum()));
    return hex;
}

std::vector<HourWindow> level_windows(const MetricsOutput& m) {
    std::vector<HourWindow> out(m.windows());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].window_index = k + 1;
        out[k].index_open = m.index_open[k];
        out[k].index_close = m.index_close[k];
    }
    return out;
}

std::string slug(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (c == '(' || c == ',' || c == '+') out += '_';
        else if (c != ')') out += c;
    }
    return out;
}

std::string join(std::span<const double> values) {
    std::string out;
    for (double v : values) out += (out.empty() ? "" : ";") + format_number(v);
    return out;
}

struct WindowMeasures {
    Eigen::VectorXd strengths;
    Summary eig;
    Summary btw;
    double q = 0.0;
};

void write_metrics_files(const Staging& st, const MetricsOutput& m, const RunConfig& config,
                         const LoadReport& report, std::size_t missing_cells) {
    write_csv(st.path("metrics.csv"), metric_table(m.metrics));
    const auto windows = level_windows(m);
    write_csv(st.path("changes.csv"), change_table(windows, m.changes));

    nlohmann::json manifest;
    manifest["config"] = config.to_json();
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& f : report.files) {
        inputs.push_back({{"file", f.filename().string()}, {"bytes", fs::file_size(f)}, {"crc32", crc32_of(f)}});
    }
    manifest["inputs"] = inputs;
    manifest["rejected_tickers"] = report.rejected_tickers;
    manifest["tickers"] = m.tickers.size();
    manifest["windows"] = m.windows();
    manifest["dropped_rows"] = m.dropped_rows;
    manifest["imputed_cells"] = missing_cells;
    manifest["metrics"] = metric_names(config.horizons);
    st.write_text("manifest.json", manifest.dump(2) + "\n");

    if (config.dump_strengths) {
        for (const auto& d : m.distributions) {
            CsvTable t;
            t.header = {"ticker", "strength"};
            for (std::size_t i = 0; i < m.tickers.size(); ++i)
                t.rows.push_back({m.tickers[i], format_number(d.strengths(static_cast<Eigen::Index>(i)))});
            char name[32];
            std::snprintf(name, sizeof name, "window_%03zu.csv", d.window_index);
            write_csv(st.path(fs::path("strengths") / name), t);
        }
        if (!m.distributions.empty()) {
            CsvTable h;
            h.header = {"window"};
            const auto& edges = m.distributions.front().histogram.edges;
            for (std::size_t b = 0; b + 1 < edges.size(); ++b)
                h.header.push_back(format_number(edges[b]) + "-" + format_number(edges[b + 1]));
            for (const auto& d : m.distributions) {
                std::vector<std::string> row{std::to_string(d.window_index)};
                for (double v : d.histogram.mass) row.push_back(format_number(v));
                h.rows.push_back(std::move(row));
            }
            write_csv(st.path(fs::path("strengths") / "histograms.csv"), h);
        }
    }
}

MetricsOutput metrics_with_dumps(const RunConfig& config, const Staging& st, LoadReport& report,
                                 std::size_t& missing_cells) {
    const PricePanel raw = in_stage("ingestion", 0, [&] {
        return load_panel(config.data, {}, &report, config.index);
    });
    missing_cells = raw.missing_count();
    const PricePanel panel = in_stage("ingestion", 0, [&] { return impute_locf(raw); });
    MatrixSink sink;
    if (config.dump_matrices) {
        sink = [&](const MiMatrix& mi) {
            CsvTable t;
            t.header = {"ticker"};
            t.header.insert(t.header.end(), panel.tickers.begin(), panel.tickers.end());
            for (Eigen::Index i = 0; i < mi.weights.rows(); ++i) {
                std::vector<std::string> row{panel.tickers[static_cast<std::size_t>(i)]};
                for (Eigen::Index j = 0; j < mi.weights.cols(); ++j) row.push_back(format_number(mi.weights(i, j)));
                t.rows.push_back(std::move(row));
            }
            char name[32];
            std::snprintf(name, sizeof name, "window_%03zu.csv", mi.window_index);
            write_csv(st.path(fs::path("mi") / name), t);
        };
    }
    return compute_metrics(panel, config, sink);
}

/// Reuses metrics.csv/changes.csv from the output directory, else computes from data.
MetricsOutput obtain_metrics(const RunConfig& config) {
    const fs::path metrics_path = config.output / "metrics.csv";
    const fs::path changes_path = config.output / "changes.csv";
    if (fs::exists(metrics_path) && fs::exists(changes_path)) {
        MetricsOutput m;
        m.metrics = in_stage("load metrics", 0, [&] { return parse_metric_table(read_csv(metrics_path)); });
        const ChangeTable ct = in_stage("load changes", 0, [&] { return parse_change_table(read_csv(changes_path)); });
        m.index_open = ct.index_open;
        m.index_close = ct.index_close;
        for (const auto& s : m.metrics) {
            if (s.size() != m.windows()) {
                throw DataError("metrics.csv and changes.csv disagree on the window count");
            }
        }
        m.changes = in_stage("changes", 0, [&] { return changes_from_closes(m.index_close, config.target_lag); });
        return m;
    }
    if (config.data.empty()) {
        throw UsageError("no metrics.csv/changes.csv in " + config.output.string() + " and no data source configured");
    }
    const PricePanel panel = load_input(config);
    return compute_metrics(panel, config);
}

void write_regression_files(const Staging& st, const MetricsOutput& m, const RunConfig& config) {
    const auto rows = in_stage("regression", 0, [&] { return score_table(m.metrics, m.changes, config.threads); });
    CsvTable wide;
    wide.header = {"metric"};
    for (auto c : kScoreColumns) {
        wide.header.push_back(to_string(c) + "_sqrt_r2");
        wide.header.push_back(to_string(c) + "_r2");
    }
    CsvTable longform;
    longform.header = {"metric", "column", "target", "kind", "sqrt_r2", "r2", "r", "p_value", "n"};
    for (const auto& row : rows) {
        std::vector<std::string> w{row.metric};
        for (std::size_t c = 0; c < kScoreColumns.size(); ++c) {
            const ScoreCell& cell = row.cells[c];
            w.push_back(cell.available ? format_number(cell.score) : "");
            w.push_back(cell.available ? format_number(cell.r2) : "");
            const ScoreColumn col = kScoreColumns[c];
            longform.rows.push_back({row.metric, to_string(col), target_name(col), to_string(kind_of(col)),
                                     cell.available ? format_number(cell.score) : "",
                                     cell.available ? format_number(cell.r2) : "",
                                     cell.available ? format_number(cell.r) : "",
                                     cell.available ? format_number(cell.p_value) : "", std::to_string(cell.n)});
        }
        wide.rows.push_back(std::move(w));
    }
    write_csv(st.path("table1.csv"), wide);
    write_csv(st.path("regression_scores.csv"), longform);
}

void write_combination_files(const Staging& st, const MetricsOutput& m, const RunConfig& config) {
    const auto results = run_combinations(m, config);
    CsvTable t;
    t.header = {"name", "first", "second", "kind", "target", "a", "sqrt_r2", "r2", "n"};
    CsvTable grid;
    grid.header = {"name", "kind", "a", "r2"};
    std::vector<MetricSeries> series;
    for (const auto& r : results) {
        const auto& b = r.search.best;
        t.rows.push_back({r.name, b.first, b.second, to_string(b.kind),
                          b.kind == RegressionKind::linear ? "absolute" : "actual", format_number(b.a),
                          format_number(std::sqrt(b.score)), format_number(b.score), std::to_string(b.samples)});
        for (std::size_t i = 0; i < r.search.grid.size(); ++i)
            grid.rows.push_back({r.name, to_string(b.kind), format_number(r.search.grid[i]),
                                 format_number(r.search.scores[i])});
        MetricSeries s = b.series;
        s.name = r.name + "-" + to_string(b.kind);
        series.push_back(std::move(s));
    }
    write_csv(st.path("combinations.csv"), t);
    write_csv(st.path("combination_grid.csv"), grid);
    write_csv(st.path("combination_series.csv"), metric_table(series));
}

void write_model_row(CsvTable& models, CsvTable& mse, const ArimaRun& run) {
    if (!run.model) {
        models.rows.push_back({run.label, "", "", "", "", "", "", "", "", "", "", "", "", "failed: " + run.failure});
        mse.rows.push_back({run.label, "", "", "", "", "failed"});
        return;
    }
    const ArimaModel& a = *run.model;
    models.rows.push_back({run.label, std::to_string(a.order.p), std::to_string(a.order.d), std::to_string(a.order.q),
                           a.has_intercept ? format_number(a.intercept) : "", join(a.ar), join(a.ma),
                           format_optional(a.exog_coefficient), format_number(a.sigma2),
                           format_number(a.log_likelihood), format_number(a.aic), std::to_string(a.parameter_count),
                           std::to_string(a.n_effective), "ok"});
    mse.rows.push_back({run.label, format_number(run.predictions.mse), std::to_string(run.predictions.count),
                        format_number(a.aic), std::to_string(a.n_effective), "ok"});
}

void write_arima_files(const Staging& st, const MetricsOutput& m, const RunConfig& config) {
    const ArimaComparison cmp = run_arima_models(m, config);
    CsvTable models;
    models.header = {"model", "p", "d", "q", "intercept", "ar", "ma", "exog_coefficient", "sigma2",
                     "log_likelihood", "aic", "k", "n_effective", "status"};
    CsvTable mse;
    mse.header = {"model", "mse", "predictions", "aic", "n_effective", "status"};
    std::vector<const ArimaRun*> runs{&cmp.baseline};
    for (const auto& r : cmp.exogenous) runs.push_back(&r);
    for (const ArimaRun* r : runs) {
        write_model_row(models, mse, *r);
        if (!r->model) continue;
        CsvTable p;
        p.header = {"window", "actual", "predicted"};
        for (std::size_t k = 0; k < m.windows(); ++k)
            p.rows.push_back({std::to_string(k + 1), format_number(m.index_close[k]),
                              format_optional(r->predictions.predictions[k])});
        write_csv(st.path(fs::path("predictions") / (slug(r->label) + ".csv")), p);
    }
    write_csv(st.path("arima_models.csv"), models);
    write_csv(st.path("arima_mse.csv"), mse);

    CsvTable search;
    search.header = {"order", "aic"};
    for (std::size_t i = 0; i < cmp.search.tried.size(); ++i)
        search.rows.push_back({cmp.search.tried[i].label(), format_optional(cmp.search.aic[i])});
    write_csv(st.path("arima_search.csv"), search);

    std::ostringstream txt;
    txt << "series: index close per window (" << m.windows() << " windows)\n";
    txt << "baseline selected by minimum AIC over p<=" << config.arima.bounds.p_max
        << ", d<=" << config.arima.bounds.d_max << ", q<=" << config.arima.bounds.q_max << "\n\n";
    for (const ArimaRun* r : runs) {
        txt << r->label << "\n";
        if (!r->model) {
            txt << "  failed: " << r->failure << "\n\n";
            continue;
        }
        const ArimaModel& a = *r->model;
        if (a.has_intercept) txt << "  intercept: " << format_number(a.intercept) << "\n";
        if (!a.ar.empty()) txt << "  ar: " << join(a.ar) << "\n";
        if (!a.ma.empty()) txt << "  ma: " << join(a.ma) << "\n";
        if (a.exog_coefficient) txt << "  exog: " << format_number(*a.exog_coefficient) << "\n";
        txt << "  sigma2: " << format_number(a.sigma2) << "\n";
        txt << "  log-likelihood: " << format_number(a.log_likelihood) << "\n";
        txt << "  aic: " << format_number(a.aic) << " (k=" << a.parameter_count << ")\n";
        txt << "  effective n: " << a.n_effective << "\n";
        txt << "  mse: " << format_number(r->predictions.mse) << " over " << r->predictions.count
            << " one-step predictions\n\n";
    }
    st.write_text("arima_report.txt", txt.str());
}

}  // namespace

const MetricSeries& MetricsOutput::metric(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return m;
    std::string available;
    for (const auto& m : metrics) available += (available.empty() ? "" : ", ") + m.name;
    throw UsageError("unknown metric '" + name + "'; available: " + available);
}

std::vector<std::string> metric_names(std::span<const Horizon> horizons) {
    std::vector<std::string> out;
    for (const auto& h : horizons) out.push_back("KLD-" + h.label());
    for (const auto& h : horizons) out.push_back("RS-" + h.label());
    for (const char* n : {"mean", "variance", "skewness", "kurtosis", "eig-mean", "eig-median", "eig-max", "btw-mean",
                          "btw-median", "btw-max", "modularity"})
        out.emplace_back(n);
    return out;
}

PricePanel load_input(const RunConfig& config, LoadReport* report) {
    return in_stage("ingestion", 0, [&] { return impute_locf(load_panel(config.data, {}, report, config.index)); });
}

ChangeSeries changes_from_closes(std::span<const double> closes, std::size_t lag) {
    std::vector<HourWindow> windows(closes.size());
    for (std::size_t k = 0; k < closes.size(); ++k) {
        windows[k].window_index = k + 1;
        windows[k].index_close = closes[k];
    }
    return index_changes(windows, lag);
}

MetricsOutput compute_metrics(const PricePanel& panel, const RunConfig& config, const MatrixSink& sink) {
    config.validate();
    const WindowSplit split = in_stage("windows", 0, [&] { return split_windows(panel, config.window_length); });
    const auto& windows = split.windows;

    MetricsOutput out;
    out.tickers = panel.tickers;
    out.dropped_rows = split.dropped_rows;
    for (const auto& w : windows) {
        out.index_open.push_back(w.index_open);
        out.index_close.push_back(w.index_close);
    }
    out.changes = in_stage("changes", 0, [&] { return index_changes(windows, config.target_lag); });

    MiOptions mi_options;
    mi_options.rule = config.effective_bin_rule();
    mi_options.mode = config.mi_mode;
    mi_options.series = config.series_mode;
    mi_options.threads = 1;

    std::vector<WindowMeasures> measures(windows.size());
    parallel_for(windows.size(), config.threads, [&](std::size_t k) {
        const HourWindow& w = windows[k];
        const std::size_t t = w.window_index;
        const MiMatrix mi = in_stage("mutual_info", t, [&] {
            MiMatrix m = mi_matrix(w, mi_options);
            check_mi_matrix(m);
            return m;
        });
        if (sink) in_stage("matrix dump", t, [&] { sink(mi); });
        WindowMeasures& out_k = measures[k];
        out_k.strengths = node_strengths(mi);
        out_k.eig = in_stage("eigenvector centrality", t, [&] { return eigenvector_centrality(mi).summary; });
        out_k.btw = in_stage("betweenness centrality", t, [&] { return betweenness_centrality(mi, config.distance).summary; });
        out_k.q = in_stage("modularity", t, [&] { return modularity(mi, config.modularity_seed).q; });
    });

    out.distributions.resize(windows.size());
    for (std::size_t k = 0; k < windows.size(); ++k) {
        out.distributions[k].window_index = windows[k].window_index;
        out.distributions[k].strengths = std::move(measures[k].strengths);
    }
    in_stage("strength histograms", 0, [&] { attach_histograms(out.distributions, config.histogram_bin_width); });

    for (const auto& h : config.horizons)
        out.metrics.push_back(in_stage("KLD", 0, [&] { return kld_series(out.distributions, h, config.epsilon); }));
    for (const auto& h : config.horizons)
        out.metrics.push_back(in_stage("RS", 0, [&] { return rs_series(out.distributions, h); }));
    for (auto& s : in_stage("moments", 0, [&] { return moment_series(out.distributions); })) out.metrics.push_back(std::move(s));

    const auto summary_series = [&](const std::string& name, auto field) {
        MetricSeries s;
        s.name = name;
        for (const auto& m : measures) s.values.emplace_back(field(m));
        return s;
    };
    out.metrics.push_back(summary_series("eig-mean", [](const WindowMeasures& m) { return m.eig.mean; }));
    out.metrics.push_back(summary_series("eig-median", [](const WindowMeasures& m) { return m.eig.median; }));
    out.metrics.push_back(summary_series("eig-max", [](const WindowMeasures& m) { return m.eig.maximum; }));
    out.metrics.push_back(summary_series("btw-mean", [](const WindowMeasures& m) { return m.btw.mean; }));
    out.metrics.push_back(summary_series("btw-median", [](const WindowMeasures& m) { return m.btw.median; }));
    out.metrics.push_back(summary_series("btw-max", [](const WindowMeasures& m) { return m.btw.maximum; }));
    out.metrics.push_back(summary_series("modularity", [](const WindowMeasures& m) { return m.q; }));
    return out;
}

std::vector<CombinationResult> run_combinations(const MetricsOutput& m, const RunConfig& config) {
    std::vector<CombinationResult> out;
    for (const auto& spec : config.combinations) {
        const MetricSeries& a = m.metric(spec.first);
        const MetricSeries& b = m.metric(spec.second);
        for (auto kind : spec.kinds) {
            // Linear fits target |delta|, polynomial fits the signed change.
            const auto target = target_column(m.changes, kind == RegressionKind::linear ? "absolute" : "actual");
            const auto search = in_stage("combine " + spec.name, 0, [&] {
                return grid_search_a(a, b, target, kind, config.grid_step, config.zscore_combine, config.threads);
            });
            out.push_back({spec.name, search});
        }
    }
    return out;
}

ExogSeries lagged_exog(const MetricSeries& metric, std::size_t lag) {
    ExogSeries out(metric.size());
    for (std::size_t k = lag; k < metric.size(); ++k) out[k] = metric.values[k - lag];
    return out;
}

ArimaComparison run_arima_models(const MetricsOutput& m, const RunConfig& config) {
    std::vector<std::string> exog_names = config.arima.exog;
    if (exog_names.empty())
        for (const auto& s : m.metrics) exog_names.push_back(s.name);
    for (const auto& name : exog_names) (void)m.metric(name);
    ArimaComparison cmp;
    cmp.search = in_stage("arima order search", 0, [&] {
        return grid_search_order(m.index_close, config.arima.bounds, nullptr, {}, config.threads);
    });
    cmp.baseline.label = cmp.search.best.order.label();
    cmp.baseline.model = cmp.search.best;
    cmp.baseline.predictions = one_step_predictions(cmp.search.best);

    cmp.exogenous.resize(exog_names.size());
    parallel_for(exog_names.size(), config.threads, [&](std::size_t i) {
        const std::string& name = exog_names[i];
        ArimaRun& run = cmp.exogenous[i];
        run.label = config.arima.exog_order.label() + "+" + name;
        const ExogSeries exog = lagged_exog(m.metric(name), config.arima.exog_lag);
        try {
            run.model = fit_arima(m.index_close, config.arima.exog_order, &exog);
            run.predictions = one_step_predictions(*run.model);
        } catch (const Error& e) {
            run.failure = e.what();
        }
    });
    for (const auto& r : cmp.exogenous)
        if (!r.model) spdlog::warn("{} failed: {}", r.label, r.failure);
    return cmp;
}

void run_metrics(const RunConfig& config) {
    config.validate();
    Staging st(config.output);
    LoadReport report;
    std::size_t missing = 0;
    const MetricsOutput m = metrics_with_dumps(config, st, report, missing);
    write_metrics_files(st, m, config, report, missing);
    st.commit();
}

void run_regress(const RunConfig& config) {
    config.validate();
    const MetricsOutput m = obtain_metrics(config);
    Staging st(config.output);
    write_regression_files(st, m, config);
    st.commit();
}

void run_combine(const RunConfig& config) {
    config.validate();
    const MetricsOutput m = obtain_metrics(config);
    Staging st(config.output);
    write_combination_files(st, m, config);
    st.commit();
}

void run_arima(const RunConfig& config) {
    config.validate();
    const MetricsOutput m = obtain_metrics(config);
    Staging st(config.output);
    write_arima_files(st, m, config);
    st.commit();
}

void run_report(const RunConfig& config) {
    config.validate();
    Staging st(config.output);
    LoadReport report;
    std::size_t missing = 0;
    const MetricsOutput m = metrics_with_dumps(config, st, report, missing);
    write_metrics_files(st, m, config, report, missing);
    write_regression_files(st, m, config);
    write_combination_files(st, m, config);
    write_arima_files(st, m, config);
    st.commit();
}

}  // namespace minet
