#pragma once

#include "minet/arima.hpp"
#include "minet/config.hpp"
#include "minet/metric_series.hpp"
#include "minet/mutual_info.hpp"
#include "minet/network.hpp"
#include "minet/panel.hpp"
#include "minet/predictors.hpp"
#include "minet/regression.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace minet {

/// Per-window measures for one run, in the canonical metric-table column order.
struct MetricsOutput {
    std::vector<std::string> tickers;
    std::vector<double> index_open;
    std::vector<double> index_close;
    ChangeSeries changes;
    std::vector<MetricSeries> metrics;
    std::vector<StrengthDistribution> distributions;  // empty when loaded from a table
    std::size_t dropped_rows = 0;

    std::size_t windows() const { return index_close.size(); }
    const MetricSeries& metric(const std::string& name) const;  // UsageError listing the available names
};

/// Column names of the metric table for the given horizons.
std::vector<std::string> metric_names(std::span<const Horizon> horizons);

/// Loads `config.data` and imputes it.
PricePanel load_input(const RunConfig& config, LoadReport* report = nullptr);

using MatrixSink = std::function<void(const MiMatrix&)>;

/// Runs MI, network, predictor and graph stages over every window. `sink`, when set,
/// sees every MI matrix (possibly from several threads at once).
MetricsOutput compute_metrics(const PricePanel& panel, const RunConfig& config, const MatrixSink& sink = {});

/// Index change series at `lag` from per-window closes.
ChangeSeries changes_from_closes(std::span<const double> closes, std::size_t lag);

struct CombinationResult {
    std::string name;
    GridSearchResult search;
};

std::vector<CombinationResult> run_combinations(const MetricsOutput& m, const RunConfig& config);

struct ArimaRun {
    std::string label;
    std::optional<ArimaModel> model;  // empty when the fit failed
    std::string failure;
    PredictionReport predictions;
};

struct ArimaComparison {
    ArimaRun baseline;
    OrderSearchResult search;
    std::vector<ArimaRun> exogenous;
};

/// Exog series for ARIMAX: value at window t is the metric at t - lag.
ExogSeries lagged_exog(const MetricSeries& metric, std::size_t lag);

ArimaComparison run_arima_models(const MetricsOutput& m, const RunConfig& config);

/// Subcommand drivers. Outputs are staged and moved into `config.output` only after
/// every computation succeeded. regress/combine/arima reuse metrics.csv and
/// changes.csv from the output directory when both exist.
void run_metrics(const RunConfig& config);
void run_regress(const RunConfig& config);
void run_combine(const RunConfig& config);
void run_arima(const RunConfig& config);
void run_report(const RunConfig& config);

}  // namespace minet
