#pragma once

#include "minet/metric_series.hpp"
#include "minet/panel.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace minet {

enum class RegressionKind { linear = 1, poly2 = 2, poly3 = 3 };

inline int degree_of(RegressionKind kind) { return static_cast<int>(kind); }
std::string to_string(RegressionKind kind);
RegressionKind parse_regression_kind(const std::string& name);

struct RegressionFit {
    RegressionKind kind = RegressionKind::linear;
    std::vector<double> coefficients;  // intercept first, in powers of the raw x
    double r2 = 0.0;
    double r = 0.0;  // sign of the slope times sqrt(R^2) for linear fits, sqrt(R^2) otherwise
    double f_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    std::vector<double> fitted;
    std::vector<double> residuals;
};

/// Least-squares polynomial fit of y on [1, x, ..., x^degree]. Solved by
/// column-pivoted Householder QR on a centered and scaled design.
RegressionFit polyfit(std::span<const double> x, std::span<const double> y, int degree);

/// Columns of the per-metric score table (table1.csv).
enum class ScoreColumn {
    actual_poly2,
    actual_poly3,
    actual_linear,
    squared_linear,
    absolute_linear,
};
inline constexpr std::array<ScoreColumn, 5> kScoreColumns = {
    ScoreColumn::actual_poly2, ScoreColumn::actual_poly3, ScoreColumn::actual_linear,
    ScoreColumn::squared_linear, ScoreColumn::absolute_linear,
};
std::string to_string(ScoreColumn column);
RegressionKind kind_of(ScoreColumn column);

/// Target column of a change series by name: "actual", "squared" or "absolute".
std::span<const double> target_column(const ChangeSeries& changes, const std::string& name);
std::string target_name(ScoreColumn column);

struct ScoreCell {
    bool available = false;
    double score = 0.0;  // multiple correlation sqrt(R^2)
    double r2 = 0.0;
    double r = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

struct ScoreRow {
    std::string metric;
    std::array<ScoreCell, kScoreColumns.size()> cells;
};

std::vector<ScoreRow> score_table(std::span<const MetricSeries> metrics, const ChangeSeries& changes,
                                  unsigned threads = 1);

}  // namespace minet
