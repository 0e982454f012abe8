#include "minet/regression.hpp"

#include "minet/error.hpp"
#include "minet/parallel.hpp"

#include <Eigen/QR>
#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace minet {

std::size_t MetricSeries::defined_count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
}

AlignedPairs align(const MetricSeries& metric, std::span<const double> target) {
    AlignedPairs out;
    const std::size_t n = std::min(metric.size(), target.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (!metric.values[k] || !std::isfinite(target[k])) continue;
        out.x.push_back(*metric.values[k]);
        out.y.push_back(target[k]);
        out.index.push_back(k);
    }
    return out;
}

std::string to_string(RegressionKind kind) {
    switch (kind) {
        case RegressionKind::linear: return "linear";
        case RegressionKind::poly2: return "poly2";
        case RegressionKind::poly3: return "poly3";
    }
    return "unknown";
}

RegressionKind parse_regression_kind(const std::string& name) {
    if (name == "linear") return RegressionKind::linear;
    if (name == "poly2") return RegressionKind::poly2;
    if (name == "poly3") return RegressionKind::poly3;
    throw UsageError("unknown regression kind '" + name + "' (expected linear, poly2 or poly3)");
}

namespace {

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

RegressionFit polyfit(std::span<const double> x, std::span<const double> y, int degree) {
    if (degree < 1 || degree > 3) throw UsageError("polynomial degree must be 1, 2 or 3");
    if (x.size() != y.size()) throw UsageError("polyfit: x and y lengths differ");
    const std::size_t n = x.size();
    if (n < static_cast<std::size_t>(degree) + 2) {
        throw DataError("polyfit: need at least " + std::to_string(degree + 2) + " samples, got " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DataError("polyfit: non-finite sample");

    const auto rows = static_cast<Eigen::Index>(n);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), rows);
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), rows);

    const double mean = xv.mean();
    const double scale = std::sqrt((xv.array() - mean).square().mean());
    if (!(scale > 0.0)) throw NumericError("polyfit: predictor is constant");

    Eigen::MatrixXd design(rows, degree + 1);
    const Eigen::ArrayXd z = (xv.array() - mean) / scale;
    design.col(0).setOnes();
    for (int k = 1; k <= degree; ++k) design.col(k) = design.col(k - 1).array() * z;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-12);
    if (qr.rank() < degree + 1) throw NumericError("polyfit: design matrix is rank deficient");
    const Eigen::VectorXd b = qr.solve(yv);

    RegressionFit fit;
    fit.kind = static_cast<RegressionKind>(degree);
    fit.n = n;

    // sum_k b_k ((x - m) / s)^k expanded into powers of x.
    fit.coefficients.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    for (int k = 0; k <= degree; ++k) {
        const double bk = b(k) / std::pow(scale, k);
        for (int j = 0; j <= k; ++j) fit.coefficients[static_cast<std::size_t>(j)] += bk * binomial(k, j) * std::pow(-mean, k - j);
    }

    const Eigen::VectorXd fitted = design * b;
    const Eigen::VectorXd residuals = yv - fitted;
    fit.fitted.assign(fitted.data(), fitted.data() + n);
    fit.residuals.assign(residuals.data(), residuals.data() + n);

    const double ss_res = residuals.squaredNorm();
    const double ss_tot = (yv.array() - yv.mean()).square().sum();
    fit.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
    fit.r = std::sqrt(fit.r2);
    if (degree == 1 && fit.coefficients[1] < 0.0) fit.r = -fit.r;

    const double df1 = degree;
    const double df2 = static_cast<double>(n) - degree - 1.0;
    if (fit.r2 >= 1.0) {
        fit.f_statistic = std::numeric_limits<double>::infinity();
        fit.p_value = 0.0;
    } else {
        fit.f_statistic = (fit.r2 / df1) / ((1.0 - fit.r2) / df2);
        const boost::math::fisher_f_distribution<double> dist(df1, df2);
        fit.p_value = boost::math::cdf(boost::math::complement(dist, fit.f_statistic));
    }
    return fit;
}

std::string to_string(ScoreColumn column) {
    switch (column) {
        case ScoreColumn::actual_poly2: return "act_poly2";
        case ScoreColumn::actual_poly3: return "act_poly3";
        case ScoreColumn::actual_linear: return "act_linear";
        case ScoreColumn::squared_linear: return "sqr_linear";
        case ScoreColumn::absolute_linear: return "abs_linear";
    }
    return "unknown";
}

RegressionKind kind_of(ScoreColumn column) {
    switch (column) {
        case ScoreColumn::actual_poly2: return RegressionKind::poly2;
        case ScoreColumn::actual_poly3: return RegressionKind::poly3;
        default: return RegressionKind::linear;
    }
}

std::string target_name(ScoreColumn column) {
    switch (column) {
        case ScoreColumn::squared_linear: return "squared";
        case ScoreColumn::absolute_linear: return "absolute";
        default: return "actual";
    }
}

std::span<const double> target_column(const ChangeSeries& changes, const std::string& name) {
    if (name == "actual") return changes.values;
    if (name == "squared") return changes.squared;
    if (name == "absolute") return changes.absolute;
    throw UsageError("unknown target column '" + name + "' (expected actual, squared or absolute)");
}

std::vector<ScoreRow> score_table(std::span<const MetricSeries> metrics, const ChangeSeries& changes, unsigned threads) {
    std::vector<ScoreRow> rows(metrics.size());
    parallel_for(metrics.size(), threads, [&](std::size_t m) {
        rows[m].metric = metrics[m].name;
        for (std::size_t c = 0; c < kScoreColumns.size(); ++c) {
            const ScoreColumn column = kScoreColumns[c];
            const AlignedPairs pairs = align(metrics[m], target_column(changes, target_name(column)));
            ScoreCell& cell = rows[m].cells[c];
            cell.n = pairs.x.size();
            try {
                const RegressionFit fit = polyfit(pairs.x, pairs.y, degree_of(kind_of(column)));
                cell.available = true;
                cell.score = std::sqrt(fit.r2);
                cell.r2 = fit.r2;
                cell.r = fit.r;
                cell.p_value = fit.p_value;
            } catch (const Error&) {
                cell.available = false;
            }
        }
    });
    return rows;
}

}  // namespace minet
