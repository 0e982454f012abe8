#include "minet/predictors.hpp"

#include "minet/error.hpp"
#include "minet/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace minet {

Horizon Horizon::parse(const std::string& text) {
    if (text == "All" || text == "all") return all();
    std::size_t s = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), s);
    if (ec != std::errc{} || ptr != text.data() + text.size() || s == 0) {
        throw UsageError("invalid horizon '" + text + "' (expected a positive count or All)");
    }
    return of(s);
}

Histogram prior_average(std::span<const Histogram> histograms) {
    if (histograms.empty()) throw UsageError("prior_average needs at least one histogram");
    Histogram out;
    out.edges = histograms.front().edges;
    out.mass.assign(histograms.front().bins(), 0.0);
    for (const auto& h : histograms) {
        if (!h.same_grid(histograms.front())) throw DataError("prior_average: histogram grids differ");
        for (std::size_t i = 0; i < h.bins(); ++i) out.mass[i] += h.mass[i];
    }
    const double s = static_cast<double>(histograms.size());
    for (double& m : out.mass) m /= s;
    return out;
}

double kld(const Histogram& p, const Histogram& q, double epsilon) {
    if (!p.same_grid(q) || p.bins() != q.bins()) throw DataError("kld: histogram grids differ");
    if (!(epsilon > 0.0)) throw UsageError("kld: smoothing epsilon must be positive");

    double p_total = 0.0;
    double q_total = 0.0;
    for (std::size_t i = 0; i < p.bins(); ++i) {
        p_total += p.mass[i] + epsilon;
        q_total += q.mass[i] + epsilon;
    }
    double d = 0.0;
    for (std::size_t i = 0; i < p.bins(); ++i) {
        const double pi = (p.mass[i] + epsilon) / p_total;
        const double qi = (q.mass[i] + epsilon) / q_total;
        if (pi > 0.0) d += pi * std::log(pi / qi);
    }
    return std::max(0.0, d);
}

namespace {

// [begin, end) of the prior windows for 0-based window k, or nullopt when history is short.
std::optional<std::pair<std::size_t, std::size_t>> prior_range(std::size_t k, Horizon horizon) {
    if (horizon.is_all()) {
        if (k == 0) return std::nullopt;
        return std::pair{std::size_t{0}, k};
    }
    const std::size_t s = *horizon.windows;
    if (k < s) return std::nullopt;
    return std::pair{k - s, k};
}

}  // namespace

MetricSeries kld_series(std::span<const StrengthDistribution> distributions, Horizon horizon, double epsilon) {
    MetricSeries out;
    out.name = "KLD-" + horizon.label();
    out.values.assign(distributions.size(), std::nullopt);
    std::vector<Histogram> priors;
    for (std::size_t k = 0; k < distributions.size(); ++k) {
        const auto range = prior_range(k, horizon);
        if (!range) continue;
        priors.clear();
        for (std::size_t i = range->first; i < range->second; ++i) priors.push_back(distributions[i].histogram);
        out.values[k] = kld(distributions[k].histogram, prior_average(priors), epsilon);
    }
    return out;
}

MetricSeries rs_series(std::span<const StrengthDistribution> distributions, Horizon horizon) {
    MetricSeries out;
    out.name = "RS-" + horizon.label();
    out.values.assign(distributions.size(), std::nullopt);

    std::vector<double> average_strength(distributions.size());
    for (std::size_t k = 0; k < distributions.size(); ++k) {
        if (distributions[k].strengths.size() == 0) throw DataError("rs_series: window without nodes");
        average_strength[k] = distributions[k].strengths.mean();
    }
    for (std::size_t k = 0; k < distributions.size(); ++k) {
        const auto range = prior_range(k, horizon);
        if (!range) continue;
        double prior = 0.0;
        for (std::size_t i = range->first; i < range->second; ++i) prior += average_strength[i];
        prior /= static_cast<double>(range->second - range->first);
        if (!(prior > 0.0)) {
            throw DataError("rs_series: prior average strength is zero at window " +
                            std::to_string(distributions[k].window_index));
        }
        out.values[k] = average_strength[k] / prior;
    }
    return out;
}

Moments moments(const Eigen::VectorXd& values) {
    if (values.size() < 2) throw DataError("moments need at least 2 values");
    const double n = static_cast<double>(values.size());
    Moments m;
    m.mean = values.mean();
    const Eigen::ArrayXd centered = values.array() - m.mean;
    const double m2 = centered.square().mean();
    m.variance = centered.square().sum() / (n - 1.0);
    if (m2 > 0.0) {
        m.skewness = centered.cube().mean() / std::pow(m2, 1.5);
        m.kurtosis = centered.square().square().mean() / (m2 * m2);
    }
    return m;
}

std::vector<MetricSeries> moment_series(std::span<const StrengthDistribution> distributions) {
    std::vector<MetricSeries> out(4);
    out[0].name = "mean";
    out[1].name = "variance";
    out[2].name = "skewness";
    out[3].name = "kurtosis";
    for (auto& s : out) s.values.reserve(distributions.size());
    for (const auto& d : distributions) {
        const Moments m = moments(d.strengths);
        out[0].values.emplace_back(m.mean);
        out[1].values.emplace_back(m.variance);
        out[2].values.push_back(m.skewness);
        out[3].values.push_back(m.kurtosis);
    }
    return out;
}

namespace {

MetricSeries standardized(const MetricSeries& s) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : s.values)
        if (v) {
            sum += *v;
            ++n;
        }
    if (n < 2) return s;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& v : s.values)
        if (v) ss += (*v - mean) * (*v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) return s;
    MetricSeries out = s;
    for (auto& v : out.values)
        if (v) v = (*v - mean) / sd;
    return out;
}

}  // namespace

MetricSeries combine(double a, const MetricSeries& first, const MetricSeries& second, bool zscore) {
    if (!(a >= 0.0 && a <= 1.0)) throw UsageError("mixing constant must lie in [0, 1]");
    if (first.size() != second.size()) throw DataError("combine: series lengths differ");
    const MetricSeries& lhs = zscore ? standardized(first) : first;
    const MetricSeries& rhs = zscore ? standardized(second) : second;

    MetricSeries out;
    out.name = first.name + "+" + second.name;
    out.values.assign(first.size(), std::nullopt);
    for (std::size_t k = 0; k < first.size(); ++k) {
        if (lhs.values[k] && rhs.values[k]) out.values[k] = a * *lhs.values[k] + (1.0 - a) * *rhs.values[k];
    }
    return out;
}

GridSearchResult grid_search_a(const MetricSeries& first, const MetricSeries& second, std::span<const double> target,
                               RegressionKind kind, double step, bool zscore, unsigned threads) {
    if (!(step > 0.0 && step <= 1.0)) throw UsageError("grid step must lie in (0, 1]");
    const double intervals = std::round(1.0 / step);
    if (std::abs(intervals * step - 1.0) > 1e-9) throw UsageError("grid step must divide [0, 1] evenly");
    const auto points = static_cast<std::size_t>(intervals) + 1;

    {
        const MetricSeries probe = combine(0.5, first, second);
        if (align(probe, target).x.empty()) {
            throw DataError("grid search: " + first.name + " and " + second.name + " have no defined overlap with the target");
        }
    }

    GridSearchResult result;
    result.grid.resize(points);
    result.scores.assign(points, 0.0);
    std::vector<std::size_t> samples(points, 0);
    for (std::size_t i = 0; i < points; ++i) result.grid[i] = static_cast<double>(i) / intervals;

    parallel_for(points, threads, [&](std::size_t i) {
        const MetricSeries combined = combine(result.grid[i], first, second, zscore);
        const AlignedPairs pairs = align(combined, target);
        samples[i] = pairs.x.size();
        try {
            result.scores[i] = polyfit(pairs.x, pairs.y, degree_of(kind)).r2;
        } catch (const Error&) {
            result.scores[i] = 0.0;
        }
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < points; ++i)
        if (result.scores[i] > result.scores[best]) best = i;

    CombinedPredictor& c = result.best;
    c.first = first.name;
    c.second = second.name;
    c.a = result.grid[best];
    c.score = result.scores[best];
    c.kind = kind;
    c.samples = samples[best];
    c.series = combine(c.a, first, second, zscore);
    return result;
}

}  // namespace minet
