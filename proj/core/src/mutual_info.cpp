#include "minet/mutual_info.hpp"

#include "minet/error.hpp"
#include "minet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minet {

namespace {

constexpr double kNegativeClamp = 1e-12;

int label_count(std::span<const int> labels) {
    int k = 0;
    for (int v : labels) {
        if (v < 0) throw UsageError("bin labels must be non-negative");
        k = std::max(k, v + 1);
    }
    return k;
}

// Summed by count value rather than by cell, so transposing a joint table gives the same bits.
double sum_n_log_n(const std::vector<int>& counts) {
    std::vector<int> tally;
    for (int c : counts) {
        if (c <= 1) continue;
        if (static_cast<std::size_t>(c) >= tally.size()) tally.resize(static_cast<std::size_t>(c) + 1, 0);
        ++tally[static_cast<std::size_t>(c)];
    }
    double s = 0.0;
    for (std::size_t c = 2; c < tally.size(); ++c)
        if (tally[c] > 0) s += tally[c] * (static_cast<double>(c) * std::log(static_cast<double>(c)));
    return s;
}

// Per-series data reused across every pair of a window.
struct LabelledSeries {
    std::vector<int> labels;
    std::vector<int> counts;
    double n_log_n = 0.0;  // sum over bins of c log c
};

LabelledSeries label_series(std::span<const double> series, const BinRule& rule) {
    LabelledSeries out;
    out.labels = discretize(series, rule);
    out.counts.assign(static_cast<std::size_t>(label_count(out.labels)), 0);
    for (int v : out.labels) ++out.counts[static_cast<std::size_t>(v)];
    out.n_log_n = sum_n_log_n(out.counts);
    return out;
}

// I = log n + (1/n) [ sum c_xy log c_xy - sum c_x log c_x - sum c_y log c_y ]
double pair_mi(const LabelledSeries& a, const LabelledSeries& b, std::vector<int>& joint, MiMode mode) {
    const std::size_t n = a.labels.size();
    const std::size_t ky = b.counts.size();
    joint.assign(a.counts.size() * ky, 0);
    for (std::size_t i = 0; i < n; ++i)
        ++joint[static_cast<std::size_t>(a.labels[i]) * ky + static_cast<std::size_t>(b.labels[i])];

    const double dn = static_cast<double>(n);
    if (mode == MiMode::standard) {
        const double mi = std::log(dn) + (sum_n_log_n(joint) - (a.n_log_n + b.n_log_n)) / dn;
        return mi < 0.0 && mi > -kNegativeClamp ? 0.0 : mi;
    }

    double mi = 0.0;
    for (std::size_t x = 0; x < a.counts.size(); ++x) {
        for (std::size_t y = 0; y < ky; ++y) {
            const int c = joint[x * ky + y];
            if (c == 0 || x == y) continue;
            mi += c * std::log(c * dn / (static_cast<double>(a.counts[x]) * b.counts[y]));
        }
    }
    return mi / dn;
}

}  // namespace

void BinRule::validate() const {
    switch (strategy) {
        case Strategy::equal_width_count:
        case Strategy::equal_frequency:
            if (!(parameter >= 2.0) || parameter != std::floor(parameter)) {
                throw UsageError("bin count must be an integer >= 2, got " + std::to_string(parameter));
            }
            break;
        case Strategy::equal_width_width:
            if (!(parameter > 0.0) || !std::isfinite(parameter)) {
                throw UsageError("bin width must be positive, got " + std::to_string(parameter));
            }
            break;
    }
}

std::string BinRule::describe() const {
    switch (strategy) {
        case Strategy::equal_width_count: return "equal_width_count";
        case Strategy::equal_width_width: return "equal_width_width";
        case Strategy::equal_frequency: return "equal_frequency";
    }
    return "unknown";
}

BinRule BinRule::parse(const std::string& strategy, double parameter) {
    BinRule rule;
    if (strategy == "equal_width_count") rule.strategy = Strategy::equal_width_count;
    else if (strategy == "equal_width_width") rule.strategy = Strategy::equal_width_width;
    else if (strategy == "equal_frequency") rule.strategy = Strategy::equal_frequency;
    else throw UsageError("unknown bin strategy '" + strategy + "'");
    rule.parameter = parameter;
    rule.validate();
    return rule;
}

std::vector<int> discretize(std::span<const double> series, const BinRule& rule) {
    rule.validate();
    std::vector<int> labels(series.size(), 0);
    if (series.empty()) return labels;
    for (double v : series)
        if (!std::isfinite(v)) throw DataError("cannot discretize a non-finite value");

    const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) return labels;

    switch (rule.strategy) {
        case BinRule::Strategy::equal_width_count: {
            const int k = static_cast<int>(rule.parameter);
            const double range = hi - lo;
            for (std::size_t i = 0; i < series.size(); ++i) {
                const int b = static_cast<int>(std::floor((series[i] - lo) * k / range));
                labels[i] = std::clamp(b, 0, k - 1);
            }
            break;
        }
        case BinRule::Strategy::equal_width_width: {
            const double w = rule.parameter;
            const int bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / w)));
            for (std::size_t i = 0; i < series.size(); ++i) {
                const int b = static_cast<int>(std::floor((series[i] - lo) / w));
                labels[i] = std::clamp(b, 0, bins - 1);
            }
            break;
        }
        case BinRule::Strategy::equal_frequency: {
            const auto k = static_cast<std::size_t>(rule.parameter);
            const std::size_t n = series.size();
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return series[a] < series[b]; });
            // Ties share the label of the first rank in their group.
            std::size_t rank = 0;
            while (rank < n) {
                std::size_t end = rank;
                while (end < n && series[order[end]] == series[order[rank]]) ++end;
                const int label = static_cast<int>(std::min(k - 1, rank * k / n));
                for (std::size_t r = rank; r < end; ++r) labels[order[r]] = label;
                rank = end;
            }
            break;
        }
    }
    return labels;
}

double label_entropy(std::span<const int> labels) {
    if (labels.empty()) return 0.0;
    std::vector<int> counts(static_cast<std::size_t>(label_count(labels)), 0);
    for (int v : labels) ++counts[static_cast<std::size_t>(v)];
    const double n = static_cast<double>(labels.size());
    return std::log(n) - sum_n_log_n(counts) / n;
}

double mutual_information(std::span<const int> x, std::span<const int> y, MiMode mode) {
    if (x.size() != y.size()) {
        throw UsageError("mutual_information: length mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
    }
    if (x.size() < 2) throw UsageError("mutual_information needs at least 2 samples");

    const auto prepare = [](std::span<const int> labels) {
        LabelledSeries s;
        s.labels.assign(labels.begin(), labels.end());
        s.counts.assign(static_cast<std::size_t>(label_count(labels)), 0);
        for (int v : labels) ++s.counts[static_cast<std::size_t>(v)];
        s.n_log_n = sum_n_log_n(s.counts);
        return s;
    };
    std::vector<int> joint;
    return pair_mi(prepare(x), prepare(y), joint, mode);
}

MiMatrix mi_matrix(const HourWindow& window, const MiOptions& options) {
    options.rule.validate();
    const Eigen::MatrixXd series =
        options.series == SeriesMode::returns ? log_returns(window.prices) : window.prices;
    const auto n = static_cast<std::size_t>(series.cols());
    if (n < 2) throw DataError("window " + std::to_string(window.window_index) + " has fewer than 2 tickers");

    std::vector<LabelledSeries> labelled(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto col = series.col(static_cast<Eigen::Index>(c));
        labelled[c] = label_series(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                   options.rule);
    }

    MiMatrix m;
    m.window_index = window.window_index;
    m.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, options.threads, [&](std::size_t i) {
        std::vector<int> joint;
        for (std::size_t j = i + 1; j < n; ++j) {
            // Literal mode can go negative; the network needs non-negative weights.
            const double w = std::max(0.0, pair_mi(labelled[i], labelled[j], joint, options.mode));
            m.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
            m.weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = w;
        }
    });
    return m;
}

void check_mi_matrix(const MiMatrix& m) {
    const auto& w = m.weights;
    const std::string where = "window " + std::to_string(m.window_index) + ": ";
    if (w.rows() != w.cols()) throw DataError(where + "MI matrix is not square");
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        if (w(i, i) != 0.0) throw DataError(where + "MI matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (!std::isfinite(w(i, j)) || w(i, j) < 0.0) throw DataError(where + "MI weights must be non-negative");
            if (w(i, j) != w(j, i)) throw DataError(where + "MI matrix is not symmetric");
        }
    }
}

}  // namespace minet
