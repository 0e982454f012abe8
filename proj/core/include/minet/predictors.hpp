#pragma once

#include "minet/metric_series.hpp"
#include "minet/network.hpp"
#include "minet/regression.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minet {

/// Number of prior windows averaged into the reference; nullopt means every prior window.
struct Horizon {
    std::optional<std::size_t> windows;

    static Horizon all() { return {}; }
    static Horizon of(std::size_t s) { return {s}; }
    bool is_all() const { return !windows.has_value(); }
    std::string label() const { return is_all() ? "All" : std::to_string(*windows); }
    static Horizon parse(const std::string& text);
    friend bool operator==(const Horizon&, const Horizon&) = default;
};

inline constexpr double kDefaultKldEpsilon = 1e-10;

/// Bin-wise mean of histograms that share one grid.
Histogram prior_average(std::span<const Histogram> histograms);

/// D_KL(p || q) in nats after adding `epsilon` to every bin of both and renormalizing.
double kld(const Histogram& p, const Histogram& q, double epsilon = kDefaultKldEpsilon);

/// KLD of each window's strength histogram from the average of its s predecessors.
/// Name "KLD-<s>"; undefined for t <= s (t = 1 only, for All).
MetricSeries kld_series(std::span<const StrengthDistribution> distributions, Horizon horizon,
                        double epsilon = kDefaultKldEpsilon);

/// Mean node strength of each window over the mean of its s predecessors' mean strengths. Name "RS-<s>".
MetricSeries rs_series(std::span<const StrengthDistribution> distributions, Horizon horizon);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;             // n - 1 denominator
    std::optional<double> skewness;    // m3 / m2^1.5 with population central moments
    std::optional<double> kurtosis;    // m4 / m2^2, not excess
};

Moments moments(const Eigen::VectorXd& values);

/// mean, variance, skewness, kurtosis series over all windows.
std::vector<MetricSeries> moment_series(std::span<const StrengthDistribution> distributions);

/// Pointwise a*A + (1 - a)*B; undefined where either side is. With zscore set,
/// each input is standardized over its defined entries first.
MetricSeries combine(double a, const MetricSeries& first, const MetricSeries& second, bool zscore = false);

struct CombinedPredictor {
    std::string first;
    std::string second;
    double a = 0.0;
    double score = 0.0;  // R^2 of the fit at a
    RegressionKind kind = RegressionKind::linear;
    std::size_t samples = 0;
    MetricSeries series;
};

struct GridSearchResult {
    CombinedPredictor best;
    std::vector<double> grid;    // every a evaluated
    std::vector<double> scores;  // R^2 per grid point, 0 where the fit is degenerate
};

/// Exhaustive scan of a over {0, step, 2 step, ..., 1}, maximizing R^2 of
/// `kind` regression of target on the combination; ties go to the smaller a.
GridSearchResult grid_search_a(const MetricSeries& first, const MetricSeries& second, std::span<const double> target,
                               RegressionKind kind, double step = 0.001, bool zscore = false, unsigned threads = 1);

}  // namespace minet
