#pragma once

#include "minet/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace minet {

/// How a 60-sample window series is cut into discrete labels.
struct BinRule {
    enum class Strategy {
        equal_width_count,  // k equal-width bins over [min, max]
        equal_width_width,  // bins of fixed width w starting at min
        equal_frequency,    // k bins holding (roughly) equal sample counts
    };

    Strategy strategy = Strategy::equal_width_count;
    double parameter = 12.0;

    static BinRule equal_width(std::size_t bins) { return {Strategy::equal_width_count, static_cast<double>(bins)}; }
    static BinRule fixed_width(double width) { return {Strategy::equal_width_width, width}; }
    static BinRule equal_frequency(std::size_t bins) { return {Strategy::equal_frequency, static_cast<double>(bins)}; }

    /// ceil(window_length / 5) equal-width bins, i.e. about five samples per bin.
    static BinRule default_for(std::size_t window_length) { return equal_width((window_length + 4) / 5); }

    void validate() const;
    std::string describe() const;
    static BinRule parse(const std::string& strategy, double parameter);
};

std::vector<int> discretize(std::span<const double> series, const BinRule& rule);

enum class MiMode {
    standard,  // full sum over every occupied joint cell
    literal,   // skip cells whose two bin labels are equal
};

/// Mutual information of two label sequences in nats, from the empirical joint histogram.
double mutual_information(std::span<const int> x, std::span<const int> y, MiMode mode = MiMode::standard);

/// Plug-in entropy of a label sequence, in nats.
double label_entropy(std::span<const int> labels);

/// Symmetric, zero-diagonal, non-negative MI weights for one window.
struct MiMatrix {
    std::size_t window_index = 0;
    Eigen::MatrixXd weights;

    std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
};

enum class SeriesMode { prices, returns };

struct MiOptions {
    BinRule rule = BinRule::equal_width(12);
    MiMode mode = MiMode::standard;
    SeriesMode series = SeriesMode::prices;
    unsigned threads = 1;
};

MiMatrix mi_matrix(const HourWindow& window, const MiOptions& options = {});

/// Throws DataError unless `m` is square, symmetric, zero-diagonal and non-negative.
void check_mi_matrix(const MiMatrix& m);

}  // namespace minet
