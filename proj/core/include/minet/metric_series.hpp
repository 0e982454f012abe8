#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minet {

/// One scalar per window; values[k] belongs to window t = k + 1.
/// std::nullopt marks windows without enough history.
struct MetricSeries {
    std::string name;
    std::vector<std::optional<double>> values;

    std::size_t size() const { return values.size(); }
    std::size_t defined_count() const;
};

/// Pairs (metric[k], target[k]) over the indices where both exist.
struct AlignedPairs {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::size_t> index;  // k of each pair
};

AlignedPairs align(const MetricSeries& metric, std::span<const double> target);

}  // namespace minet
