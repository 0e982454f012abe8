#include "minet/network.hpp"

#include "minet/error.hpp"

#include <algorithm>
#include <cmath>

namespace minet {

Eigen::VectorXd node_strengths(const MiMatrix& m) {
    return m.weights.rowwise().sum();
}

std::vector<double> strength_grid(double max_strength, double width) {
    if (!(width > 0.0) || !std::isfinite(width)) throw UsageError("histogram bin width must be positive");
    if (!(max_strength >= 0.0) || !std::isfinite(max_strength)) throw DataError("strengths must be finite and >= 0");
    const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(max_strength / width)));
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) edges[k] = static_cast<double>(k) * width;
    return edges;
}

Histogram strength_histogram(const Eigen::VectorXd& strengths, std::span<const double> edges) {
    if (edges.size() < 2) throw UsageError("a histogram grid needs at least two edges");
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw UsageError("histogram edges must be strictly increasing");
    }
    if (strengths.size() == 0) throw DataError("cannot build a histogram of zero nodes");

    Histogram h;
    h.edges.assign(edges.begin(), edges.end());
    h.mass.assign(edges.size() - 1, 0.0);
    for (double s : strengths) {
        if (!(s >= edges.front() && s <= edges.back())) {
            throw DataError("strength " + std::to_string(s) + " outside histogram grid [" +
                            std::to_string(edges.front()) + ", " + std::to_string(edges.back()) + "]");
        }
        auto it = std::upper_bound(edges.begin(), edges.end(), s);
        auto bin = static_cast<std::size_t>(it - edges.begin()) - 1;
        bin = std::min(bin, h.mass.size() - 1);
        h.mass[bin] += 1.0;
    }
    const double n = static_cast<double>(strengths.size());
    for (double& p : h.mass) p /= n;
    return h;
}

void attach_histograms(std::span<StrengthDistribution> distributions, double bin_width) {
    double max_strength = 0.0;
    for (const auto& d : distributions)
        if (d.strengths.size() > 0) max_strength = std::max(max_strength, d.strengths.maxCoeff());
    const auto edges = strength_grid(max_strength, bin_width);
    for (auto& d : distributions) d.histogram = strength_histogram(d.strengths, edges);
}

std::vector<StrengthDistribution> strength_distributions(std::span<const MiMatrix> matrices, double bin_width) {
    std::vector<StrengthDistribution> out(matrices.size());
    for (std::size_t w = 0; w < matrices.size(); ++w) {
        out[w].window_index = matrices[w].window_index;
        out[w].strengths = node_strengths(matrices[w]);
    }
    attach_histograms(out, bin_width);
    return out;
}

}  // namespace minet
