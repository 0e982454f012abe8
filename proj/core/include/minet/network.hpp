#pragma once

#include "minet/mutual_info.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace minet {

/// Weighted degree of every node: row sums of the MI matrix.
Eigen::VectorXd node_strengths(const MiMatrix& m);

/// Normalized histogram over explicit bin edges. Bins are [e_k, e_{k+1}),
/// except the last which is closed on the right.
struct Histogram {
    std::vector<double> edges;
    std::vector<double> mass;

    std::size_t bins() const { return mass.size(); }
    bool same_grid(const Histogram& other) const { return edges == other.edges; }
};

/// Edges 0, width, 2*width, ... up to the first edge >= max_strength (at least one bin).
std::vector<double> strength_grid(double max_strength, double width = 10.0);

/// Throws DataError if a strength falls outside the grid.
Histogram strength_histogram(const Eigen::VectorXd& strengths, std::span<const double> edges);

struct StrengthDistribution {
    std::size_t window_index = 0;
    Eigen::VectorXd strengths;
    Histogram histogram;
};

/// Builds every window's distribution on one run-wide grid.
/// Builds the run-wide grid from every strength vector and fills each histogram.
void attach_histograms(std::span<StrengthDistribution> distributions, double bin_width = 10.0);

std::vector<StrengthDistribution> strength_distributions(std::span<const MiMatrix> matrices, double bin_width = 10.0);

}  // namespace minet
