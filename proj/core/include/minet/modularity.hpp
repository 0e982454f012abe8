#pragma once

#include "minet/mutual_info.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace minet {

struct ModularityResult {
    std::size_t window_index = 0;
    std::vector<int> partition;  // community id per node, numbered by first appearance
    double q = 0.0;
};

/// Weighted modularity Q of a given partition of a symmetric weight matrix.
double modularity_of(const Eigen::MatrixXd& weights, std::span<const int> partition);

/// Greedy modularity maximization: local moves over a seeded node order,
/// then aggregation of communities into nodes, repeated until nothing moves.
ModularityResult modularity(const MiMatrix& m, std::uint64_t seed = 0);

}  // namespace minet
