#pragma once

#include "minet/mutual_info.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>

namespace minet {

struct Summary {
    double mean = 0.0;
    double median = 0.0;  // average of the two middle values for even N
    double maximum = 0.0;
};

Summary summarize(std::span<const double> values);
Summary summarize(const Eigen::VectorXd& values);

enum class CentralityKind { eigenvector, betweenness };

struct CentralitySummary {
    std::size_t window_index = 0;
    CentralityKind kind = CentralityKind::eigenvector;
    Eigen::VectorXd values;
    Summary summary;
    int iterations = 0;  // power iterations used (eigenvector only)
};

/// Principal eigenvector of the weight matrix by power iteration from the
/// uniform vector, unit Euclidean norm. The iteration runs on W + c*I with
/// c = half the mean node strength, which has the same eigenvectors but
/// cannot oscillate on bipartite graphs. Throws NumericError after max_iter.
CentralitySummary eigenvector_centrality(const MiMatrix& m, double tol = 1e-9, int max_iter = 1000);

/// Similarity to edge length. Zero weights mean no edge.
enum class DistanceTransform {
    inverse,    // d = 1 / w
    max_minus,  // d = max_w - w
};

std::string to_string(DistanceTransform t);
DistanceTransform parse_distance_transform(const std::string& name);

/// Shortest-path betweenness on the transformed distances (Brandes accumulation,
/// dense Dijkstra from every source), normalized by (N-1)(N-2)/2.
CentralitySummary betweenness_centrality(const MiMatrix& m, DistanceTransform transform = DistanceTransform::inverse);

}  // namespace minet
