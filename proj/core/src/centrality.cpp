#include "minet/centrality.hpp"

#include "minet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace minet {

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw DataError("summarize: empty vector");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Summary s;
    double total = 0.0;
    for (double v : sorted) total += v;
    s.mean = total / static_cast<double>(sorted.size());
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    s.maximum = sorted.back();
    return s;
}

Summary summarize(const Eigen::VectorXd& values) {
    return summarize(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

CentralitySummary eigenvector_centrality(const MiMatrix& m, double tol, int max_iter) {
    const Eigen::MatrixXd& w = m.weights;
    const Eigen::Index n = w.rows();
    if (n == 0 || w.cols() != n) throw DataError("eigenvector centrality needs a non-empty square matrix");
    const double total = w.sum();
    if (!(total > 0.0)) throw DataError("eigenvector centrality of an all-zero matrix is undefined");

    const double shift = 0.5 * total / static_cast<double>(n);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd next(n);
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < max_iter) {
        ++it;
        next.noalias() = w * x;
        next += shift * x;
        next /= next.norm();
        residual = (next - x).cwiseAbs().maxCoeff();
        x.swap(next);
        if (residual < tol) break;
    }
    if (!(residual < tol)) {
        throw NumericError("eigenvector centrality did not converge in " + std::to_string(max_iter) +
                           " iterations (window " + std::to_string(m.window_index) +
                           ", residual " + std::to_string(residual) + ")");
    }

    CentralitySummary out;
    out.window_index = m.window_index;
    out.kind = CentralityKind::eigenvector;
    out.values = x.cwiseMax(0.0);
    out.values /= out.values.norm();
    out.summary = summarize(out.values);
    out.iterations = it;
    return out;
}

std::string to_string(DistanceTransform t) {
    return t == DistanceTransform::inverse ? "inverse" : "max_minus";
}

DistanceTransform parse_distance_transform(const std::string& name) {
    if (name == "inverse") return DistanceTransform::inverse;
    if (name == "max_minus") return DistanceTransform::max_minus;
    throw UsageError("unknown distance transform '" + name + "' (expected inverse or max_minus)");
}

CentralitySummary betweenness_centrality(const MiMatrix& m, DistanceTransform transform) {
    const Eigen::MatrixXd& w = m.weights;
    const auto n = static_cast<std::size_t>(w.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Row-major lengths; inf where there is no edge.
    std::vector<double> length(n * n, inf);
    const double max_w = n > 0 ? w.maxCoeff() : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double wij = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (i == j || !(wij > 0.0)) continue;
            const double d = transform == DistanceTransform::inverse ? 1.0 / wij : max_w - wij;
            // max_minus maps the heaviest edges to length 0; those are dropped like zero weights.
            if (d > 0.0) length[i * n + j] = d;
        }
    }

    std::vector<double> centrality(n, 0.0);
    std::vector<double> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<char> settled(n);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<std::size_t> order;
    order.reserve(n);

    for (std::size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(settled.begin(), settled.end(), 0);
        for (auto& p : preds) p.clear();
        order.clear();
        dist[s] = 0.0;
        sigma[s] = 1.0;

        for (;;) {
            std::size_t v = n;
            double best = inf;
            for (std::size_t u = 0; u < n; ++u) {
                if (!settled[u] && dist[u] < best) {
                    best = dist[u];
                    v = u;
                }
            }
            if (v == n) break;
            settled[v] = 1;
            order.push_back(v);

            const double* row = &length[v * n];
            for (std::size_t u = 0; u < n; ++u) {
                if (settled[u] || row[u] == inf) continue;
                const double candidate = dist[v] + row[u];
                const double tol = 1e-12 * std::max(candidate, 1.0);
                if (dist[u] == inf || candidate < dist[u] - tol) {
                    dist[u] = candidate;
                    sigma[u] = sigma[v];
                    preds[u].assign(1, v);
                } else if (std::abs(candidate - dist[u]) <= tol) {
                    sigma[u] += sigma[v];
                    preds[u].push_back(v);
                }
            }
        }

        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t x = *it;
            for (std::size_t v : preds[x]) delta[v] += sigma[v] / sigma[x] * (1.0 + delta[x]);
            if (x != s) centrality[x] += delta[x];
        }
    }

    CentralitySummary out;
    out.window_index = m.window_index;
    out.kind = CentralityKind::betweenness;
    out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (n >= 3) {
        // Each unordered pair was counted from both ends.
        const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
        for (std::size_t i = 0; i < n; ++i) out.values(static_cast<Eigen::Index>(i)) = centrality[i] / norm;
    }
    if (n > 0) out.summary = summarize(out.values);
    return out;
}

}  // namespace minet
