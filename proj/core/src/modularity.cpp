#include "minet/modularity.hpp"

#include "minet/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace minet {

namespace {

// Relabels ids to 0..C-1 in order of first appearance.
std::vector<int> canonical(std::span<const int> ids) {
    std::vector<int> map;
    std::vector<int> out(ids.size());
    int next = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto id = static_cast<std::size_t>(ids[i]);
        if (id >= map.size()) map.resize(id + 1, -1);
        if (map[id] < 0) map[id] = next++;
        out[i] = map[id];
    }
    return out;
}

// One round of local moves on graph g. Returns true if any node changed community.
bool local_moves(const Eigen::MatrixXd& g, std::vector<int>& community, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(g.rows());
    const Eigen::VectorXd k = g.rowwise().sum();
    const double m2 = k.sum();

    std::vector<double> tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) tot[static_cast<std::size_t>(community[i])] += k(static_cast<Eigen::Index>(i));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t i : order) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto own = static_cast<std::size_t>(community[i]);
            touched.clear();
            for (std::size_t j = 0; j < n; ++j) {
                const double wij = g(ii, static_cast<Eigen::Index>(j));
                if (j == i || wij <= 0.0) continue;
                const auto c = static_cast<std::size_t>(community[j]);
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += wij;
            }
            const double ki = k(ii);
            tot[own] -= ki;

            std::size_t best = own;
            double best_gain = link[own] - tot[own] * ki / m2;
            std::sort(touched.begin(), touched.end());
            for (std::size_t c : touched) {
                const double gain = link[c] - tot[c] * ki / m2;
                if (gain > best_gain + 1e-12 * m2) {
                    best_gain = gain;
                    best = c;
                }
            }
            tot[best] += ki;
            for (std::size_t c : touched) link[c] = 0.0;
            link[own] = 0.0;
            if (best != own) {
                community[i] = static_cast<int>(best);
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

}  // namespace

double modularity_of(const Eigen::MatrixXd& weights, std::span<const int> partition) {
    const auto n = static_cast<std::size_t>(weights.rows());
    if (partition.size() != n) throw UsageError("partition size does not match the graph");
    const double m2 = weights.sum();
    if (!(m2 > 0.0)) throw DataError("modularity of a graph with zero total weight is undefined");

    const std::vector<int> ids = canonical(partition);
    const auto communities = static_cast<std::size_t>(*std::max_element(ids.begin(), ids.end())) + 1;
    std::vector<double> inside(communities, 0.0);
    std::vector<double> total(communities, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ci = static_cast<std::size_t>(ids[i]);
        for (std::size_t j = 0; j < n; ++j) {
            const double wij = weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            total[ci] += wij;
            if (ids[j] == ids[i]) inside[ci] += wij;
        }
    }
    double q = 0.0;
    for (std::size_t c = 0; c < communities; ++c) q += inside[c] / m2 - (total[c] / m2) * (total[c] / m2);
    return q;
}

ModularityResult modularity(const MiMatrix& m, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(m.weights.rows());
    if (n == 0) throw DataError("modularity of an empty graph");
    if (!(m.weights.sum() > 0.0)) {
        throw DataError("window " + std::to_string(m.window_index) + ": modularity needs positive total weight");
    }

    std::mt19937_64 rng(seed);
    std::vector<int> membership(n);
    std::iota(membership.begin(), membership.end(), 0);

    Eigen::MatrixXd graph = m.weights;
    for (;;) {
        const auto size = static_cast<std::size_t>(graph.rows());
        std::vector<int> community(size);
        std::iota(community.begin(), community.end(), 0);
        if (!local_moves(graph, community, rng)) break;

        community = canonical(community);
        const auto count = static_cast<std::size_t>(*std::max_element(community.begin(), community.end())) + 1;
        for (int& c : membership) c = community[static_cast<std::size_t>(c)];
        if (count == size) break;

        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j)
                next(community[i], community[j]) += graph(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        graph = std::move(next);
        if (count == 1) break;
    }

    ModularityResult out;
    out.window_index = m.window_index;
    out.partition = canonical(membership);
    out.q = modularity_of(m.weights, out.partition);
    return out;
}

}  // namespace minet
