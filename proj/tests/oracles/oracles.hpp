#pragma once

// Slow, direct reference implementations used only by the tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Mutual information summed cell by cell over the joint count table.
inline double mutual_information(const std::vector<int>& x, const std::vector<int>& y, bool skip_equal = false) {
    std::map<std::pair<int, int>, long> joint;
    std::map<int, long> px, py;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ++joint[{x[i], y[i]}];
        ++px[x[i]];
        ++py[y[i]];
    }
    const long double n = static_cast<long double>(x.size());
    long double total = 0;
    for (const auto& [cell, count] : joint) {
        if (skip_equal && cell.first == cell.second) continue;
        const long double pxy = count / n;
        const long double pa = px[cell.first] / n;
        const long double pb = py[cell.second] / n;
        total += pxy * std::log(pxy / (pa * pb));
    }
    return static_cast<double>(total);
}

inline double entropy(const std::vector<int>& labels) {
    std::map<int, long> counts;
    for (int l : labels) ++counts[l];
    long double h = 0;
    for (const auto& [label, c] : counts) {
        const long double p = static_cast<long double>(c) / labels.size();
        h -= p * std::log(p);
    }
    return static_cast<double>(h);
}

// Equal-width labels written out from the bin edges.
inline std::vector<int> equal_width_labels(const std::vector<double>& v, int k) {
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    std::vector<int> out(v.size(), 0);
    if (hi == lo) return out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        int b = 0;
        while (b < k - 1 && v[i] >= lo + (hi - lo) * (b + 1) / k) ++b;
        out[i] = b;
    }
    return out;
}

inline double kld(const std::vector<double>& p, const std::vector<double>& q, double eps) {
    long double sp = 0, sq = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sp += p[i] + eps;
        sq += q[i] + eps;
    }
    long double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const long double a = (p[i] + eps) / sp;
        const long double b = (q[i] + eps) / sq;
        d += a * std::log(a / b);
    }
    return static_cast<double>(d);
}

struct Moments {
    double mean, variance, skewness, kurtosis;
};

inline Moments moments(const std::vector<double>& v) {
    const long double n = static_cast<long double>(v.size());
    long double s = 0;
    for (double x : v) s += x;
    const long double mean = s / n;
    long double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
        const long double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    Moments m;
    m.mean = static_cast<double>(mean);
    m.variance = static_cast<double>(m2 / (n - 1));
    const long double pm2 = m2 / n;
    m.skewness = static_cast<double>((m3 / n) / std::pow(pm2, 1.5L));
    m.kurtosis = static_cast<double>((m4 / n) / (pm2 * pm2));
    return m;
}

// Principal eigenvector from a full symmetric eigendecomposition, sign fixed nonnegative.
inline Eigen::VectorXd principal_eigenvector(const Eigen::MatrixXd& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    Eigen::VectorXd v = es.eigenvectors().col(w.rows() - 1);
    if (v.sum() < 0) v = -v;
    return v / v.norm();
}

// Betweenness by enumerating every simple path between each unordered pair.
// Paths longer than the best found so far (beyond a relative tolerance) are pruned.
inline std::vector<double> betweenness(const Eigen::MatrixXd& dist) {
    const int n = static_cast<int>(dist.rows());
    std::vector<long double> bc(n, 0);
    for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) {
            long double best = std::numeric_limits<long double>::infinity();
            std::vector<std::pair<long double, std::vector<int>>> found;
            std::vector<int> path{s};
            std::vector<bool> on(n, false);
            on[s] = true;
            std::function<void(int, long double)> walk = [&](int u, long double len) {
                if (len > best * (1 + 1e-9L)) return;
                if (u == t) {
                    found.push_back({len, path});
                    best = std::min(best, len);
                    return;
                }
                for (int v = 0; v < n; ++v) {
                    if (on[v] || !(dist(u, v) > 0) || !std::isfinite(dist(u, v))) continue;
                    on[v] = true;
                    path.push_back(v);
                    walk(v, len + dist(u, v));
                    path.pop_back();
                    on[v] = false;
                }
            };
            walk(s, 0);
            std::vector<const std::vector<int>*> shortest;
            for (const auto& [len, p] : found)
                if (len <= best * (1 + 1e-9L)) shortest.push_back(&p);
            if (shortest.empty()) continue;
            for (const auto* p : shortest)
                for (std::size_t i = 1; i + 1 < p->size(); ++i) bc[(*p)[i]] += 1.0L / shortest.size();
        }
    }
    std::vector<double> out(n, 0.0);
    if (n > 2) {
        const long double norm = (n - 1) * (n - 2) / 2.0L;
        for (int v = 0; v < n; ++v) out[v] = static_cast<double>(bc[v] / norm);
    }
    return out;
}

// Q = (1/2m) sum_ij (w_ij - s_i s_j / 2m) delta(c_i, c_j)
inline double modularity(const Eigen::MatrixXd& w, const std::vector<int>& c) {
    const Eigen::Index n = w.rows();
    long double m2 = 0;
    std::vector<long double> s(n, 0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            s[i] += w(i, j);
            m2 += w(i, j);
        }
    long double q = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (c[i] == c[j]) q += w(i, j) - s[i] * s[j] / m2;
    return static_cast<double>(q / m2);
}

// Least squares on the raw Vandermonde design via long-double normal equations.
inline std::vector<double> least_squares(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    const int k = degree + 1;
    std::vector<std::vector<long double>> a(k, std::vector<long double>(k + 1, 0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<long double> row(k);
        long double p = 1;
        for (int j = 0; j < k; ++j) {
            row[j] = p;
            p *= x[i];
        }
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) a[r][c] += row[r] * row[c];
            a[r][k] += row[r] * y[i];
        }
    }
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            const long double f = a[r][col] / a[col][col];
            for (int c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> coef(k);
    for (int j = 0; j < k; ++j) coef[j] = static_cast<double>(a[j][k] / a[j][j]);
    return coef;
}

inline double r_squared(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& coef) {
    long double mean = 0;
    for (double v : y) mean += v;
    mean /= y.size();
    long double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double f = 0, p = 1;
        for (double c : coef) {
            f += c * p;
            p *= x[i];
        }
        ss_res += (y[i] - f) * (y[i] - f);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return ss_tot == 0 ? 0.0 : static_cast<double>(1 - ss_res / ss_tot);
}

// OLS slope of y_t on (1, y_{t-1}).
inline double ar1_slope(const std::vector<double>& y) {
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const long double n = static_cast<long double>(y.size() - 1);
    for (std::size_t t = 1; t < y.size(); ++t) {
        sx += y[t - 1];
        sy += y[t];
        sxx += static_cast<long double>(y[t - 1]) * y[t - 1];
        sxy += static_cast<long double>(y[t - 1]) * y[t];
    }
    return static_cast<double>((sxy - sx * sy / n) / (sxx - sx * sx / n));
}

// Random symmetric nonnegative weight matrix with zero diagonal; edges kept with probability `density`.
inline Eigen::MatrixXd random_weights(int n, std::mt19937_64& rng, double density = 1.0) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng) < density) w(i, j) = w(j, i) = u(rng);
    return w;
}

}  // namespace oracle
