#include "minet/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minet {

namespace {

bool spread_small(double best, double worst, double tol) {
    return std::abs(worst - best) <= tol * (std::abs(best) + tol);
}

// One simplex run; returns true when the spread criterion was met.
bool simplex_run(const Objective& f, std::vector<double>& x, double& fx, double step, int& budget, double tol) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> vertex(n + 1, x);
    std::vector<double> value(n + 1, fx);
    for (std::size_t i = 0; i < n; ++i) {
        vertex[i + 1][i] += step;
        value[i + 1] = f(vertex[i + 1]);
    }

    std::vector<std::size_t> idx(n + 1);
    std::vector<double> centroid(n), reflected(n), trial(n);
    const auto point = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (from[j] - centroid[j]);
    };

    bool converged = false;
    while (budget > 0) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        const std::size_t best = idx.front();
        const std::size_t worst = idx.back();
        const std::size_t second = idx[n - 1];
        if (spread_small(value[best], value[worst], tol)) {
            converged = true;
            break;
        }
        --budget;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += vertex[idx[i]][j];
        for (double& c : centroid) c /= static_cast<double>(n);

        point(-1.0, vertex[worst], reflected);
        const double f_reflected = f(reflected);
        if (f_reflected < value[best]) {
            point(-2.0, vertex[worst], trial);
            const double f_expanded = f(trial);
            if (f_expanded < f_reflected) {
                vertex[worst] = trial;
                value[worst] = f_expanded;
            } else {
                vertex[worst] = reflected;
                value[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < value[second]) {
            vertex[worst] = reflected;
            value[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < value[worst];
        point(outside ? -0.5 : 0.5, vertex[worst], trial);
        const double f_contracted = f(trial);
        if (f_contracted < (outside ? f_reflected : value[worst])) {
            vertex[worst] = trial;
            value[worst] = f_contracted;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) vertex[i][j] = vertex[best][j] + 0.5 * (vertex[i][j] - vertex[best][j]);
            value[i] = f(vertex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
    x = vertex[best];
    fx = value[best];
    return converged;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start, const NelderMeadOptions& options) {
    NelderMeadResult result;
    result.x = std::move(start);
    result.value = objective(result.x);
    if (result.x.empty()) {
        result.converged = true;
        return result;
    }

    int budget = options.max_iterations;
    double step = options.initial_step;
    for (int restart = 0; restart <= options.max_restarts && budget > 0; ++restart) {
        const double before = result.value;
        const bool converged = simplex_run(objective, result.x, result.value, step, budget, options.tolerance);
        result.converged = converged;
        if (!converged) break;
        if (restart > 0 && spread_small(result.value, before, options.tolerance)) break;
        step *= 0.5;
    }
    result.iterations = options.max_iterations - budget;
    return result;
}

}  // namespace minet
