#pragma once

#include <functional>
#include <span>
#include <vector>

namespace minet {

struct NelderMeadOptions {
    int max_iterations = 2000;  // across all restarts
    double tolerance = 1e-8;    // relative spread of objective values over the simplex
    double initial_step = 0.1;
    int max_restarts = 10;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free downhill simplex. Deterministic for a given start; the
/// search restarts from the best vertex until a restart stops improving.
NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace minet
