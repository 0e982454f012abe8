#include "minet/nelder_mead.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace minet;

TEST(NelderMead, Quadratic) {
    const auto f = [](std::span<const double> x) {
        return (x[0] - 3) * (x[0] - 3) + 2 * (x[1] + 1) * (x[1] + 1) + 0.5 * (x[2] - 0.25) * (x[2] - 0.25);
    };
    const NelderMeadResult r = nelder_mead(f, {0, 0, 0});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 3, 1e-3);
    EXPECT_NEAR(r.x[1], -1, 1e-3);
    EXPECT_NEAR(r.x[2], 0.25, 1e-3);
    EXPECT_LT(r.value, 1e-6);
}

TEST(NelderMead, Rosenbrock) {
    const auto f = [](std::span<const double> x) {
        return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
    };
    NelderMeadOptions opt;
    opt.max_iterations = 10000;
    opt.tolerance = 1e-14;
    const NelderMeadResult r = nelder_mead(f, {-1.2, 1.0}, opt);
    EXPECT_NEAR(r.x[0], 1, 1e-3);
    EXPECT_NEAR(r.x[1], 1, 2e-3);
}

TEST(NelderMead, DeterministicAndBudgeted) {
    const auto f = [](std::span<const double> x) { return std::cos(x[0]) + x[0] * x[0] / 10 + std::abs(x[1]); };
    const NelderMeadResult a = nelder_mead(f, {1, 1});
    const NelderMeadResult b = nelder_mead(f, {1, 1});
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.value, b.value);
    NelderMeadOptions tiny;
    tiny.max_iterations = 5;
    EXPECT_LE(nelder_mead(f, {1, 1}, tiny).iterations, 5);
}

TEST(NelderMead, InfinitePenaltyIsAvoided) {
    const auto f = [](std::span<const double> x) {
        return x[0] < 0 ? std::numeric_limits<double>::infinity() : (x[0] - 2) * (x[0] - 2);
    };
    const NelderMeadResult r = nelder_mead(f, {0.5});
    EXPECT_NEAR(r.x[0], 2, 1e-3);
}
