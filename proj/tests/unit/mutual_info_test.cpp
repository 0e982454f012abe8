#include "minet/error.hpp"
#include "minet/mutual_info.hpp"
#include "oracles/oracles.hpp"
#include "unit/support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace minet;

namespace {

std::vector<int> random_labels(std::size_t n, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, k - 1);
    std::vector<int> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

HourWindow window_of(const Eigen::MatrixXd& prices) {
    HourWindow w;
    w.window_index = 1;
    w.prices = prices;
    return w;
}

}  // namespace

TEST(Discretize, UniformRampFivePerBin) {
    std::vector<double> v(60);
    std::iota(v.begin(), v.end(), 1.0);
    const auto labels = discretize(v, BinRule::equal_width(12));
    for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(labels[i], static_cast<int>(i / 5)) << i;
}

TEST(Discretize, ConstantAndTwoPoint) {
    const std::vector<double> c(60, 3.25);
    for (int l : discretize(c, BinRule::equal_width(12))) EXPECT_EQ(l, 0);
    for (int l : discretize(c, BinRule::equal_frequency(4))) EXPECT_EQ(l, 0);
    EXPECT_EQ(discretize(std::vector<double>{0, 10}, BinRule::equal_width(2)), (std::vector<int>{0, 1}));
}

TEST(Discretize, FixedWidthAndEqualFrequency) {
    EXPECT_EQ(discretize(std::vector<double>{0, 4.9, 5, 12, 15}, BinRule::fixed_width(5)),
              (std::vector<int>{0, 0, 1, 2, 2}));
    std::vector<double> v{8, 1, 6, 3, 5, 2, 7, 4};
    const auto labels = discretize(v, BinRule::equal_frequency(4));
    EXPECT_EQ(labels, (std::vector<int>{3, 0, 2, 1, 2, 0, 3, 1}));
}

TEST(Discretize, MaximumInLastBinAndMatchesOracle) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto v = test_support::random_series(60, rng);
        const auto labels = discretize(v, BinRule::equal_width(12));
        EXPECT_EQ(labels, oracle::equal_width_labels(v, 12));
        const auto top = std::max_element(v.begin(), v.end()) - v.begin();
        EXPECT_EQ(labels[static_cast<std::size_t>(top)], 11);
        EXPECT_EQ(*std::min_element(labels.begin(), labels.end()), 0);
    }
}

TEST(BinRule, DefaultAndValidation) {
    const BinRule r = BinRule::default_for(60);
    EXPECT_EQ(r.strategy, BinRule::Strategy::equal_width_count);
    EXPECT_EQ(r.parameter, 12.0);
    EXPECT_EQ(BinRule::default_for(61).parameter, 13.0);
    EXPECT_THROW(BinRule::equal_width(1).validate(), UsageError);
    EXPECT_THROW(BinRule::fixed_width(0).validate(), UsageError);
    EXPECT_THROW(BinRule::parse("bogus", 3), UsageError);
    EXPECT_EQ(BinRule::parse("equal_frequency", 4).strategy, BinRule::Strategy::equal_frequency);
}

TEST(MutualInformation, ConstantIsZero) {
    std::mt19937_64 rng(1);
    const std::vector<int> x(60, 0);
    EXPECT_EQ(mutual_information(x, random_labels(60, 12, rng)), 0.0);
}

TEST(MutualInformation, IdenticalBalancedLabels) {
    std::vector<int> x(60);
    for (std::size_t i = 0; i < 60; ++i) x[i] = static_cast<int>(i % 2);
    EXPECT_NEAR(mutual_information(x, x), std::log(2.0), 1e-12);
    for (std::size_t i = 0; i < 60; ++i) x[i] = static_cast<int>(i % 5);
    EXPECT_NEAR(mutual_information(x, x), std::log(5.0), 1e-12);
}

TEST(MutualInformation, LengthMismatch) {
    EXPECT_THROW(mutual_information(std::vector<int>{0, 1}, std::vector<int>{0, 1, 1}), UsageError);
}

TEST(MutualInformation, MatchesBruteForceOracle) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_labels(60, 12, rng);
        auto y = random_labels(60, 12, rng);
        if (trial % 3 == 0)
            for (std::size_t i = 0; i < 60; i += 2) y[i] = x[i];
        EXPECT_NEAR(mutual_information(x, y), oracle::mutual_information(x, y), 1e-10);
        EXPECT_NEAR(mutual_information(x, y, MiMode::literal), oracle::mutual_information(x, y, true), 1e-10);
    }
}

TEST(MutualInformation, SymmetricNonnegativeAndSelfEntropy) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_labels(60, 2 + trial % 11, rng);
        const auto y = random_labels(60, 2 + trial % 7, rng);
        EXPECT_EQ(mutual_information(x, y), mutual_information(y, x));
        EXPECT_GE(mutual_information(x, y), 0.0);
        EXPECT_NEAR(mutual_information(x, x), label_entropy(x), 1e-10);
        EXPECT_NEAR(label_entropy(x), oracle::entropy(x), 1e-10);
    }
}

TEST(MutualInformation, InvariantUnderLabelPermutation) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_labels(60, 12, rng);
        const auto y = random_labels(60, 12, rng);
        std::vector<int> perm(12);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> px(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) px[i] = perm[static_cast<std::size_t>(x[i])] + 100;
        EXPECT_NEAR(mutual_information(px, y), mutual_information(x, y), 1e-12);
    }
}

TEST(MiMatrix, IdenticalColumns) {
    Eigen::MatrixXd p(60, 3);
    for (Eigen::Index r = 0; r < 60; ++r) p.row(r).setConstant(r < 30 ? 1.0 : 2.0);
    const MiMatrix m = mi_matrix(window_of(p), {BinRule::equal_width(2)});
    for (Eigen::Index i = 0; i < 3; ++i) {
        EXPECT_EQ(m.weights(i, i), 0.0);
        for (Eigen::Index j = 0; j < 3; ++j)
            if (i != j) { EXPECT_NEAR(m.weights(i, j), std::log(2.0), 1e-12); }
    }
}

TEST(MiMatrix, MatchesPairwiseOracleAndInvariants) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 2 + trial % 9;
        Eigen::MatrixXd p(60, n);
        std::vector<std::vector<int>> labels;
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto s = test_support::random_series(60, rng);
            for (Eigen::Index r = 0; r < 60; ++r) p(r, c) = s[static_cast<std::size_t>(r)];
            labels.push_back(oracle::equal_width_labels(s, 12));
        }
        MiOptions opt;
        opt.threads = 1 + trial % 3;
        const MiMatrix m = mi_matrix(window_of(p), opt);
        EXPECT_NO_THROW(check_mi_matrix(m));
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                EXPECT_EQ(m.weights(i, j), m.weights(j, i));
                EXPECT_GE(m.weights(i, j), 0.0);
                const double expect = i == j ? 0.0
                                             : oracle::mutual_information(labels[static_cast<std::size_t>(i)],
                                                                          labels[static_cast<std::size_t>(j)]);
                EXPECT_NEAR(m.weights(i, j), expect, 1e-10);
            }
    }
}

TEST(MiMatrix, IndependentColumnsHaveSmallPositiveBias) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    Eigen::MatrixXd p(60, 10);
    for (Eigen::Index r = 0; r < 60; ++r)
        for (Eigen::Index c = 0; c < 10; ++c) p(r, c) = u(rng);
    const MiMatrix m = mi_matrix(window_of(p));
    const double mean = m.weights.sum() / 90.0;
    EXPECT_GT(mean, 0.0);
    EXPECT_LT(mean, std::log(12.0));
}

TEST(MiMatrix, ThreadCountDoesNotChangeResult) {
    std::mt19937_64 rng(19);
    Eigen::MatrixXd p(60, 25);
    for (Eigen::Index c = 0; c < 25; ++c) {
        const auto s = test_support::random_series(60, rng);
        for (Eigen::Index r = 0; r < 60; ++r) p(r, c) = s[static_cast<std::size_t>(r)];
    }
    MiOptions one, four;
    four.threads = 4;
    EXPECT_EQ(mi_matrix(window_of(p), one).weights, mi_matrix(window_of(p), four).weights);
}

TEST(MiMatrix, ReturnsModeAndLiteralModeStayValid) {
    std::mt19937_64 rng(23);
    Eigen::MatrixXd p(60, 6);
    for (Eigen::Index c = 0; c < 6; ++c) {
        const auto s = test_support::random_series(60, rng);
        for (Eigen::Index r = 0; r < 60; ++r) p(r, c) = s[static_cast<std::size_t>(r)];
    }
    MiOptions opt;
    opt.series = SeriesMode::returns;
    opt.mode = MiMode::literal;
    const MiMatrix m = mi_matrix(window_of(p), opt);
    EXPECT_NO_THROW(check_mi_matrix(m));
}

TEST(MiMatrix, CheckRejectsBrokenMatrices) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = 0.5;
    EXPECT_THROW(check_mi_matrix(test_support::matrix(1, w)), DataError);
    w(1, 0) = 0.5;
    EXPECT_NO_THROW(check_mi_matrix(test_support::matrix(1, w)));
    w(2, 2) = 0.1;
    EXPECT_THROW(check_mi_matrix(test_support::matrix(1, w)), DataError);
}
