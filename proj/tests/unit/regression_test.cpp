#include "minet/error.hpp"
#include "minet/regression.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace minet;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

ChangeSeries changes_of(const std::vector<double>& delta) {
    ChangeSeries c;
    c.values = delta;
    for (double d : delta) {
        c.absolute.push_back(std::abs(d));
        c.squared.push_back(d * d);
    }
    return c;
}

}  // namespace

TEST(Polyfit, ExactLine) {
    const std::vector<double> x{0, 1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    const RegressionFit f = polyfit(x, y, 1);
    ASSERT_EQ(f.coefficients.size(), 2u);
    EXPECT_NEAR(f.coefficients[0], 1.0, 1e-12);
    EXPECT_NEAR(f.coefficients[1], 2.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-10);
    EXPECT_NEAR(f.r, 1.0, 1e-10);
    EXPECT_EQ(f.n, 6u);
}

TEST(Polyfit, QuadraticOnSymmetricX) {
    std::vector<double> x, y;
    for (int i = -10; i <= 10; ++i) {
        x.push_back(i);
        y.push_back(i * i);
    }
    const RegressionFit lin = polyfit(x, y, 1);
    EXPECT_NEAR(lin.coefficients[1], 0.0, 1e-10);
    EXPECT_LT(lin.r2, 1e-10);
    EXPECT_NEAR(polyfit(x, y, 2).r2, 1.0, 1e-10);
    EXPECT_NEAR(polyfit(x, y, 3).r2, 1.0, 1e-10);
}

TEST(Polyfit, NegativeSlopeSignedR) {
    const std::vector<double> x{1, 2, 3, 4, 5}, y{5, 4.1, 2.9, 2.2, 0.8};
    const RegressionFit f = polyfit(x, y, 1);
    EXPECT_LT(f.r, 0);
    EXPECT_NEAR(f.r * f.r, f.r2, 1e-14);
}

TEST(Polyfit, MatchesHighPrecisionOracle) {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int degree = 1; degree <= 3; ++degree) {
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 10 + static_cast<std::size_t>(trial);
            std::vector<double> x(n), y(n);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = u(rng) + 0.5 * trial;
                y[i] = 1.5 - 0.7 * x[i] + 0.2 * x[i] * x[i] * (degree > 1) + g(rng);
            }
            const RegressionFit f = polyfit(x, y, degree);
            const auto coef = oracle::least_squares(x, y, degree);
            for (int j = 0; j <= degree; ++j)
                EXPECT_LT(rel_err(f.coefficients[static_cast<std::size_t>(j)], coef[static_cast<std::size_t>(j)]), 1e-8)
                    << "degree " << degree << " trial " << trial << " coef " << j;
            EXPECT_NEAR(f.r2, oracle::r_squared(x, y, coef), 1e-10);
        }
    }
}

TEST(Polyfit, RSquaredIdentityAndNormalEquations) {
    std::mt19937_64 rng(72);
    std::normal_distribution<double> g(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(40), y(40);
        for (std::size_t i = 0; i < 40; ++i) {
            x[i] = g(rng);
            y[i] = x[i] * x[i] + g(rng);
        }
        for (int degree = 1; degree <= 3; ++degree) {
            const RegressionFit f = polyfit(x, y, degree);
            double mean = 0, ss_res = 0, ss_tot = 0;
            for (double v : y) mean += v / 40;
            for (std::size_t i = 0; i < 40; ++i) {
                ss_res += f.residuals[i] * f.residuals[i];
                ss_tot += (y[i] - mean) * (y[i] - mean);
                EXPECT_NEAR(f.fitted[i] + f.residuals[i], y[i], 1e-12);
            }
            EXPECT_NEAR(f.r2, 1 - ss_res / ss_tot, 1e-10);
            EXPECT_GE(f.r2, 0.0);
            EXPECT_LE(f.r2, 1.0);
            for (int j = 0; j <= degree; ++j) {
                double dot = 0, scale = 0;
                for (std::size_t i = 0; i < 40; ++i) {
                    const double col = std::pow(x[i], j);
                    dot += col * f.residuals[i];
                    scale += std::abs(col * y[i]);
                }
                EXPECT_LT(std::abs(dot), 1e-8 * scale);
            }
        }
    }
}

TEST(Polyfit, NestedMonotoneAndAffineInvariant) {
    std::mt19937_64 rng(73);
    std::normal_distribution<double> g(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(30), y(30), xt(30);
        for (std::size_t i = 0; i < 30; ++i) {
            x[i] = g(rng);
            y[i] = g(rng) + 0.3 * x[i];
            xt[i] = -4.5 * x[i] + 17.0;
        }
        const double r1 = polyfit(x, y, 1).r2, r2 = polyfit(x, y, 2).r2, r3 = polyfit(x, y, 3).r2;
        EXPECT_LE(r1, r2 + 1e-12);
        EXPECT_LE(r2, r3 + 1e-12);
        EXPECT_NEAR(polyfit(xt, y, 1).r2, r1, 1e-10);
        std::vector<double> xs(x);
        for (auto& v : xs) v *= 250.0;
        EXPECT_NEAR(polyfit(xs, y, 1).r2, r1, 1e-10);
    }
}

TEST(Polyfit, PValueFromFTest) {
    std::mt19937_64 rng(74);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> x(89), y(89);
    for (std::size_t i = 0; i < 89; ++i) {
        x[i] = g(rng);
        y[i] = 3 * x[i] + 0.1 * g(rng);
    }
    const RegressionFit f = polyfit(x, y, 1);
    EXPECT_LT(f.p_value, 1e-10);
    EXPECT_NEAR(f.f_statistic, f.r2 / (1 - f.r2) * 87.0, 1e-6 * f.f_statistic);
}

TEST(Polyfit, Errors) {
    EXPECT_THROW(polyfit(std::vector<double>{1, 1, 1, 1}, std::vector<double>{1, 2, 3, 4}, 1), NumericError);
    EXPECT_THROW(polyfit(std::vector<double>{1, 2}, std::vector<double>{1, 2}, 1), DataError);
    EXPECT_THROW(polyfit(std::vector<double>{1, 2, 1, 2, 1}, std::vector<double>{1, 2, 3, 4, 5}, 3), NumericError);
    EXPECT_THROW(polyfit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, 4), UsageError);
}

TEST(ScoreTable, PerfectAbsolutePredictorAndUnavailableRows) {
    std::mt19937_64 rng(75);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> delta;
    for (int i = 0; i < 40; ++i) delta.push_back(g(rng));
    const ChangeSeries changes = changes_of(delta);
    MetricSeries perfect{"perfect", {}}, sparse{"sparse", {}};
    for (int i = 0; i < 41; ++i) {
        perfect.values.push_back(i < 40 ? std::optional<double>(std::abs(delta[static_cast<std::size_t>(i)])) : std::nullopt);
        sparse.values.push_back(i < 3 ? std::optional<double>(i) : std::nullopt);
    }
    const std::vector<MetricSeries> metrics{perfect, sparse};
    const auto rows = score_table(metrics, changes);
    ASSERT_EQ(rows.size(), 2u);
    const auto& abs_cell = rows[0].cells[static_cast<std::size_t>(ScoreColumn::absolute_linear)];
    EXPECT_TRUE(abs_cell.available);
    EXPECT_NEAR(abs_cell.score, 1.0, 1e-12);
    EXPECT_NEAR(abs_cell.r2, 1.0, 1e-12);
    EXPECT_EQ(abs_cell.n, 40u);
    EXPECT_FALSE(rows[1].cells[static_cast<std::size_t>(ScoreColumn::actual_poly3)].available);
}

TEST(ScoreTable, IndependentNoiseScoresLow) {
    std::mt19937_64 rng(76);
    std::normal_distribution<double> g(0, 1);
    int above = 0, total = 0;
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> delta;
        MetricSeries noise{"noise", {}};
        for (int i = 0; i < 89; ++i) {
            delta.push_back(g(rng));
            noise.values.push_back(g(rng));
        }
        const std::vector<MetricSeries> metrics{noise};
        const auto rows = score_table(metrics, changes_of(delta));
        for (auto col : {ScoreColumn::squared_linear, ScoreColumn::absolute_linear, ScoreColumn::actual_linear}) {
            ++total;
            if (rows[0].cells[static_cast<std::size_t>(col)].score >= 0.2) ++above;
        }
    }
    EXPECT_LE(above, total / 10);
}

TEST(ScoreTable, ColumnNamesAndKinds) {
    EXPECT_EQ(to_string(ScoreColumn::actual_poly2), "act_poly2");
    EXPECT_EQ(kind_of(ScoreColumn::actual_poly3), RegressionKind::poly3);
    EXPECT_EQ(target_name(ScoreColumn::squared_linear), "squared");
    EXPECT_EQ(parse_regression_kind("poly2"), RegressionKind::poly2);
    EXPECT_THROW(parse_regression_kind("cubic"), UsageError);
    const ChangeSeries c = changes_of({1, -2});
    EXPECT_EQ(target_column(c, "absolute")[1], 2.0);
    EXPECT_THROW(target_column(c, "other"), UsageError);
}

TEST(Align, PairsDefinedEntries) {
    MetricSeries m{"m", {std::nullopt, 1.0, 2.0, 3.0}};
    const std::vector<double> target{9, 8, 7};
    const AlignedPairs p = align(m, target);
    EXPECT_EQ(p.x, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(p.y, (std::vector<double>{8, 7}));
    EXPECT_EQ(p.index, (std::vector<std::size_t>{1, 2}));
}
