#pragma once

#include "minet/nelder_mead.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minet {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    std::string label() const;
    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

/// Exogenous regressor aligned with the modeled series; leading entries may be undefined.
using ExogSeries = std::vector<std::optional<double>>;

struct ArimaOptions {
    NelderMeadOptions optimizer{};
};

/// ARIMA(p, d, q) fitted by conditional sum of squares, optionally with one
/// exogenous regressor (regression with ARMA errors on the differenced scale).
///
/// The differenced series w_t follows
///     w_t - mu - beta x_t = sum_i phi_i (w_{t-i} - mu - beta x_{t-i}) + e_t + sum_j theta_j e_{t-j}
/// with mu present only when d = 0.
struct ArimaModel {
    ArimaOrder order;
    bool has_intercept = false;
    double intercept = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    std::optional<double> exog_coefficient;
    double sigma2 = 0.0;
    double css = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    int parameter_count = 0;  // p + q + intercept + sigma^2 + exog
    std::size_t n_effective = 0;
    int iterations = 0;

    std::vector<double> series;                       // original (undifferenced) input
    std::vector<std::optional<double>> residuals;     // aligned with series
    std::vector<std::optional<double>> predictions;   // one-step-ahead, original scale
};

std::vector<double> difference(std::span<const double> series, int d);

ArimaModel fit_arima(std::span<const double> series, ArimaOrder order, const ExogSeries* exog = nullptr,
                     const ArimaOptions& options = {});

struct PredictionReport {
    std::vector<std::optional<double>> predictions;
    double mse = 0.0;
    std::size_t count = 0;
};

/// In-sample one-step-ahead forecasts on the original scale and their MSE.
PredictionReport one_step_predictions(const ArimaModel& model);

struct OrderBounds {
    int p_max = 3;
    int d_max = 2;
    int q_max = 3;
};

struct OrderSearchResult {
    ArimaModel best;
    std::vector<ArimaOrder> tried;
    std::vector<std::optional<double>> aic;  // per tried order; nullopt when the fit failed
};

/// Fits every order in the box and keeps the minimum-AIC model; ties go to
/// smaller p + q, then smaller d. Failed fits are skipped with a warning.
OrderSearchResult grid_search_order(std::span<const double> series, const OrderBounds& bounds = {},
                                    const ExogSeries* exog = nullptr, const ArimaOptions& options = {},
                                    unsigned threads = 1);

/// tanh partial autocorrelations mapped to the coefficients of a stationary
/// polynomial 1 - a_1 B - ... - a_k B^k (Durbin-Levinson recursion).
std::vector<double> pacf_to_coefficients(std::span<const double> raw);

/// True if 1 + theta_1 z + ... + theta_q z^q has every root strictly outside the unit circle.
bool is_invertible(std::span<const double> theta);

}  // namespace minet
