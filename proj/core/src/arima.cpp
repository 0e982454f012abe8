#include "minet/arima.hpp"

#include "minet/error.hpp"
#include "minet/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace minet {

std::string ArimaOrder::label() const {
    return "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

std::vector<double> difference(std::span<const double> series, int d) {
    if (d < 0 || d > 2) throw UsageError("differencing degree must be 0, 1 or 2");
    if (series.size() <= static_cast<std::size_t>(d)) {
        throw DataError("series of length " + std::to_string(series.size()) + " is too short to difference " +
                        std::to_string(d) + " times");
    }
    std::vector<double> out(series.begin(), series.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
        out.pop_back();
    }
    return out;
}

std::vector<double> pacf_to_coefficients(std::span<const double> raw) {
    const std::size_t k = raw.size();
    std::vector<double> coef(k), work(k);
    for (std::size_t j = 0; j < k; ++j) coef[j] = work[j] = std::tanh(raw[j]);
    for (std::size_t j = 1; j < k; ++j) {
        const double a = coef[j];
        for (std::size_t i = 0; i < j; ++i) work[i] -= a * coef[j - i - 1];
        for (std::size_t i = 0; i < j; ++i) coef[i] = work[i];
    }
    return coef;
}

bool is_invertible(std::span<const double> theta) {
    std::size_t q = theta.size();
    while (q > 0 && theta[q - 1] == 0.0) --q;
    if (q == 0) return true;
    // Roots of 1 + theta_1 z + ... lie outside the unit circle iff the
    // reciprocal roots, eigenvalues of the companion matrix below, lie inside.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
    for (std::size_t j = 0; j < q; ++j) companion(0, static_cast<Eigen::Index>(j)) = -theta[j];
    for (std::size_t j = 1; j < q; ++j) companion(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j - 1)) = 1.0;
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return (solver.eigenvalues().array().abs() < 1.0).all();
}

namespace {

struct Sample {
    std::vector<double> w;                // differenced series from `start`
    std::vector<double> x;                // differenced exog over the same range (empty without exog)
    std::size_t start = 0;                // offset into the differenced series
};

Sample build_sample(std::span<const double> series, int d, const ExogSeries* exog) {
    Sample s;
    const std::vector<double> w = difference(series, d);
    if (exog == nullptr) {
        s.w = w;
        return s;
    }
    if (exog->size() != series.size()) throw DataError("exogenous series length does not match the modeled series");

    std::vector<std::optional<double>> xd(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        bool defined = true;
        for (int k = 0; k <= d; ++k) defined = defined && (*exog)[j + static_cast<std::size_t>(k)].has_value();
        if (!defined) continue;
        const auto at = [&](int k) { return *(*exog)[j + static_cast<std::size_t>(k)]; };
        if (d == 0) xd[j] = at(0);
        else if (d == 1) xd[j] = at(1) - at(0);
        else xd[j] = at(2) - 2.0 * at(1) + at(0);
        if (!std::isfinite(*xd[j])) throw DataError("exogenous series contains a non-finite value");
    }
    std::size_t start = 0;
    while (start < xd.size() && !xd[start]) ++start;
    for (std::size_t j = start; j < xd.size(); ++j)
        if (!xd[j]) throw DataError("exogenous series has undefined values after its first defined value");
    s.start = start;
    s.w.assign(w.begin() + static_cast<std::ptrdiff_t>(start), w.end());
    for (std::size_t j = start; j < xd.size(); ++j) s.x.push_back(*xd[j]);
    return s;
}

struct ArmaParameters {
    double mu = 0.0;
    double beta = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
};

// One-step forecasts and residuals of the ARMA recursion; entries t < p stay zero.
double arma_recursion(const std::vector<double>& w, const std::vector<double>& x, const ArmaParameters& par,
                      std::vector<double>& forecast, std::vector<double>& resid) {
    const std::size_t n = w.size();
    const std::size_t p = par.phi.size();
    const std::size_t q = par.theta.size();
    std::vector<double> r(n);
    for (std::size_t t = 0; t < n; ++t) r[t] = w[t] - par.mu - (x.empty() ? 0.0 : par.beta * x[t]);
    forecast.assign(n, 0.0);
    resid.assign(n, 0.0);
    double css = 0.0;
    for (std::size_t t = p; t < n; ++t) {
        double f = par.mu + (x.empty() ? 0.0 : par.beta * x[t]);
        for (std::size_t i = 1; i <= p; ++i) f += par.phi[i - 1] * r[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) f += par.theta[j - 1] * resid[t - j];
        forecast[t] = f;
        resid[t] = w[t] - f;
        css += resid[t] * resid[t];
    }
    return css;
}

}  // namespace

ArimaModel fit_arima(std::span<const double> series, ArimaOrder order, const ExogSeries* exog, const ArimaOptions& options) {
    if (order.p < 0 || order.q < 0 || order.p > 12 || order.q > 12) throw UsageError("AR and MA orders must lie in [0, 12]");
    for (double v : series)
        if (!std::isfinite(v)) throw DataError("ARIMA input contains a non-finite value");

    const Sample sample = build_sample(series, order.d, exog);
    const auto p = static_cast<std::size_t>(order.p);
    const auto q = static_cast<std::size_t>(order.q);
    const std::size_t m = sample.w.size();
    const std::size_t needed = 10 * (p + q + 1);
    if (m < needed) {
        throw DataError(order.label() + " needs at least " + std::to_string(needed) + " modeled observations, have " +
                        std::to_string(m));
    }

    const bool has_intercept = order.d == 0;
    const bool has_exog = exog != nullptr;

    // Optimize on a standardized copy so one simplex step size suits every series.
    const auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e;
        return s / static_cast<double>(v.size());
    };
    const auto sd_of = [](const std::vector<double>& v, double centre) {
        double s = 0.0;
        for (double e : v) s += (e - centre) * (e - centre);
        const double sd = std::sqrt(s / static_cast<double>(v.size()));
        return sd > 0.0 ? sd : 1.0;
    };
    const double w_centre = has_intercept ? mean_of(sample.w) : 0.0;
    const double w_scale = sd_of(sample.w, mean_of(sample.w));
    const double x_centre = has_exog && has_intercept ? mean_of(sample.x) : 0.0;
    const double x_scale = has_exog ? sd_of(sample.x, mean_of(sample.x)) : 1.0;

    std::vector<double> wz(m);
    for (std::size_t t = 0; t < m; ++t) wz[t] = (sample.w[t] - w_centre) / w_scale;
    std::vector<double> xz;
    if (has_exog) {
        xz.resize(m);
        for (std::size_t t = 0; t < m; ++t) xz[t] = (sample.x[t] - x_centre) / x_scale;
    }

    // Parameter layout: [mu][beta][phi_1..phi_p][u_1..u_q]
    const std::size_t offset_beta = has_intercept ? 1 : 0;
    const std::size_t offset_phi = offset_beta + (has_exog ? 1 : 0);
    const std::size_t offset_ma = offset_phi + p;
    const auto unpack = [&](std::span<const double> v) {
        ArmaParameters par;
        if (has_intercept) par.mu = v[0];
        if (has_exog) par.beta = v[offset_beta];
        par.phi.assign(v.begin() + static_cast<std::ptrdiff_t>(offset_phi), v.begin() + static_cast<std::ptrdiff_t>(offset_ma));
        const std::vector<double> a = pacf_to_coefficients(v.subspan(offset_ma, q));
        par.theta.resize(q);
        for (std::size_t j = 0; j < q; ++j) par.theta[j] = -a[j];
        return par;
    };

    std::vector<double> forecast, resid;
    const Objective css = [&](std::span<const double> v) {
        const double value = arma_recursion(wz, xz, unpack(v), forecast, resid);
        if (!std::isfinite(value)) throw NumericError(order.label() + ": non-finite conditional sum of squares");
        return value;
    };
    const NelderMeadResult opt = nelder_mead(css, std::vector<double>(offset_ma + q, 0.0), options.optimizer);

    ArmaParameters z = unpack(opt.x);
    ArmaParameters par;
    par.phi = z.phi;
    par.theta = z.theta;
    par.beta = has_exog ? w_scale * z.beta / x_scale : 0.0;
    par.mu = has_intercept ? w_centre + w_scale * z.mu - par.beta * x_centre : 0.0;
    if (!is_invertible(par.theta)) throw NumericError(order.label() + ": fitted MA polynomial is not invertible");

    ArimaModel model;
    model.order = order;
    model.has_intercept = has_intercept;
    model.intercept = par.mu;
    model.ar = par.phi;
    model.ma = par.theta;
    if (has_exog) model.exog_coefficient = par.beta;
    model.iterations = opt.iterations;
    model.series.assign(series.begin(), series.end());

    model.css = arma_recursion(sample.w, sample.x, par, forecast, resid);
    if (!std::isfinite(model.css)) throw NumericError(order.label() + ": non-finite conditional sum of squares");
    model.n_effective = m - p;
    model.sigma2 = model.css / static_cast<double>(model.n_effective);
    model.log_likelihood =
        -0.5 * static_cast<double>(model.n_effective) * (std::log(2.0 * std::numbers::pi * model.sigma2) + 1.0);
    model.parameter_count = order.p + order.q + (has_intercept ? 1 : 0) + 1 + (has_exog ? 1 : 0);
    model.aic = 2.0 * model.parameter_count - 2.0 * model.log_likelihood;

    const std::size_t n = series.size();
    model.residuals.assign(n, std::nullopt);
    model.predictions.assign(n, std::nullopt);
    for (std::size_t t = p; t < m; ++t) {
        const std::size_t i = t + sample.start + static_cast<std::size_t>(order.d);
        double level = 0.0;
        if (order.d == 1) level = series[i - 1];
        else if (order.d == 2) level = 2.0 * series[i - 1] - series[i - 2];
        model.predictions[i] = forecast[t] + level;
        model.residuals[i] = resid[t];
    }
    return model;
}

PredictionReport one_step_predictions(const ArimaModel& model) {
    PredictionReport out;
    out.predictions = model.predictions;
    double sum = 0.0;
    for (std::size_t i = 0; i < model.series.size(); ++i) {
        if (!model.predictions[i]) continue;
        const double e = model.series[i] - *model.predictions[i];
        sum += e * e;
        ++out.count;
    }
    out.mse = out.count > 0 ? sum / static_cast<double>(out.count) : 0.0;
    return out;
}

OrderSearchResult grid_search_order(std::span<const double> series, const OrderBounds& bounds, const ExogSeries* exog,
                                    const ArimaOptions& options, unsigned threads) {
    if (bounds.p_max < 0 || bounds.q_max < 0 || bounds.d_max < 0 || bounds.d_max > 2) {
        throw UsageError("invalid ARIMA grid bounds");
    }
    OrderSearchResult result;
    for (int p = 0; p <= bounds.p_max; ++p)
        for (int d = 0; d <= bounds.d_max; ++d)
            for (int q = 0; q <= bounds.q_max; ++q) result.tried.push_back({p, d, q});

    std::vector<std::optional<ArimaModel>> fits(result.tried.size());
    std::vector<std::string> failures(result.tried.size());
    parallel_for(result.tried.size(), threads, [&](std::size_t i) {
        try {
            fits[i] = fit_arima(series, result.tried[i], exog, options);
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    });

    std::optional<std::size_t> best;
    result.aic.resize(fits.size());
    for (std::size_t i = 0; i < fits.size(); ++i) {
        if (!fits[i]) {
            spdlog::warn("skipping {}: {}", result.tried[i].label(), failures[i]);
            continue;
        }
        result.aic[i] = fits[i]->aic;
        if (!best) {
            best = i;
            continue;
        }
        const ArimaModel& a = *fits[i];
        const ArimaModel& b = *fits[*best];
        const double tol = 1e-9 * std::max(1.0, std::abs(b.aic));
        const int complexity_a = a.order.p + a.order.q;
        const int complexity_b = b.order.p + b.order.q;
        if (a.aic < b.aic - tol) best = i;
        else if (std::abs(a.aic - b.aic) <= tol &&
                 (complexity_a < complexity_b || (complexity_a == complexity_b && a.order.d < b.order.d))) {
            best = i;
        }
    }
    if (!best) throw NumericError("every ARIMA order in the search box failed to fit");
    result.best = std::move(*fits[*best]);
    return result;
}

}  // namespace minet
