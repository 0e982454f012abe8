#include "minet/synth.hpp"

#include "minet/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

namespace minet {

namespace {

constexpr std::int64_t kSessionMinutes = 390;

bool is_weekday(Timestamp ts) {
    const std::int64_t days = ts / 86400;
    const std::int64_t dow = (days + 4) % 7;  // 1970-01-01 was a Thursday; 0 = Sunday
    return dow >= 1 && dow <= 5;
}

std::vector<std::size_t> place_regimes(const SynthOptions& o, std::size_t windows, std::mt19937_64& rng) {
    // Candidate windows must leave a following window for the gap.
    const std::size_t lo = o.first_regime_window;
    const std::size_t hi = windows - 1;
    std::vector<std::size_t> chosen;
    for (int attempt = 0; attempt < 10000 && chosen.size() < o.regimes; ++attempt) {
        chosen.clear();
        std::vector<std::size_t> pool;
        for (std::size_t t = lo; t <= hi; ++t) pool.push_back(t);
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t t : pool) {
            const bool clear = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
                return (t > c ? t - c : c - t) >= o.min_regime_spacing;
            });
            if (clear) chosen.push_back(t);
            if (chosen.size() == o.regimes) break;
        }
    }
    if (chosen.size() < o.regimes) throw UsageError("cannot place the requested regimes in the available windows");
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void SynthOptions::validate() const {
    if (tickers < 2) throw UsageError("synth needs at least 2 tickers");
    if (window_length < 2) throw UsageError("window_length must be >= 2");
    if (minutes < window_length * 2) throw UsageError("synth needs at least two windows of minutes");
    if (!(sigma_min > 0 && sigma_max >= sigma_min)) throw UsageError("invalid sigma range");
    if (!(beta_min > 0 && beta_max >= beta_min)) throw UsageError("invalid beta range");
    if (!(price_min > 0 && price_max >= price_min)) throw UsageError("invalid price range");
    if (regime_idiosyncratic < 0) throw UsageError("regime_idiosyncratic must be >= 0");
    if (market_sigma < 0 || regime_sigma < 0) throw UsageError("volatilities must be >= 0");
    if (missing_rate < 0 || missing_rate >= 0.5) throw UsageError("missing_rate must lie in [0, 0.5)");
    if (leading_gap >= minutes) throw UsageError("leading_gap must be shorter than the series");
    if (first_regime_window < 1 || min_regime_spacing < 1) throw UsageError("invalid regime placement");
}

std::vector<Timestamp> trading_minutes(Timestamp start, std::size_t count) {
    std::vector<Timestamp> out;
    out.reserve(count);
    const Timestamp open_offset = start % 86400;
    Timestamp day = start - open_offset;
    std::int64_t minute = 0;
    while (!is_weekday(day)) day += 86400;
    while (out.size() < count) {
        out.push_back(day + open_offset + minute * 60);
        if (++minute == kSessionMinutes) {
            minute = 0;
            do day += 86400;
            while (!is_weekday(day));
        }
    }
    return out;
}

SynthData synthesize(const SynthOptions& o) {
    o.validate();
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto uniform = [&](double a, double b) { return a + (b - a) * unit(rng); };

    const std::size_t n = o.tickers;
    const std::size_t rows = o.minutes;
    const std::size_t L = o.window_length;
    const std::size_t windows = rows / L;

    std::vector<double> sigma(n), beta(n), log_p0(n);
    for (std::size_t i = 0; i < n; ++i) {
        sigma[i] = uniform(o.sigma_min, o.sigma_max);
        beta[i] = uniform(o.beta_min, o.beta_max);
        log_p0[i] = std::log(uniform(o.price_min, o.price_max));
    }

    SynthData data;
    if (o.regimes > 0) {
        if (windows < o.first_regime_window + 1) throw UsageError("too few windows for the regime schedule");
        const auto where = place_regimes(o, windows, rng);
        std::vector<double> signs(where.size());
        for (std::size_t k = 0; k < signs.size(); ++k) signs[k] = k % 2 == 0 ? 1.0 : -1.0;
        std::shuffle(signs.begin(), signs.end(), rng);
        for (std::size_t k = 0; k < where.size(); ++k) data.regimes.push_back({where[k], signs[k] * o.regime_gap});
    }

    // Common component per minute: market noise, regime driver, gaps.
    std::vector<double> common(rows, 0.0);
    std::vector<double> idio_scale(rows, 1.0);
    for (std::size_t r = 1; r < rows; ++r) common[r] = o.market_sigma * gauss(rng);
    for (const auto& reg : data.regimes) {
        const std::size_t begin = (reg.window_index - 1) * L;
        for (std::size_t m = 1; m < L; ++m) idio_scale[begin + m] = o.regime_idiosyncratic;
        std::vector<double> walk(L, 0.0);
        for (std::size_t m = 1; m < L; ++m) walk[m] = walk[m - 1] + o.regime_sigma * gauss(rng);
        double prev = 0.0;
        for (std::size_t m = 1; m < L; ++m) {
            const double frac = static_cast<double>(m) / static_cast<double>(L - 1);
            const double bridge = walk[m] - frac * walk[L - 1] + frac * o.regime_drift;
            common[begin + m] += bridge - prev;
            prev = bridge;
        }
        const std::size_t next = reg.window_index * L;
        if (next < rows) common[next] += reg.gap;
    }

    PricePanel& panel = data.panel;
    panel.timestamps = trading_minutes(o.start, rows);
    for (std::size_t i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "T%03zu", i + 1);
        panel.tickers.emplace_back(name);
    }
    panel.index_name = o.index_name;
    panel.prices.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    panel.index_series.resize(static_cast<Eigen::Index>(rows));

    std::vector<double> log_p = log_p0;
    std::vector<double> relative_sum(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            if (r > 0) log_p[i] += beta[i] * common[r] + idio_scale[r] * sigma[i] * gauss(rng);
            const double p = std::exp(log_p[i]);
            panel.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = p;
            relative_sum[r] += std::exp(log_p[i] - log_p0[i]);
        }
    }
    for (std::size_t r = 0; r < rows; ++r)
        panel.index_series(static_cast<Eigen::Index>(r)) = o.index_base * relative_sum[r] / static_cast<double>(n);

    // Missing cells; row 0 of every column except the late starter stays observed.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 1; r < rows; ++r)
            if (unit(rng) < o.missing_rate) panel.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = nan;
    if (n > 2 && o.leading_gap > 0) {
        const auto late = static_cast<Eigen::Index>(n - 1);
        for (std::size_t r = 0; r < o.leading_gap; ++r) panel.prices(static_cast<Eigen::Index>(r), late) = nan;
    }
    return data;
}

void write_fixture(const SynthData& data, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    const PricePanel& panel = data.panel;

    const auto write_series = [&](const fs::path& path, const auto& value_at) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write " + path.string());
        out << "timestamp,close\n";
        for (std::size_t r = 0; r < panel.rows(); ++r) {
            const double v = value_at(static_cast<Eigen::Index>(r));
            if (std::isnan(v)) continue;
            out << format_iso8601(panel.timestamps[r]) << ',' << fixed(v) << '\n';
        }
        if (!out) throw DataError("write failed: " + path.string());
    };

    for (std::size_t c = 0; c < panel.cols(); ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        write_series(dir / (panel.tickers[c] + ".csv"), [&](Eigen::Index r) { return panel.prices(r, col); });
    }
    write_series(dir / (panel.index_name + ".csv"), [&](Eigen::Index r) { return panel.index_series(r); });

    nlohmann::json manifest;
    manifest["index"] = panel.index_name;
    nlohmann::json regimes = nlohmann::json::array();
    for (const auto& r : data.regimes) regimes.push_back({{"window", r.window_index}, {"gap", r.gap}});
    manifest["regimes"] = regimes;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

}  // namespace minet
