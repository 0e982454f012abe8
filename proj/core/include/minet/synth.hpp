#pragma once

#include "minet/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace minet {

/// Parameters of the synthetic minute-bar market. Log prices follow independent
/// random walks on top of a weak market factor; during a regime window every
/// ticker follows one shared driver and the next window opens with a common gap.
struct SynthOptions {
    std::size_t tickers = 475;
    std::size_t minutes = 5340;
    std::size_t window_length = 60;
    std::size_t regimes = 8;
    std::size_t first_regime_window = 15;  // 1-based
    std::size_t min_regime_spacing = 6;
    std::uint64_t seed = 20160922;
    std::string index_name = "SPX";
    double index_base = 2150.0;
    double sigma_min = 0.0005;
    double sigma_max = 0.0009;
    double beta_min = 0.7;
    double beta_max = 1.3;
    double price_min = 20.0;
    double price_max = 300.0;
    double market_sigma = 0.00025;
    double regime_sigma = 0.0015;
    double regime_idiosyncratic = 0.25;  // idiosyncratic volatility multiplier inside a regime
    double regime_drift = -0.010;
    double regime_gap = 0.012;
    double missing_rate = 0.002;
    std::size_t leading_gap = 30;  // one ticker starts this many minutes late
    Timestamp start = 1474536600;  // 2016-09-22 09:30 UTC

    void validate() const;
};

struct Regime {
    std::size_t window_index = 0;  // 1-based
    double gap = 0.0;              // log jump at the start of the following window
};

struct SynthData {
    PricePanel panel;  // missing cells already marked NaN
    std::vector<Regime> regimes;
};

SynthData synthesize(const SynthOptions& options);

/// Writes `<ticker>.csv`, the index file and manifest.json (which also lists the regimes).
void write_fixture(const SynthData& data, const std::filesystem::path& dir);

/// 390 trading minutes per weekday starting at `start`.
std::vector<Timestamp> trading_minutes(Timestamp start, std::size_t count);

}  // namespace minet
