#pragma once

#include "minet/arima.hpp"
#include "minet/centrality.hpp"
#include "minet/mutual_info.hpp"
#include "minet/predictors.hpp"
#include "minet/regression.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace minet {

struct CombinationSpec {
    std::string name;
    std::string first;
    std::string second;
    std::vector<RegressionKind> kinds{RegressionKind::linear, RegressionKind::poly2, RegressionKind::poly3};
};

struct ArimaSettings {
    OrderBounds bounds{};
    std::vector<std::string> exog;  // empty: one ARIMAX per metric in the table
    ArimaOrder exog_order{1, 1, 0};
    std::size_t exog_lag = 0;
};

/// Every knob of a pipeline run. JSON keys mirror the field names; unknown keys are rejected.
struct RunConfig {
    std::filesystem::path data;
    std::string index;  // overrides the manifest's index series when set
    std::size_t window_length = 60;
    std::optional<BinRule> bin_rule;  // defaults to BinRule::default_for(window_length)
    MiMode mi_mode = MiMode::standard;
    SeriesMode series_mode = SeriesMode::prices;
    std::vector<Horizon> horizons{Horizon::of(3), Horizon::of(6), Horizon::of(9), Horizon::of(13), Horizon::all()};
    double histogram_bin_width = 10.0;
    double epsilon = kDefaultKldEpsilon;
    std::size_t target_lag = 1;
    DistanceTransform distance = DistanceTransform::inverse;
    std::uint64_t modularity_seed = 0;
    std::vector<CombinationSpec> combinations{
        {"C1", "KLD-3", "skewness", {RegressionKind::linear, RegressionKind::poly2, RegressionKind::poly3}},
        {"C2", "KLD-6", "skewness", {RegressionKind::linear, RegressionKind::poly2, RegressionKind::poly3}},
        {"C3", "KLD-9", "RS-13", {RegressionKind::linear, RegressionKind::poly2, RegressionKind::poly3}},
    };
    double grid_step = 0.001;
    bool zscore_combine = false;
    ArimaSettings arima{};
    std::filesystem::path output = "out";
    unsigned threads = 1;
    bool dump_matrices = false;
    bool dump_strengths = false;

    BinRule effective_bin_rule() const { return bin_rule.value_or(BinRule::default_for(window_length)); }

    /// Throws UsageError on any out-of-range value.
    void validate() const;

    nlohmann::json to_json() const;

    /// Overlays the keys present in `j` onto `base`.
    static RunConfig from_json(const nlohmann::json& j, RunConfig base);
    static RunConfig from_json(const nlohmann::json& j);
};

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace minet
