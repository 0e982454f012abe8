#include "minet/config.hpp"

#include "minet/error.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace minet {

namespace {

using nlohmann::json;

std::string mi_mode_name(MiMode m) { return m == MiMode::standard ? "standard" : "literal"; }
std::string series_mode_name(SeriesMode m) { return m == SeriesMode::prices ? "prices" : "returns"; }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw UsageError(where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw UsageError("unknown config key '" + where + (where.empty() ? "" : ".") + key + "'");
    }
}

template <typename T>
T get(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError("config key '" + key + "': " + e.what());
    }
}

json order_json(const ArimaOrder& o) { return json::array({o.p, o.d, o.q}); }

ArimaOrder order_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw UsageError("ARIMA order must be an array [p, d, q]");
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

}  // namespace

void RunConfig::validate() const {
    if (window_length < 2) throw UsageError("window_length must be >= 2");
    effective_bin_rule().validate();
    if (horizons.empty()) throw UsageError("horizons must not be empty");
    if (!(histogram_bin_width > 0.0) || !std::isfinite(histogram_bin_width)) throw UsageError("histogram_bin_width must be > 0");
    if (!(epsilon > 0.0) || epsilon >= 1.0) throw UsageError("epsilon must lie in (0, 1)");
    if (target_lag < 1) throw UsageError("target_lag must be >= 1");
    if (!(grid_step > 0.0 && grid_step <= 1.0) || std::abs(std::round(1.0 / grid_step) * grid_step - 1.0) > 1e-9) {
        throw UsageError("grid_step must divide [0, 1] evenly");
    }
    if (arima.bounds.p_max < 0 || arima.bounds.q_max < 0 || arima.bounds.d_max < 0 || arima.bounds.d_max > 2 ||
        arima.bounds.p_max > 12 || arima.bounds.q_max > 12) {
        throw UsageError("arima bounds must satisfy 0 <= p_max, q_max <= 12 and 0 <= d_max <= 2");
    }
    const ArimaOrder& o = arima.exog_order;
    if (o.p < 0 || o.q < 0 || o.d < 0 || o.d > 2 || o.p > 12 || o.q > 12) throw UsageError("arima.exog_order out of range");
    if (threads < 1 || threads > 256) throw UsageError("threads must lie in [1, 256]");
    std::set<std::string> names;
    for (const auto& c : combinations) {
        if (c.name.empty() || c.first.empty() || c.second.empty()) throw UsageError("combinations need name, first and second");
        if (c.kinds.empty()) throw UsageError("combination '" + c.name + "' lists no regression kinds");
        if (!names.insert(c.name).second) throw UsageError("duplicate combination name '" + c.name + "'");
    }
}

json RunConfig::to_json() const {
    json j;
    j["data"] = data.generic_string();
    j["index"] = index;
    j["window_length"] = window_length;
    const BinRule rule = effective_bin_rule();
    j["bin_rule"] = {{"strategy", rule.describe()}, {"value", rule.parameter}};
    j["mi_mode"] = mi_mode_name(mi_mode);
    j["series_mode"] = series_mode_name(series_mode);
    json hs = json::array();
    for (const auto& h : horizons) {
        if (h.is_all()) hs.push_back("All");
        else hs.push_back(*h.windows);
    }
    j["horizons"] = hs;
    j["histogram_bin_width"] = histogram_bin_width;
    j["epsilon"] = epsilon;
    j["target_lag"] = target_lag;
    j["distance_transform"] = to_string(distance);
    j["modularity_seed"] = modularity_seed;
    json combos = json::array();
    for (const auto& c : combinations) {
        json kinds = json::array();
        for (auto k : c.kinds) kinds.push_back(to_string(k));
        combos.push_back({{"name", c.name}, {"first", c.first}, {"second", c.second}, {"kinds", kinds}});
    }
    j["combinations"] = combos;
    j["grid_step"] = grid_step;
    j["zscore_combine"] = zscore_combine;
    j["arima"] = {{"p_max", arima.bounds.p_max},
                  {"d_max", arima.bounds.d_max},
                  {"q_max", arima.bounds.q_max},
                  {"exog", arima.exog},
                  {"exog_order", order_json(arima.exog_order)},
                  {"exog_lag", arima.exog_lag}};
    j["output"] = output.generic_string();
    j["threads"] = threads;
    j["dump_matrices"] = dump_matrices;
    j["dump_strengths"] = dump_strengths;
    return j;
}

RunConfig RunConfig::from_json(const json& j, RunConfig c) {
    reject_unknown(j,
                   {"data", "index", "window_length", "bin_rule", "mi_mode", "series_mode", "horizons",
                    "histogram_bin_width", "epsilon", "target_lag", "distance_transform", "modularity_seed",
                    "combinations", "grid_step", "zscore_combine", "arima", "output", "threads", "dump_matrices",
                    "dump_strengths"},
                   "");
    if (j.contains("data")) c.data = get<std::string>(j, "data");
    if (j.contains("index")) c.index = get<std::string>(j, "index");
    if (j.contains("window_length")) c.window_length = get<std::size_t>(j, "window_length");
    if (j.contains("bin_rule")) {
        const json& b = j["bin_rule"];
        reject_unknown(b, {"strategy", "value"}, "bin_rule");
        c.bin_rule = BinRule::parse(get<std::string>(b, "strategy"), get<double>(b, "value"));
    }
    if (j.contains("mi_mode")) {
        const auto m = get<std::string>(j, "mi_mode");
        if (m == "standard") c.mi_mode = MiMode::standard;
        else if (m == "literal") c.mi_mode = MiMode::literal;
        else throw UsageError("mi_mode must be 'standard' or 'literal'");
    }
    if (j.contains("series_mode")) {
        const auto m = get<std::string>(j, "series_mode");
        if (m == "prices") c.series_mode = SeriesMode::prices;
        else if (m == "returns") c.series_mode = SeriesMode::returns;
        else throw UsageError("series_mode must be 'prices' or 'returns'");
    }
    if (j.contains("horizons")) {
        if (!j["horizons"].is_array()) throw UsageError("horizons must be an array");
        c.horizons.clear();
        for (const auto& h : j["horizons"]) {
            if (h.is_string()) c.horizons.push_back(Horizon::parse(h.get<std::string>()));
            else if (h.is_number_unsigned() && h.get<std::size_t>() > 0) c.horizons.push_back(Horizon::of(h.get<std::size_t>()));
            else throw UsageError("horizons entries must be positive integers or \"All\"");
        }
    }
    if (j.contains("histogram_bin_width")) c.histogram_bin_width = get<double>(j, "histogram_bin_width");
    if (j.contains("epsilon")) c.epsilon = get<double>(j, "epsilon");
    if (j.contains("target_lag")) c.target_lag = get<std::size_t>(j, "target_lag");
    if (j.contains("distance_transform")) c.distance = parse_distance_transform(get<std::string>(j, "distance_transform"));
    if (j.contains("modularity_seed")) c.modularity_seed = get<std::uint64_t>(j, "modularity_seed");
    if (j.contains("combinations")) {
        if (!j["combinations"].is_array()) throw UsageError("combinations must be an array");
        c.combinations.clear();
        for (const auto& e : j["combinations"]) {
            reject_unknown(e, {"name", "first", "second", "kinds"}, "combinations[]");
            CombinationSpec spec;
            spec.name = get<std::string>(e, "name");
            spec.first = get<std::string>(e, "first");
            spec.second = get<std::string>(e, "second");
            if (e.contains("kinds")) {
                spec.kinds.clear();
                for (const auto& k : e["kinds"]) spec.kinds.push_back(parse_regression_kind(k.get<std::string>()));
            }
            c.combinations.push_back(std::move(spec));
        }
    }
    if (j.contains("grid_step")) c.grid_step = get<double>(j, "grid_step");
    if (j.contains("zscore_combine")) c.zscore_combine = get<bool>(j, "zscore_combine");
    if (j.contains("arima")) {
        const json& a = j["arima"];
        reject_unknown(a, {"p_max", "d_max", "q_max", "exog", "exog_order", "exog_lag"}, "arima");
        if (a.contains("p_max")) c.arima.bounds.p_max = get<int>(a, "p_max");
        if (a.contains("d_max")) c.arima.bounds.d_max = get<int>(a, "d_max");
        if (a.contains("q_max")) c.arima.bounds.q_max = get<int>(a, "q_max");
        if (a.contains("exog")) c.arima.exog = get<std::vector<std::string>>(a, "exog");
        if (a.contains("exog_order")) c.arima.exog_order = order_from(a["exog_order"]);
        if (a.contains("exog_lag")) c.arima.exog_lag = get<std::size_t>(a, "exog_lag");
    }
    if (j.contains("output")) c.output = get<std::string>(j, "output");
    if (j.contains("threads")) c.threads = get<unsigned>(j, "threads");
    if (j.contains("dump_matrices")) c.dump_matrices = get<bool>(j, "dump_matrices");
    if (j.contains("dump_strengths")) c.dump_strengths = get<bool>(j, "dump_strengths");
    c.validate();
    return c;
}

RunConfig RunConfig::from_json(const json& j) { return from_json(j, RunConfig{}); }

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
    return RunConfig::from_json(j, std::move(base));
}

}  // namespace minet
