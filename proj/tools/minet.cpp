#include "minet/config.hpp"
#include "minet/error.hpp"
#include "minet/pipeline.hpp"
#include "minet/synth.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::string config_file;
    std::optional<std::string> data;
    std::optional<std::string> index;
    std::optional<std::string> output;
    std::optional<std::size_t> window_length;
    std::optional<std::size_t> bins;
    std::optional<std::string> mi_mode;
    std::optional<std::string> series_mode;
    std::optional<std::size_t> target_lag;
    std::optional<std::string> distance;
    std::optional<std::uint64_t> modularity_seed;
    std::optional<double> grid_step;
    std::optional<unsigned> threads;
    bool zscore = false;
    bool dump_matrices = false;
    bool dump_strengths = false;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config_file, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("-d,--data", o.data, "data directory or manifest.json");
    cmd->add_option("--index", o.index, "index series name (overrides the manifest)");
    cmd->add_option("-o,--output", o.output, "output directory");
    cmd->add_option("--window-length", o.window_length, "minutes per window");
    cmd->add_option("--bins", o.bins, "equal-width bin count for MI");
    cmd->add_option("--mi-mode", o.mi_mode, "standard | literal");
    cmd->add_option("--series-mode", o.series_mode, "prices | returns");
    cmd->add_option("--target-lag", o.target_lag, "windows ahead for the index change");
    cmd->add_option("--distance", o.distance, "betweenness distance transform: inverse | max_minus");
    cmd->add_option("--modularity-seed", o.modularity_seed, "node-order seed for community detection");
    cmd->add_option("--grid-step", o.grid_step, "resolution of the mixing-constant grid");
    cmd->add_option("-j,--threads", o.threads, "worker threads");
    cmd->add_flag("--zscore", o.zscore, "z-score metrics before combining");
    cmd->add_flag("--dump-matrices", o.dump_matrices, "write every MI matrix");
    cmd->add_flag("--dump-strengths", o.dump_strengths, "write node strengths and histograms");
}

minet::RunConfig resolve(const Overrides& o) {
    minet::RunConfig c;
    if (!o.config_file.empty()) c = minet::load_config(o.config_file);
    nlohmann::json j;
    if (o.data) j["data"] = *o.data;
    if (o.index) j["index"] = *o.index;
    if (o.output) j["output"] = *o.output;
    if (o.window_length) j["window_length"] = *o.window_length;
    if (o.bins) j["bin_rule"] = {{"strategy", "equal_width_count"}, {"value", *o.bins}};
    if (o.mi_mode) j["mi_mode"] = *o.mi_mode;
    if (o.series_mode) j["series_mode"] = *o.series_mode;
    if (o.target_lag) j["target_lag"] = *o.target_lag;
    if (o.distance) j["distance_transform"] = *o.distance;
    if (o.modularity_seed) j["modularity_seed"] = *o.modularity_seed;
    if (o.grid_step) j["grid_step"] = *o.grid_step;
    if (o.threads) j["threads"] = *o.threads;
    if (o.zscore) j["zscore_combine"] = true;
    if (o.dump_matrices) j["dump_matrices"] = true;
    if (o.dump_strengths) j["dump_strengths"] = true;
    if (j.is_null()) {
        c.validate();
        return c;
    }
    return minet::RunConfig::from_json(j, c);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mutual-information market networks: metrics, regressions and ARIMA forecasts"};
    app.require_subcommand(1);

    minet::SynthOptions synth;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic minute-bar fixture");
    synth_cmd->add_option("-o,--output", synth_out, "fixture directory")->required();
    synth_cmd->add_option("--tickers", synth.tickers, "number of tickers");
    synth_cmd->add_option("--minutes", synth.minutes, "number of minutes");
    synth_cmd->add_option("--window-length", synth.window_length, "minutes per window");
    synth_cmd->add_option("--regimes", synth.regimes, "number of co-movement regimes");
    synth_cmd->add_option("--seed", synth.seed, "random seed");
    synth_cmd->add_option("--missing-rate", synth.missing_rate, "probability a minute record is absent");

    Overrides overrides;
    struct Command {
        const char* name;
        const char* help;
        void (*run)(const minet::RunConfig&);
    };
    const Command commands[] = {
        {"metrics", "compute the per-window metric table and change series", minet::run_metrics},
        {"regress", "score every metric against index changes", minet::run_regress},
        {"combine", "grid-search the configured metric combinations", minet::run_combine},
        {"arima", "fit baseline ARIMA and ARIMAX models", minet::run_arima},
        {"report", "run metrics, regress, combine and arima", minet::run_report},
    };
    std::vector<CLI::App*> run_cmds;
    for (const auto& c : commands) {
        auto* cmd = app.add_subcommand(c.name, c.help);
        add_run_options(cmd, overrides);
        run_cmds.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (synth_cmd->parsed()) {
            minet::write_fixture(minet::synthesize(synth), synth_out);
            return 0;
        }
        for (std::size_t i = 0; i < run_cmds.size(); ++i) {
            if (run_cmds[i]->parsed()) {
                commands[i].run(resolve(overrides));
                return 0;
            }
        }
    } catch (const minet::Error& e) {
        spdlog::error("{}", e.what());
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 3;
    }
    return 1;
}
