#include "minet/config.hpp"
#include "minet/error.hpp"
#include "minet/pipeline.hpp"
#include "minet/synth.hpp"
#include "minet/table_io.hpp"
#include "unit/support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

using namespace minet;
namespace fs = std::filesystem;

namespace {

SynthOptions small_fixture() {
    SynthOptions o;
    o.tickers = 12;
    o.minutes = 50 * 60 + 17;
    o.regimes = 2;
    o.first_regime_window = 15;
    o.seed = 7;
    return o;
}

RunConfig small_config(const fs::path& data, const fs::path& out) {
    RunConfig c;
    c.data = data;
    c.output = out;
    c.arima.bounds = {1, 1, 1};
    c.arima.exog = {"KLD-3", "RS-All"};
    c.grid_step = 0.01;
    return c;
}

const std::vector<std::string> kGoldenFiles{"metrics.csv", "changes.csv", "table1.csv", "regression_scores.csv",
                                            "combinations.csv", "arima_mse.csv"};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MINET_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Pipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new test_support::TempDir("pipeline");
        write_fixture(synthesize(small_fixture()), dir_->path() / "data");
        run_report(small_config(dir_->path() / "data", dir_->path() / "out"));
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static fs::path data() { return dir_->path() / "data"; }
    static fs::path out() { return dir_->path() / "out"; }
    static inline test_support::TempDir* dir_ = nullptr;
};

}  // namespace

TEST(MetricNames, CanonicalOrder) {
    const RunConfig c;
    const auto names = metric_names(c.horizons);
    ASSERT_EQ(names.size(), 21u);
    EXPECT_EQ(names.front(), "KLD-3");
    EXPECT_EQ(names[4], "KLD-All");
    EXPECT_EQ(names[5], "RS-3");
    EXPECT_EQ(names[9], "RS-All");
    EXPECT_EQ(names.back(), "modularity");
}

TEST(ChangesFromCloses, Lags) {
    const std::vector<double> closes{10, 12, 11, 15};
    const ChangeSeries c1 = changes_from_closes(closes, 1);
    EXPECT_EQ(c1.values, (std::vector<double>{2, -1, 4}));
    EXPECT_EQ(c1.absolute, (std::vector<double>{2, 1, 4}));
    EXPECT_EQ(c1.squared, (std::vector<double>{4, 1, 16}));
    EXPECT_EQ(changes_from_closes(closes, 2).values, (std::vector<double>{1, 3}));
}

TEST(LaggedExog, ShiftsForward) {
    const MetricSeries m{"m", {std::nullopt, 1.0, 2.0, 3.0}};
    EXPECT_EQ(lagged_exog(m, 0), m.values);
    EXPECT_EQ(lagged_exog(m, 1), (ExogSeries{std::nullopt, std::nullopt, 1.0, 2.0}));
}

TEST_F(Pipeline, WindowsAndRowCounts) {
    const CsvTable metrics = read_csv(out() / "metrics.csv");
    EXPECT_EQ(metrics.rows.size(), 50u);
    EXPECT_EQ(metrics.header.size(), 22u);
    const auto series = parse_metric_table(metrics);
    EXPECT_EQ(series.size(), 21u);
    const CsvTable changes = read_csv(out() / "changes.csv");
    EXPECT_EQ(changes.rows.size(), 50u);
    EXPECT_EQ(parse_change_table(changes).changes.size(), 49u);
    EXPECT_EQ(read_csv(out() / "table1.csv").rows.size(), 21u);
    const nlohmann::json manifest = nlohmann::json::parse(test_support::read_file(out() / "manifest.json"));
    EXPECT_EQ(manifest["windows"], 50);
    EXPECT_EQ(manifest["dropped_rows"], 17);
    EXPECT_EQ(manifest["tickers"], 12);
    EXPECT_EQ(manifest["inputs"].size(), 13u);
}

TEST_F(Pipeline, EveryOutputParses) {
    std::size_t tables = 0;
    for (const auto& entry : fs::recursive_directory_iterator(out())) {
        if (entry.path().extension() != ".csv") continue;
        const CsvTable t = read_csv(entry.path());
        EXPECT_FALSE(t.header.empty()) << entry.path();
        ++tables;
    }
    EXPECT_GE(tables, 10u);
    const CsvTable mse = read_csv(out() / "arima_mse.csv");
    ASSERT_EQ(mse.rows.size(), 3u);
    EXPECT_EQ(mse.rows[1][0], "ARIMA(1,1,0)+KLD-3");
    EXPECT_TRUE(fs::exists(out() / "predictions" / "ARIMA_1_1_0_RS-All.csv"));
    EXPECT_TRUE(fs::exists(out() / "arima_report.txt"));
}

TEST_F(Pipeline, MatchesGoldenFiles) {
    const fs::path golden = MINET_GOLDEN_DIR;
    const bool update = std::getenv("MINET_UPDATE_GOLDEN") != nullptr;
    for (const auto& name : kGoldenFiles) {
        const std::string produced = test_support::read_file(out() / name);
        if (update) {
            test_support::write_file(golden / name, produced);
            continue;
        }
        ASSERT_TRUE(fs::exists(golden / name)) << "missing golden file " << name;
        EXPECT_EQ(produced, test_support::read_file(golden / name)) << name;
    }
}

TEST_F(Pipeline, RerunIsByteIdentical) {
    const fs::path again = dir_->path() / "again";
    RunConfig c = small_config(data(), again);
    c.threads = 3;
    run_report(c);
    for (const auto& entry : fs::recursive_directory_iterator(out())) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), out());
        if (rel == "manifest.json") continue;
        EXPECT_EQ(test_support::read_file(entry.path()), test_support::read_file(again / rel)) << rel;
    }
    // The manifest echoes the output path and thread count; everything else must match.
    auto a = nlohmann::json::parse(test_support::read_file(out() / "manifest.json"));
    auto b = nlohmann::json::parse(test_support::read_file(again / "manifest.json"));
    for (auto* m : {&a, &b}) {
        (*m)["config"].erase("output");
        (*m)["config"].erase("threads");
    }
    EXPECT_EQ(a, b);
}

TEST_F(Pipeline, LaterStagesReuseMetricTable) {
    const fs::path copy = dir_->path() / "reuse";
    fs::create_directories(copy);
    fs::copy_file(out() / "metrics.csv", copy / "metrics.csv");
    fs::copy_file(out() / "changes.csv", copy / "changes.csv");
    RunConfig c = small_config(dir_->path() / "no_such_data", copy);
    run_regress(c);
    EXPECT_EQ(test_support::read_file(copy / "table1.csv"), test_support::read_file(out() / "table1.csv"));
}

TEST_F(Pipeline, UnknownMetricIsUsageError) {
    RunConfig c = small_config(data(), dir_->path() / "badcombo");
    c.combinations = {{"X", "KLD-3", "nope", {RegressionKind::linear}}};
    EXPECT_THROW(run_report(c), UsageError);
    EXPECT_FALSE(fs::exists(dir_->path() / "badcombo" / "combinations.csv"));
}

TEST_F(Pipeline, CliExitCodes) {
    const std::string out_dir = (dir_->path() / "cli").string();
    EXPECT_EQ(run_cli("metrics -d " + data().string() + " -o " + out_dir), 0);
    EXPECT_TRUE(fs::exists(fs::path(out_dir) / "metrics.csv"));
    EXPECT_EQ(run_cli(""), 1);
    EXPECT_EQ(run_cli("metrics --no-such-flag"), 1);
    EXPECT_EQ(run_cli("metrics -d " + data().string() + " -o " + out_dir + " --target-lag 0"), 1);
    EXPECT_EQ(run_cli("metrics -d " + (dir_->path() / "absent").string() + " -o " + out_dir + "2"), 2);
}

TEST(PipelineErrors, EmptyDataDirLeavesNoOutputs) {
    test_support::TempDir dir("emptydata");
    fs::create_directories(dir.path() / "data");
    const RunConfig c = small_config(dir.path() / "data", dir.path() / "out");
    EXPECT_THROW(run_report(c), DataError);
    EXPECT_FALSE(fs::exists(dir.path() / "out"));
    for (const auto& entry : fs::directory_iterator(dir.path())) EXPECT_EQ(entry.path().filename(), "data");
    EXPECT_EQ(run_cli("report -d " + (dir.path() / "data").string() + " -o " + (dir.path() / "out").string()), 2);
}

TEST(PipelineErrors, StageErrorsNameTheWindow) {
    PricePanel panel;
    panel.tickers = {"A", "B"};
    panel.index_name = "I";
    panel.timestamps = trading_minutes(1474536600, 120);
    panel.prices = Eigen::MatrixXd::Constant(120, 2, 5.0);
    panel.index_series = Eigen::VectorXd::Constant(120, 100.0);
    RunConfig c;
    c.horizons = {Horizon::of(1)};
    try {
        (void)compute_metrics(panel, c);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("window"), std::string::npos) << e.what();
    }
}
