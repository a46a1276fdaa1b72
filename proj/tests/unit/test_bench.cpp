#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>
#include <sys/wait.h>

#include "tsode/bench/config.hpp"
#include "tsode/bench/demo.hpp"
#include "tsode/bench/grid.hpp"
#include "tsode/bench/plot.hpp"
#include "tsode/bench/seed.hpp"
#include "tsode/bench/table.hpp"

using namespace tsode;
using namespace tsode::bench;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("tsode_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// small grid: one dataset, one horizon
GridConfig small_config(std::vector<std::string> models, std::vector<double> sigmas = {0.0}) {
    return config_from_json({{"datasets", {{{"synthetic", "seasonal24"}, {"count", 3000}}}},
                             {"horizons", {30}},
                             {"sigmas", sigmas},
                             {"repeats", 2},
                             {"models", models},
                             {"seed", 7},
                             {"threads", 1},
                             {"model_options",
                              {{"closed_form", {{"modes", 2}, {"epochs", 30}, {"max_windows", 200}}},
                               {"latent_ode", {{"iterations", 5}, {"latent", 2}, {"field", "linear"}, {"latent_dt", 1e6}}}}}});
}

}  // namespace

TEST(Seed, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Seed, Splitmix64FirstOutput) {
    // first output of the reference generator seeded with 0
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Seed, CellSeedDependsOnEveryCoordinate) {
    const auto base = cell_seed(1, "d", "m", 0.1, 100, 0);
    EXPECT_EQ(base, cell_seed(1, "d", "m", 0.1, 100, 0));
    EXPECT_NE(base, cell_seed(2, "d", "m", 0.1, 100, 0));
    EXPECT_NE(base, cell_seed(1, "e", "m", 0.1, 100, 0));
    EXPECT_NE(base, cell_seed(1, "d", "n", 0.1, 100, 0));
    EXPECT_NE(base, cell_seed(1, "d", "m", 0.2, 100, 0));
    EXPECT_NE(base, cell_seed(1, "d", "m", 0.1, 250, 0));
    EXPECT_NE(base, cell_seed(1, "d", "m", 0.1, 100, 1));
}

TEST(Config, DefaultsGiveTwentyFourCellsPerModel) {
    const auto c = config_from_json({{"datasets", {"seasonal24", "two_tone"}}});
    EXPECT_EQ(c.datasets.size() * c.sigmas.size() * c.horizons.size(), 24u);
    EXPECT_EQ(c.models.size(), 6u);
    EXPECT_EQ(c.repeats, 5u);
    EXPECT_EQ(c.history_for(250), 250u);
    EXPECT_EQ(c.datasets[1].name, "two_tone");
}

TEST(Config, AutomaticLengthFitsLongestWindow) {
    const auto c = config_from_json({{"datasets", {"two_tone"}}});
    const auto raw = load_dataset(c.datasets[0], c);
    auto [tr, va, te] = split(raw, c.split);
    EXPECT_GE(te.size(), 1000u + 100u);
    EXPECT_DOUBLE_EQ(raw.dt(), 0.1);
}

TEST(Config, RelativeCsvResolvesAgainstBase) {
    const auto c = config_from_json({{"datasets", {{{"csv", "data.csv"}, {"column", "y"}}}}}, "/tmp/cfg");
    EXPECT_EQ(c.datasets[0].csv, "/tmp/cfg/data.csv");
    EXPECT_EQ(c.datasets[0].name, "data");
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(config_from_json({{"datasets", nlohmann::json::array()}}), Error);
    EXPECT_THROW(config_from_json({{"horizons", {100}}}), Error);
    EXPECT_THROW(config_from_json({{"datasets", {"two_tone"}}, {"models", {"prophet"}}}), Error);
    EXPECT_THROW(config_from_json({{"datasets", {"two_tone"}}, {"sigmas", {-0.1}}}), Error);
    EXPECT_THROW(config_from_json({{"datasets", {"two_tone"}}, {"repeats", 0}}), Error);
    EXPECT_THROW(config_from_json({{"datasets", {"two_tone", "two_tone"}}}), Error);
    EXPECT_THROW(config_from_json({{"datasets", {"sine_pair"}}}), Error);
    EXPECT_THROW(config_from_json({{"datasets", {"two_tone"}}, {"horizons", "100"}}), Error);
    EXPECT_THROW(config_from_json({{"datasets", {"two_tone"}}, {"split", {{"train", 0.9}, {"val", 0.2}, {"test", 0.1}}}}),
                 Error);
    EXPECT_THROW(load_config("/nonexistent/config.json"), Error);

    const auto dir = scratch_dir("badjson");
    std::ofstream(dir / "c.json") << "{ not json";
    EXPECT_THROW(load_config(dir / "c.json"), Error);
}

TEST(Table, RoundsHalfAwayFromZero) {
    EXPECT_EQ(round_fixed(0.5049), "0.505");
    EXPECT_EQ(round_fixed(0.0), "0.000");
    EXPECT_EQ(round_fixed(1.23449), "1.234");
    EXPECT_EQ(round_fixed(2.0, 1), "2.0");
}

TEST(Table, CsvHasHeaderAndOneLinePerRow) {
    MetricTable t;
    t.rows.push_back({"two_tone", "repeater", 0.1, 100, 0.25, 0.0});
    const auto csv = table_csv(t);
    EXPECT_EQ(count_lines(csv), 2u);
    EXPECT_EQ(csv, "dataset,model,sigma,horizon,mae_mean,mae_std\ntwo_tone,repeater,0.1,100,0.25,0\n");
}

TEST(Table, CsvNumbersRoundTrip) {
    MetricTable t;
    t.rows.push_back({"d", "m", 0.3, 5, 0.1 + 0.2, 1.0 / 3.0});
    const auto csv = table_csv(t);
    const auto line = csv.substr(csv.find('\n') + 1);
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    ASSERT_EQ(fields.size(), 6u);
    EXPECT_EQ(std::stod(fields[4]), 0.1 + 0.2);
    EXPECT_EQ(std::stod(fields[5]), 1.0 / 3.0);
}

TEST(Table, MarkdownLayout) {
    MetricTable t;
    const std::vector<double> sigmas{0.0, 0.1, 0.2, 0.3};
    const std::vector<std::size_t> horizons{100, 250, 500};
    for (auto s : sigmas)
        for (auto h : horizons) t.rows.push_back({"seasonal24", "lstm", s, h, s + 0.001 * double(h), 0.01});
    const auto md = table_markdown(t, {"seasonal24"}, {"lstm"}, sigmas, horizons);
    EXPECT_NE(md.find("## seasonal24"), std::string::npos);
    EXPECT_NE(md.find("### lstm"), std::string::npos);
    EXPECT_NE(md.find("| Noise level | 100 points | 250 points | 500 points |"), std::string::npos);
    EXPECT_NE(md.find("| 0.2 | 0.300 ± 0.010 | 0.450 ± 0.010 | 0.700 ± 0.010 |"), std::string::npos);
    std::size_t body = 0;
    std::stringstream ss(md);
    for (std::string line; std::getline(ss, line);)
        if (line.rfind("| 0", 0) == 0) ++body;
    EXPECT_EQ(body, 4u);
}

TEST(Table, MarkdownMarksFailedCells) {
    MetricTable t;
    t.failures.push_back({"d", "latent_ode", 0.0, 10, "diverged"});
    const auto md = table_markdown(t, {"d"}, {"latent_ode"}, {0.0}, {10});
    EXPECT_NE(md.find("| 0 | failed |"), std::string::npos);
    EXPECT_NE(md.find("## Failed cells"), std::string::npos);
    EXPECT_NE(md.find("diverged"), std::string::npos);
}

TEST(Table, EmitRejectsEmptyTable) {
    const auto dir = scratch_dir("emit");
    EXPECT_THROW(emit_table(MetricTable{}, TableFormat::csv, (dir / "x.csv").string()), Error);
    MetricTable t;
    t.rows.push_back({"d", "m", 0.0, 1, 1.0, 0.0});
    emit_table(t, TableFormat::markdown, (dir / "x.md").string());
    EXPECT_NE(read_file(dir / "x.md").find("| 0 | 1.000 ± 0.000 |"), std::string::npos);
}

TEST(Plot, DeterministicAndParsesAsXml) {
    std::vector<double> history(600), truth(100), pred(100);
    for (std::size_t i = 0; i < 600; ++i) history[i] = std::sin(0.05 * double(i));
    for (std::size_t i = 0; i < 100; ++i) {
        truth[i] = std::sin(0.05 * double(600 + i));
        pred[i] = 0.9 * truth[i];
    }
    const std::vector<NamedSeries> preds{{"closed_form", pred}, {"repeater<&>", truth}};
    const auto a = render_plot(history, truth, preds, "title");
    EXPECT_EQ(a, render_plot(history, truth, preds, "title"));

    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(a);
    ASSERT_NO_THROW(pt::read_xml(in, tree));
    std::size_t polylines = 0;
    const std::function<void(const pt::ptree&)> walk = [&](const pt::ptree& node) {
        for (const auto& [key, child] : node) {
            if (key == "polyline") ++polylines;
            walk(child);
        }
    };
    walk(tree);
    EXPECT_GE(polylines, 2u);
    EXPECT_NE(a.find("repeater&lt;&amp;&gt;"), std::string::npos);
}

TEST(Plot, EmptyPredictionsAndBadShapes) {
    const std::vector<double> h{1.0, 2.0}, t{3.0};
    EXPECT_NE(render_plot(h, t, {}).find("<svg"), std::string::npos);
    EXPECT_THROW(render_plot({}, t, {}), Error);
    EXPECT_THROW(render_plot(h, t, {{"m", {1.0, 2.0}}}), Error);
    // a flat series still renders
    EXPECT_NO_THROW(render_plot({1.0, 1.0}, {1.0}, {{"m", {1.0}}}));
}

TEST(Grid, RepeaterHasZeroSpreadAndOneRowPerCell) {
    const auto r = run_grid(small_config({"repeater"}, {0.0, 0.3}));
    ASSERT_EQ(r.table.rows.size(), 2u);
    EXPECT_TRUE(r.table.failures.empty());
    for (const auto& row : r.table.rows) EXPECT_EQ(row.mae_std, 0.0);
    EXPECT_GT(r.table.rows[1].mae_mean, r.table.rows[0].mae_mean);
    EXPECT_EQ(count_lines(table_csv(r.table)), 3u);
    ASSERT_EQ(r.plots.size(), 2u);
    EXPECT_EQ(r.plots[0].windows.front(), 0u);
    EXPECT_EQ(r.plots[0].predictions[0].size(), 1u);
    EXPECT_TRUE(r.spectrum.contains("seasonal24"));
    const auto& peaks = r.spectrum["seasonal24"]["train_peaks"];
    ASSERT_FALSE(peaks.empty());
    EXPECT_NEAR(peaks[0]["period"].get<double>(), 24.0, 0.3);
}

TEST(Grid, ClosedFormBeatsRepeaterOnSeasonal) {
    const auto r = run_grid(small_config({"repeater", "closed_form"}));
    ASSERT_TRUE(r.table.failures.empty());
    const auto* rep = r.table.find("seasonal24", "repeater", 0.0, 30);
    const auto* cf = r.table.find("seasonal24", "closed_form", 0.0, 30);
    ASSERT_TRUE(rep && cf);
    EXPECT_LT(cf->mae_mean, rep->mae_mean);
    EXPECT_FALSE(r.spectrum["seasonal24"]["closed_form_fits"].empty());
}

TEST(Grid, FailureIsIsolatedToItsCell) {
    const auto r = run_grid(small_config({"repeater", "latent_ode"}));
    ASSERT_EQ(r.table.failures.size(), 1u);
    EXPECT_EQ(r.table.failures[0].model, "latent_ode");
    ASSERT_EQ(r.table.rows.size(), 1u);
    EXPECT_EQ(r.table.rows[0].model, "repeater");
}

TEST(Grid, ResultsIndependentOfThreadCount) {
    auto c = small_config({"repeater", "closed_form"}, {0.1});
    const auto one = table_csv(run_grid(c).table);
    c.threads = 3;
    EXPECT_EQ(one, table_csv(run_grid(c).table));
}

TEST(Grid, WriteOutputsProducesAllArtifacts) {
    const auto c = small_config({"repeater"}, {0.0, 0.3});
    const auto r = run_grid(c);
    const auto dir = scratch_dir("outputs");
    write_outputs(c, r, dir);
    EXPECT_TRUE(fs::exists(dir / "results.csv"));
    EXPECT_TRUE(fs::exists(dir / "results.md"));
    EXPECT_TRUE(nlohmann::json::accept(read_file(dir / "spectrum.json")));
    std::size_t svgs = 0;
    for (const auto& e : fs::directory_iterator(dir / "plots")) svgs += e.path().extension() == ".svg";
    EXPECT_EQ(svgs, 4u);
    EXPECT_TRUE(fs::exists(dir / "plots" / "seasonal24_sigma0.3_n30_random.svg"));

    const auto again = scratch_dir("outputs2");
    write_outputs(c, run_grid(c), again);
    EXPECT_EQ(read_file(dir / "results.csv"), read_file(again / "results.csv"));
}

TEST(Cli, BenchExitCodes) {
    const auto dir = scratch_dir("cli");
    auto write_config = [&](const std::string& file, const std::string& models) {
        std::ofstream(dir / file) << R"({"datasets": [{"synthetic": "seasonal24", "count": 3000}],
            "horizons": [30], "sigmas": [0], "repeats": 1, "models": )" << models
                                  << R"(, "model_options": {"latent_ode": {"iterations": 5, "latent": 2, "field": "linear", "latent_dt": 1e6}}})";
    };
    write_config("ok.json", R"(["repeater"])");
    write_config("fail.json", R"(["repeater", "latent_ode"])");
    auto run = [&](const std::string& cfg, const std::string& out) {
        const std::string cmd = std::string(TSODE_CLI) + " bench --quiet --config " + (dir / cfg).string() + " --out " +
                                (dir / out).string() + " > " + (dir / (out + ".log")).string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    EXPECT_EQ(run("ok.json", "ok"), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "results.csv"));
    EXPECT_EQ(run("fail.json", "fail"), 2);
    EXPECT_TRUE(fs::exists(dir / "fail" / "results.md"));
    EXPECT_NE(read_file(dir / "fail" / "results.md").find("failed"), std::string::npos);
}

TEST(Demo, CompanionLastRowAndSpectrum) {
    const auto r = demo_companion();
    EXPECT_TRUE(r.ok);
    const auto last = r.json["matrix"][3].get<std::vector<double>>();
    EXPECT_EQ(last, (std::vector<double>{-4.0, 0.0, -5.0, 0.0}));
    EXPECT_LE(r.json["root_error"].get<double>(), 1e-8);
}

TEST(Demo, SineRecovery) {
    const auto r = demo_sine_recovery(0);
    EXPECT_TRUE(r.ok) << r.text;
    EXPECT_LE(r.json["max_deviation"].get<double>(), 0.02);
    EXPECT_LE(r.json["iterations"].get<std::size_t>(), 1000u);
}

TEST(Demo, ClosedFormSpeed) {
    const auto r = demo_closed_form_speed(0);
    EXPECT_TRUE(r.ok) << r.text;
    EXPECT_GE(r.json["ratio"].get<double>(), 5.0);
}

TEST(Demo, TwoToneSpectrum) {
    const auto r = demo_two_tone_spectrum(0);
    EXPECT_TRUE(r.ok) << r.text;
    EXPECT_LE(r.json["root_error"].get<double>(), 0.05);
}

TEST(Demo, UnknownName) {
    EXPECT_THROW(run_demo("nope"), Error);
    EXPECT_EQ(kDemoNames.size(), 4u);
}
