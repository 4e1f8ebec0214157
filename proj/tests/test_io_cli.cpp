#include "implreg/cli.hpp"
#include "implreg/errors.hpp"
#include "implreg/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace implreg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("implreg_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run(const json& doc, const std::string& command, const fs::path& out, std::size_t threads = 1) {
    CliOverrides ov;
    ov.output_dir = out.string();
    ov.threads = threads;
    std::ostringstream err;
    return run_config(parse_run_config(doc, command, ov), err);
}

const json power_law = {{"generator", "power_law"}, {"a", 2}, {"r", 1}, {"d", 400}, {"sigma2", 1}};

}  // namespace

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
    CsvTable t({"a", "b", "c", "d"});
    t.add_row({1.0 / 3.0, std::int64_t{7}, std::string("x"), std::monostate{}});
    EXPECT_EQ(t.str(), "a,b,c,d\n0.33333333333333331,7,x,\n");
}

TEST(ProblemJson, GeneratorsAndCanonicalRoundTrip) {
    const auto p = problem_from_json(power_law);
    EXPECT_EQ(p.dim(), 400u);
    const auto back = problem_from_json(problem_to_json(p));
    EXPECT_EQ(back.wstar, p.wstar);
    EXPECT_EQ(back.spectrum.values().size(), 400u);
    EXPECT_EQ(back.spectrum[17], p.spectrum[17]);

    const json spike = {{"generator", "spike"}, {"n", 8}, {"sigma2", 0.5}};
    EXPECT_EQ(problem_from_json(spike).dim(), 64u);
    const json bad = {{"generator", "spike"}, {"n", 10}, {"d", 10}};
    EXPECT_THROW(problem_from_json(bad), ValidationError);
    const json explicit_doc = {{"spectrum", {{"explicit", {2.0, 1.0}}}}, {"wstar", {1.0, 0.0}}, {"sigma2", 1.0}};
    EXPECT_DOUBLE_EQ(problem_from_json(explicit_doc).signal_energy(), 2.0);
}

TEST(Validate, SpecExamples) {
    const json spike = {{"problem", {{"generator", "spike"}, {"n", 10}, {"d", 10}}}, {"params", {{"n", 10}}}};
    auto d = validate_config(spike, "bounds");
    ASSERT_FALSE(d.empty());
    EXPECT_EQ(d[0].level, Diagnostic::Level::error);
    EXPECT_NE(d[0].message.find("d ≥ n² required"), std::string::npos);

    const json small = {{"problem", power_law}, {"params", {{"n", 50}}}};
    d = validate_config(small, "bounds");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].level, Diagnostic::Level::warning);
    EXPECT_NE(d[0].message.find("n ≥ 100"), std::string::npos);

    const json ok = {{"problem", power_law}, {"params", {{"n", 200}}}};
    EXPECT_TRUE(validate_config(ok, "bounds").empty());

    EXPECT_FALSE(validate_config(ok, "frobnicate").empty());
    const json typo = {{"problem", power_law}, {"parms", json::object()}};
    EXPECT_FALSE(validate_config(typo, "bounds").empty());
}

TEST(Validate, UnreadableFile) {
    EXPECT_THROW(validate_config(fs::path("/nonexistent/config.json")), std::exception);
}

TEST(Cli, BoundsOnSpikeReportsEllStar) {
    const auto out = scratch("bounds");
    const json doc = {{"problem", {{"generator", "spike"}, {"n", 100}}}, {"params", {{"n", 100}}}};
    ASSERT_EQ(run(doc, "bounds", out), 0);
    const std::string csv = slurp(out / "result.csv");
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::vector<std::string> cols;
    {
        std::stringstream hs(header);
        for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
    }
    const auto ell = std::find(cols.begin(), cols.end(), "ell_star") - cols.begin();
    bool found = false;
    while (std::getline(lines, row)) {
        std::stringstream rs(row);
        std::vector<std::string> cells;
        for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
        if (cells[0] == "gd_lower") {
            EXPECT_EQ(cells[ell], "1");
            found = true;
        }
    }
    EXPECT_TRUE(found);
    EXPECT_TRUE(fs::exists(out / "run.json"));
    const json rj = json::parse(slurp(out / "run.json"));
    EXPECT_EQ(rj.at("command"), "bounds");
    EXPECT_EQ(rj.at("seed").get<std::uint64_t>(), default_seed);
    EXPECT_TRUE(rj.at("seed_defaulted").get<bool>());
}

TEST(Cli, RatesReportsTheory) {
    const auto out = scratch("rates");
    const json doc = {{"params",
                       {{"a", 2},
                        {"r_list", {1}},
                        {"algorithms", {"gd"}},
                        {"n_grid", {32, 64, 128}},
                        {"core_points", 5},
                        {"extension_decades", 0}}},
                      {"trials", 2}};
    ASSERT_EQ(run(doc, "rates", out), 0);
    const std::string csv = slurp(out / "result.csv");
    EXPECT_NE(csv.find("gd,2,1,"), std::string::npos);
    EXPECT_NE(csv.find(",-0.80000000000000004,"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "rate_points.csv"));
    EXPECT_TRUE(fs::exists(out / "plotdata_rates_gd_a2_r1.csv"));
}

TEST(Cli, DeterministicAcrossRunsAndThreads) {
    const json doc = {{"problem", power_law},
                      {"params", {{"algorithm", "ridge"}, {"n", 60}, {"grid_logspace", {-3, 0, 5}}}},
                      {"trials", 6},
                      {"seed", 17}};
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    ASSERT_EQ(run(doc, "sweep", a, 1), 0);
    ASSERT_EQ(run(doc, "sweep", b, 1), 0);
    ASSERT_EQ(run(doc, "sweep", c, 4), 0);
    for (const char* f : {"result.csv", "plotdata_sweep_ridge.csv"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f));
        EXPECT_EQ(slurp(a / f), slurp(c / f));
    }
}

TEST(Cli, ExitCodes) {
    const auto out = scratch("codes");
    const json bad_spike = {{"problem", {{"generator", "spike"}, {"n", 10}, {"d", 50}}}, {"params", {{"n", 10}}}};
    EXPECT_EQ(run(bad_spike, "bounds", out), 2);
    const json missing = {{"problem", power_law}, {"params", json::object()}};
    EXPECT_EQ(run(missing, "simulate", out), 2);
    const json guard = {{"params", {{"n_grid", {16}}, {"memory_budget", 100}}}};
    EXPECT_EQ(run(guard, "separation", out), 3);
    EXPECT_THROW(parse_run_config(json::object(), "nope"), ValidationError);
    const json mismatch = {{"command", "rates"}};
    EXPECT_THROW(parse_run_config(mismatch, "bounds"), ValidationError);
}

TEST(Cli, MainEntryPoint) {
    const auto dir = scratch("main");
    fs::create_directories(dir);
    const fs::path cfg = dir / "sim.json";
    std::ofstream(cfg) << json({{"problem", power_law},
                                {"params", {{"algorithm", "sgd"}, {"n", 100}}}})
                              .dump();
    const std::string cfg_s = cfg.string(), out_s = (dir / "out").string();
    std::vector<std::string> args{"implreg", "simulate", "--config", cfg_s, "--out", out_s, "--seed", "5"};
    std::vector<char*> argv;
    for (auto& s : args) argv.push_back(s.data());
    EXPECT_EQ(cli_main(static_cast<int>(argv.size()), argv.data()), 0);
    EXPECT_NE(slurp(dir / "out" / "result.csv").find("ExactRecursion"), std::string::npos);

    std::vector<std::string> bad{"implreg", "frobnicate"};
    std::vector<char*> bargv;
    for (auto& s : bad) bargv.push_back(s.data());
    EXPECT_EQ(cli_main(static_cast<int>(bargv.size()), bargv.data()), 2);
}
