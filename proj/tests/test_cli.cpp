#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli_runner.hpp"
#include "symchaos/json_io.hpp"

using namespace symchaos;
using testutil::data;
using testutil::run_cli;
using testutil::tmp;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(CliAnalyze, LogisticFixture) {
    const auto report = tmp("logistic_report.json");
    const auto r = run_cli("analyze " + data("logistic_r4.csv") + " -o " + report);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json_file(report);
    EXPECT_NO_THROW(validate_report_json(j));
    EXPECT_GT(j["lyapunov"]["lambda"].get<double>(), 0.0);
    EXPECT_GE(j["best_pairs"].size(), 1u);
    ASSERT_TRUE(j.contains("exhaustive_pairs"));
    EXPECT_EQ(j["best_pairs"][0]["distance"], j["exhaustive_pairs"][0]["distance"]);
    EXPECT_GT(j["horizon"].get<double>(), 0.0);
}

TEST(CliAnalyze, DeterministicForSeed) {
    const auto a = run_cli("analyze " + data("logistic_r4.csv") + " --lag 1 --dim 2 --seed 7 --population 16 --generations 10");
    const auto b = run_cli("analyze " + data("logistic_r4.csv") + " --lag 1 --dim 2 --seed 7 --population 16 --generations 10");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(Json::parse(a.out)["seed"], 7);
}

TEST(CliAnalyze, SineIsNotChaotic) {
    const auto r = run_cli("analyze " + data("sine.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Lyapunov"), std::string::npos) << r.err;
}

TEST(CliAnalyze, MissingFileAndBadFlags) {
    EXPECT_EQ(run_cli("analyze " + tmp("does_not_exist.csv")).code, 1);
    EXPECT_EQ(run_cli("analyze " + data("logistic_r4.csv") + " --dim 40").code, 1);
    EXPECT_EQ(run_cli("analyze " + data("logistic_r4.csv") + " --M 48 --lag 1 --dim 2").code, 1);
    EXPECT_EQ(run_cli("").code, 1);
    EXPECT_EQ(run_cli("frobnicate").code, 1);
}

TEST(CliGenerate, UnmodulatedFixture) {
    const auto r = run_cli("generate " + data("published_model.json") + " --steps 1000 --modulator none");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 1001u);
    const auto m = published_model();
    double y0 = 0.0;
    ASSERT_TRUE(detail::parse_double(rows[0].substr(2), y0));
    EXPECT_EQ(rows[0].substr(0, 2), "0,");
    EXPECT_EQ(y0, m.C.dot(m.x0));
    EXPECT_EQ(rows[1000].substr(0, 5), "1000,");
}

TEST(CliGenerate, UnitModulatorByteIdentical) {
    const auto a = run_cli("generate " + data("published_model.json") + " --steps 2000 --modulator none");
    const auto b = run_cli("generate " + data("published_model.json") + " --steps 2000 --modulator \"p:0;breaks:;q:1\"");
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(CliGenerate, DivergenceExitsThree) {
    // With g(1) = e sin 1 ~ 2.29 and |psi| ~ 0.52, q = 1e13 pushes the first state past 1e12.
    const auto r = run_cli("generate " + data("published_model.json") + " --steps 100 --modulator \"p:0;breaks:;q:1e13\"");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("step 2"), std::string::npos) << r.err;
}

TEST(CliGenerate, MalformedSpecExitsOne) {
    EXPECT_EQ(run_cli("generate " + data("published_model.json") + " --modulator \"p:0;q:1\"").code, 1);
    EXPECT_EQ(run_cli("generate " + data("published_model.json") + " --modulator \"p:0;breaks:5;q:1\"").code, 1);
    EXPECT_EQ(run_cli("generate " + tmp("nope.json")).code, 1);
}

TEST(CliIdentify, GenerateThenIdentifyRoundTrip) {
    const auto states = tmp("fixture_states.json");
    const auto model = tmp("fixture_identified.json");
    ASSERT_EQ(run_cli("generate " + data("published_model.json") + " --steps 1000 -o " + tmp("fixture_y.csv") +
                      " --states-out " + states)
                  .code,
              0);
    const auto r = run_cli("identify " + states + " -o " + model);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("state residual"), std::string::npos);
    const auto got = load_model(model);
    const auto want = published_model();
    EXPECT_LT((got.A - want.A).norm(), 1e-6);
    EXPECT_LT((got.psi_amp - want.psi_amp).norm(), 1e-6);
    EXPECT_LT((got.C - want.C).norm() / want.C.norm(), 1e-6);
    EXPECT_EQ(got.x0, want.x0);
}

TEST(CliIdentify, Errors) {
    const auto two = testutil::write_file("two_rows.csv", "0.1\n0.2\n");
    const auto a = run_cli("identify " + two);
    EXPECT_EQ(a.code, 1);
    EXPECT_NE(a.err.find("too few transitions"), std::string::npos) << a.err;

    std::string flat;
    for (int k = 0; k < 200; ++k) flat += "3.0\n";
    const auto b = run_cli("identify " + testutil::write_file("flat.csv", flat));
    EXPECT_EQ(b.code, 1);
    EXPECT_NE(b.err.find("condition estimate"), std::string::npos) << b.err;
}

TEST(CliIdentify, SeriesInput) {
    const auto r = run_cli("identify " + data("logistic_r4.csv") + " --lag 1 --dim 3 -o " + tmp("logistic_model.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = load_model(tmp("logistic_model.json"));
    EXPECT_EQ(m.n(), 3);
}

TEST(CliSweep, TentRobust) {
    const auto csv = tmp("tent.csv");
    const auto r = run_cli("sweep --family tent --lo 1.1 --hi 1.9 --steps 81 --iters 20000 -o " + csv);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto sweep = sweep_from_csv(testutil::slurp(csv));
    EXPECT_EQ(sweep.params.size(), 81u);
    const auto j = read_json_file(tmp("tent.windows.json"));
    EXPECT_NO_THROW(validate_window_report_json(j));
    EXPECT_TRUE(j["windows"].empty());
    EXPECT_EQ(j["verdict"], "robust");
}

TEST(CliSweep, LogisticWindowsExitFour) {
    const auto csv = tmp("logistic_sweep.csv");
    const auto report = tmp("logistic_report_windows.json");
    const auto r = run_cli("sweep --family logistic --lo 3.8 --hi 3.9 --steps 101 --iters 100000 -o " + csv +
                           " --report " + report);
    ASSERT_EQ(r.code, 4) << r.err;
    const auto j = read_json_file(report);
    EXPECT_NO_THROW(validate_window_report_json(j));
    bool hit = false;
    for (const auto& w : j["windows"]) hit = hit || (w[0].get<double>() <= 3.84 && 3.84 <= w[1].get<double>());
    EXPECT_TRUE(hit);
    EXPECT_EQ(j["verdict"], "not robust");
}

TEST(CliSweep, BadArguments) {
    EXPECT_EQ(run_cli("sweep --family henon --lo 1 --hi 2").code, 1);
    EXPECT_EQ(run_cli("sweep --family tent --lo 2 --hi 1").code, 1);
    EXPECT_EQ(run_cli("sweep --family tent --lo 1").code, 1);
}

TEST(CliCompare, SelfScaledAndMismatch) {
    const auto self = run_cli("compare " + data("logistic_r4.csv") + " " + data("logistic_r4.csv") + " --lag 1 --dim 2");
    ASSERT_EQ(self.code, 0) << self.err;
    auto j = Json::parse(self.out);
    EXPECT_NO_THROW(validate_comparison_json(j));
    EXPECT_EQ(j["lambda_difference"].get<double>(), 0.0);
    EXPECT_EQ(j["mean_descriptor_distance"].get<double>(), 0.0);

    std::ifstream in(data("logistic_r4.csv"));
    std::string scaled;
    for (std::string l; std::getline(in, l);) scaled += format_double(10.0 * std::stod(l)) + "\n";
    const auto big = testutil::write_file("logistic_x10.csv", scaled);
    const auto sc = run_cli("compare " + data("logistic_r4.csv") + " " + big + " --lag 1 --dim 2");
    ASSERT_EQ(sc.code, 0) << sc.err;
    j = Json::parse(sc.out);
    EXPECT_LT(j["mean_descriptor_distance"].get<double>(), 1e-6);

    const auto mm = run_cli("compare " + data("logistic_r4.csv") + " " + data("sine.csv") + " --lag 10 --dim 2 -o " +
                            tmp("mismatch.json"));
    ASSERT_EQ(mm.code, 0) << mm.err;
    j = read_json_file(tmp("mismatch.json"));
    EXPECT_NO_THROW(validate_comparison_json(j));
    EXPECT_TRUE(j["lambda_mismatch"].get<bool>());
}

TEST(CliCommon, FlagsAcceptedEverywhere) {
    const std::string common = " --seed 3 --lag 1 --dim 2 --min-frag-len 6 --prominence 0.02 --q 4 --M 32 --betas 1,1,0.5,0.5 --top-k 3";
    EXPECT_EQ(run_cli("analyze " + data("logistic_r4.csv") + common).code, 0);
    EXPECT_EQ(run_cli("generate " + data("published_model.json") + " --steps 10" + common).code, 0);
    EXPECT_EQ(run_cli("sweep --family tent --lo 1.2 --hi 1.8 --steps 5 --iters 100 -o " + tmp("c.csv") + common).code, 0);
    EXPECT_EQ(run_cli("compare " + data("logistic_r4.csv") + " " + data("logistic_r4.csv") + common).code, 0);
    EXPECT_EQ(run_cli("identify " + data("logistic_r4.csv") + common).code, 0);
}
