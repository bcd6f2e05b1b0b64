#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "netcond/model_io.hpp"

using namespace netcond;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(NETCOND_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    RunResult result;
    char buf[4096];
    while (pipe && fgets(buf, sizeof(buf), pipe)) result.output += buf;
    if (pipe) {
        const int status = pclose(pipe);
        result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    return result;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    EXPECT_TRUE(in.good()) << path;
    return json::parse(in);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Shared scratch directory with a generated dataset and trained model.
struct CliFixture {
    std::string dir;
    std::string data;
    std::string model;
};

const CliFixture& fixture() {
    static const CliFixture fx = [] {
        CliFixture f;
        f.dir = (std::filesystem::temp_directory_path() / "netcond_cli_tests").string();
        std::filesystem::create_directories(f.dir);
        f.data = f.dir + "/blobs.csv";
        f.model = f.dir + "/mlp.json";
        RunResult gen = run_cli("gen-data --kind blobs --per-class 80 --classes 3 --dim 4 "
                                "--spread 0.8 --seed 42 --test-fraction 0.25 --out " + f.data);
        EXPECT_EQ(gen.exit_code, 0) << gen.output;
        RunResult train = run_cli("train-fixture --data " + f.data +
                                  " --out " + f.model +
                                  " --widths 4,16,3 --activation relu --epochs 120 --lr 0.05 "
                                  "--seed 7");
        EXPECT_EQ(train.exit_code, 0) << train.output;
        return f;
    }();
    return fx;
}

std::string scratch(const std::string& name) { return fixture().dir + "/" + name; }

} // namespace

TEST(CliAnalyze, DiagonalNormsGiveProductAndCumulative) {
    // Three dense layers with norms 2, 3, 5: product 30, suffix sum 50.
    const std::string model = scratch("diag235.json");
    Network net(Shape{1}, {Layer::dense(Tensor::matrix(1, 1, {2.0})),
                           Layer::dense(Tensor::matrix(1, 1, {3.0})),
                           Layer::dense(Tensor::matrix(1, 1, {5.0}))});
    save_model(net, model);

    const std::string out = scratch("analyze235.json");
    const RunResult res = run_cli("analyze --model " + model + " --out " + out);
    ASSERT_EQ(res.exit_code, 0) << res.output;

    const json report = load_json(out);
    EXPECT_NEAR(report["product_bound"]["value"].get<double>(), 30.0, 1e-9);
    EXPECT_NEAR(report["cumulative_bound"]["value"].get<double>(), 50.0, 1e-9);
    ASSERT_EQ(report["layer_bounds"].size(), 3u);
    EXPECT_TRUE(report["product_bound"]["converged"].get<bool>());
    // Table written alongside.
    EXPECT_FALSE(read_file(scratch("analyze235.tsv")).empty());
}

TEST(CliAnalyze, SingleLayerBothBoundsEqualNorm) {
    const std::string model = scratch("single.json");
    save_model(Network(Shape{2}, {Layer::dense(Tensor::matrix(2, 2, {3.0, 0.0, 0.0, 4.0}))}),
               model);
    const std::string out = scratch("analyze_single.json");
    const RunResult res = run_cli("analyze --model " + model + " --out " + out);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const json report = load_json(out);
    EXPECT_NEAR(report["product_bound"]["value"].get<double>(), 4.0, 1e-9);
    EXPECT_NEAR(report["cumulative_bound"]["value"].get<double>(), 4.0, 1e-9);
}

TEST(CliAnalyze, MissingModelIsUsageError) {
    const RunResult res = run_cli("analyze --model /no/such/model.json");
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_NE(res.output.find("/no/such/model.json"), std::string::npos);
}

TEST(CliAttack, FixtureSuccessRateHigh) {
    const std::string out = scratch("attack.json");
    const RunResult res = run_cli("attack --model " + fixture().model + " --data " +
                                  fixture().data + " --split test --workers 4 --out " + out);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const json report = load_json(out);
    EXPECT_GE(report["summary"]["success_rate"].get<double>(), 0.99);
    EXPECT_GT(report["records"].size(), 0u);
}

TEST(CliAttack, MaxIterOneStillExitsZero) {
    const std::string out = scratch("attack_iter1.json");
    const RunResult res = run_cli("attack --model " + fixture().model + " --data " +
                                  fixture().data + " --split test --max-iter 1 --out " + out);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const json report = load_json(out);
    EXPECT_GT(report["records"].size(), 0u); // rows present even when success=false
}

TEST(CliKappa, IdentityModelGivesUnitKappa) {
    const std::string model = scratch("identity.json");
    save_model(Network(Shape{4}, {Layer::dense(Tensor::identity(4))}), model);
    const std::string out = scratch("kappa_identity.json");
    const RunResult res =
        run_cli("kappa --model " + model + " --data " + fixture().data +
                " --source random --trials 3 --seed 9 --out " + out);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const json report = load_json(out);
    for (const json& rec : report["records"])
        ASSERT_NEAR(rec["kappa"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(report["precision"]["mean"]["minimum_digits"].get<double>(), 0.0, 1e-12);
    EXPECT_EQ(report["precision"]["mean"]["minimum_bits"].get<int>(), 1);
}

TEST(CliKappa, RandomKappaBelowDeepfoolKappa) {
    const std::string out_df = scratch("kappa_df.json");
    const std::string out_rand = scratch("kappa_rand.json");
    const RunResult df = run_cli("kappa --model " + fixture().model + " --data " +
                                 fixture().data + " --split test --source deepfool --workers 4 "
                                 "--out " + out_df);
    ASSERT_EQ(df.exit_code, 0) << df.output;
    const RunResult rand = run_cli("kappa --model " + fixture().model + " --data " +
                                   fixture().data + " --split test --source random --trials 10 "
                                   "--seed 5 --workers 4 --out " + out_rand);
    ASSERT_EQ(rand.exit_code, 0) << rand.output;

    const double mean_df = load_json(out_df)["precision"]["mean"]["kappa"].get<double>();
    const double mean_rand = load_json(out_rand)["precision"]["mean"]["kappa"].get<double>();
    EXPECT_LT(mean_rand, mean_df);
}

TEST(CliKappa, FileSourceReplaysBitExactly) {
    const std::string attack_out = scratch("attack_replay.json");
    const RunResult attack = run_cli("attack --model " + fixture().model + " --data " +
                                     fixture().data + " --split test --out " + attack_out);
    ASSERT_EQ(attack.exit_code, 0) << attack.output;

    const std::string df_out = scratch("kappa_df_direct.json");
    const RunResult df = run_cli("kappa --model " + fixture().model + " --data " +
                                 fixture().data + " --split test --source deepfool --out " + df_out);
    ASSERT_EQ(df.exit_code, 0) << df.output;

    const std::string replay_out = scratch("kappa_replay.json");
    const RunResult replay = run_cli("kappa --model " + fixture().model + " --data " +
                                     fixture().data + " --split test --source file "
                                     "--perturb-file " + attack_out + " --out " + replay_out);
    ASSERT_EQ(replay.exit_code, 0) << replay.output;

    const json direct = load_json(df_out);
    const json replayed = load_json(replay_out);
    ASSERT_EQ(direct["records"].size(), replayed["records"].size());
    for (std::size_t i = 0; i < direct["records"].size(); ++i)
        ASSERT_EQ(direct["records"][i]["kappa"].get<double>(),
                  replayed["records"][i]["kappa"].get<double>());
}

TEST(CliKappa, WorkerCountDoesNotChangeReports) {
    const std::string out1 = scratch("kappa_w1.json");
    const std::string out8 = scratch("kappa_w8.json");
    const std::string flags = "kappa --model " + fixture().model + " --data " + fixture().data +
                              " --split test --source random --trials 5 --seed 31 ";
    ASSERT_EQ(run_cli(flags + "--workers 1 --out " + out1).exit_code, 0);
    ASSERT_EQ(run_cli(flags + "--workers 8 --out " + out8).exit_code, 0);

    json a = load_json(out1), b = load_json(out8);
    a["meta"].erase("timestamp");
    b["meta"].erase("timestamp");
    a["meta"].erase("command");
    b["meta"].erase("command"); // differs by the --workers flag itself
    EXPECT_EQ(a.dump(), b.dump());
    // Tables carry no timestamp: byte-identical.
    EXPECT_EQ(read_file(scratch("kappa_w1.tsv")), read_file(scratch("kappa_w8.tsv")));
}

TEST(CliQuantizeSweep, EmitsRowsAndHoldsChainBound) {
    const std::string out = scratch("sweep.json");
    const RunResult res = run_cli("quantize-sweep --model " + fixture().model + " --data " +
                                  fixture().data + " --bits 2,4,6,8 --workers 4 --out " + out);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const json report = load_json(out);
    ASSERT_EQ(report["rows"].size(), 4u);
    for (const json& row : report["rows"])
        EXPECT_EQ(row["chain_bound_violations"].get<std::size_t>(), 0u);
    EXPECT_GT(report["params"]["kappa_tilde"].get<double>(), 0.0);
}

TEST(CliGeneral, UnknownFlagIsUsageError) {
    const RunResult res = run_cli("analyze --nonsense foo");
    EXPECT_EQ(res.exit_code, 2);
}

TEST(CliGeneral, HelpExitsZero) {
    EXPECT_EQ(run_cli("--help").exit_code, 0);
    EXPECT_EQ(run_cli("kappa --help").exit_code, 0);
}
