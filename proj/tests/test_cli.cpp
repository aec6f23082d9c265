#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + CAMAB_CLI_PATH + std::string(" ") + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("camab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, ListShowsTenScenarios) {
    const auto r = cli("list --json");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 10u);
    EXPECT_EQ(j[9]["id"], "advertising");
    EXPECT_EQ(j[9]["horizon"], 1000);
    const auto text = cli("list");
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("advertising"), std::string::npos);
    EXPECT_NE(text.out.find("1000 x 20"), std::string::npos);
}

TEST(Cli, AuditExportedFiles) {
    const auto dir = scratch("audit");
    ASSERT_EQ(cli("export --builtin counterexample1 --out " + dir.string()).code, 0);
    const auto d = dir / "counterexample1";
    const auto r = cli("audit --json " + (d / "base.json").string() + " " + (d / "abstract.json").string() + " " +
                       (d / "alpha.json").string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LE(j["ic_error"].get<double>(), 1e-12);
    EXPECT_EQ(j["lemma1"], true);
    EXPECT_EQ(j["algebraic_condition"], true);
    fs::remove_all(dir);
}

TEST(Cli, AuditInexactChainWithJsd) {
    const auto r = cli("audit --builtin scenario3 --metric jsd");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("ic_error            0.229"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("NonZeroICError"), std::string::npos);
    EXPECT_NE(r.out.find("K=1"), std::string::npos);
}

TEST(Cli, MalformedCptNamesTheColumn) {
    const auto dir = scratch("malformed");
    ASSERT_EQ(cli("export --builtin counterexample1 --out " + dir.string()).code, 0);
    const auto d = dir / "counterexample1";
    auto j = nlohmann::json::parse(slurp(d / "base.json"));
    j["mechanisms"][1]["cpt"][1][1] = 0.1;
    std::ofstream(d / "base.json") << j.dump();
    const auto r = cli("audit " + (d / "base.json").string() + " " + (d / "abstract.json").string() + " " +
                       (d / "alpha.json").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("NonStochasticColumn"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("column 1"), std::string::npos) << r.out;
    fs::remove_all(dir);
}

TEST(Cli, RunScenarioSixWritesThreeCurveSets) {
    const auto dir = scratch("run6");
    const auto r = cli("run --scenario 6 --alg all --repeats 20 --seed 7 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto agg = slurp(dir / "6_aggregate.csv");
    for (const char* a : {"6,ucb,500,", "6,texp,500,", "6,rtrans,500,"}) EXPECT_NE(agg.find(a), std::string::npos) << a;
    fs::remove_all(dir);
}

TEST(Cli, RunScenarioOnePrintsNStepsGrid) {
    const auto dir = scratch("run1");
    const auto r = cli("run --scenario 1 --repeats 2 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("n_steps"), std::string::npos);
    for (const char* n : {" 10", " 25", " 50", " 100", " 250", " 500"}) EXPECT_NE(r.out.find(n), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(cli("run --scenario 3 --repeats 0").code, 2);
    EXPECT_EQ(cli("run --scenario 42").code, 2);
    EXPECT_EQ(cli("run --scenario 3 --alg bucb").code, 2);
    EXPECT_EQ(cli("run --scenario 3 --delta 1.5").code, 2);
    EXPECT_EQ(cli("run").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("audit --builtin counterexample1 --metric kl").code, 2);
}

TEST(Cli, RuntimeErrorsExitThree) {
    EXPECT_EQ(cli("run --scenario 3 --repeats 1 --T 5 --out /proc/camab_nope").code, 3);
}

TEST(Cli, RerunsAreByteIdentical) {
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    ASSERT_EQ(cli("run --scenario task2 --repeats 3 --seed 4 --out " + a.string()).code, 0);
    ASSERT_EQ(cli("run --scenario task2 --repeats 3 --seed 4 --threads 1 --out " + b.string()).code, 0);
    EXPECT_EQ(slurp(a / "task2_raw.csv"), slurp(b / "task2_raw.csv"));
    EXPECT_EQ(slurp(a / "task2_aggregate.csv"), slurp(b / "task2_aggregate.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, OutDirEnvironmentOverride) {
    const auto dir = scratch("envout"), other = scratch("envout_flag");
    const auto r = cli("run --scenario 4 --repeats 1 --T 20 --out " + other.string(), "CAMAB_OUT_DIR=" + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(dir / "4_raw.csv"));
    EXPECT_FALSE(fs::exists(other / "4_raw.csv"));
    fs::remove_all(dir);
    fs::remove_all(other);
}

TEST(Cli, RunFromModelFiles) {
    const auto dir = scratch("modelrun");
    ASSERT_EQ(cli("export --scenario 7 --out " + dir.string()).code, 0);
    const auto d = dir / "7";
    const auto r = cli("run --model " + (d / "base.json").string() + " " + (d / "abstract.json").string() + " " +
                       (d / "alpha.json").string() + " --alg ucb,texp --T 30 --repeats 2 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("warning"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "custom_aggregate.csv"));
    fs::remove_all(dir);
}
