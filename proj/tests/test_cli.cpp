#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace sumrange;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "sumrange");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("sumrange_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, HelpAndMissingCommand)
{
    const Result help = run({"--help"});
    EXPECT_EQ(help.code, cli::kExitOk);
    EXPECT_NE(help.out.find("verify"), std::string::npos);
    EXPECT_EQ(run({"trace", "--help"}).code, cli::kExitOk);
    EXPECT_EQ(run({}).code, cli::kExitConfig);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitConfig);
    EXPECT_EQ(run({"build", "--levels", "x"}).code, cli::kExitConfig);
    EXPECT_EQ(run({"build", "--levels", "0"}).code, cli::kExitConfig);
}

TEST_F(Cli, BuildIsByteStable)
{
    ASSERT_EQ(run({"build", "--flavor", "three-kadets", "--levels", "3", "--out", path("a.fam")}).code, 0);
    ASSERT_EQ(run({"build", "--flavor", "three-kadets", "--levels", "3", "--out", path("b.fam")}).code, 0);
    EXPECT_EQ(slurp(path("a.fam")), slurp(path("b.fam")));
    const Result to_stdout = run({"build", "--flavor", "three-kadets", "--levels", "3"});
    EXPECT_EQ(to_stdout.out, slurp(path("a.fam")));
}

TEST_F(Cli, TermCounts)
{
    const Result k1 = run({"build", "--flavor", "kadets", "--levels", "1"});
    EXPECT_NE(k1.out.find("\nterms 3\n"), std::string::npos);
    const Result t4 = run({"build", "--flavor", "three-kadets", "--levels", "4"});
    std::int64_t expected = 0;
    for (std::int64_t n = 1; n <= 4; ++n) expected += n + n * (n + 1) + n * (n + 1) * (n + 1) * (n + 2);
    EXPECT_NE(t4.out.find("\nterms " + std::to_string(expected) + "\n"), std::string::npos);
    const Result m = run({"build", "--flavor", "multi", "--r", "4", "--levels", "2"});
    EXPECT_NE(m.out.find("\ncubes 5\n"), std::string::npos);
}

TEST_F(Cli, VerifyBuiltAndCorrupted)
{
    ASSERT_EQ(run({"build", "--flavor", "kadets", "--levels", "3", "--out", path("k.fam")}).code, 0);
    const Result ok = run({"verify", "--family", path("k.fam"), "--out", path("report.csv")});
    EXPECT_EQ(ok.code, cli::kExitOk);
    EXPECT_NE(ok.out.find("all axioms hold"), std::string::npos);
    EXPECT_EQ(slurp(path("report.csv")).rfind("axiom,", 0), 0u);

    std::string text = slurp(path("k.fam"));
    const auto line = text.find("b.2.1.2\t");
    ASSERT_NE(line, std::string::npos);
    const auto value = text.find("\"value\":\"-1/1\"", line);
    text.replace(value, 14, "\"value\":\"-1/2\"");
    spit(path("bad.fam"), text);
    const Result bad = run({"verify", "--family", path("bad.fam")});
    EXPECT_EQ(bad.code, cli::kExitFailure);
    EXPECT_NE(bad.out.find("q-product"), std::string::npos);
    EXPECT_NE(bad.out.find("b.2.1.2"), std::string::npos);

    spit(path("short.fam"), text.substr(0, text.size() / 3));
    EXPECT_EQ(run({"verify", "--family", path("short.fam")}).code, cli::kExitParse);
    EXPECT_EQ(run({"verify", "--family", path("missing.fam")}).code, cli::kExitConfig);
}

TEST_F(Cli, TraceOutputs)
{
    const Result sigma = run({"trace", "--flavor", "kadets", "--levels", "3", "--schedule", "sigma", "--out", path("s.csv")});
    EXPECT_EQ(sigma.code, 0);
    EXPECT_NE(sigma.out.find("max block deviation 0/1"), std::string::npos);
    EXPECT_NE(sigma.out.find("box-count peak"), std::string::npos);
    const Result again = run({"trace", "--flavor", "kadets", "--levels", "3", "--schedule", "sigma"});
    EXPECT_EQ(again.out, slurp(path("s.csv")));
    EXPECT_NE(again.err.find("verdict convergent"), std::string::npos);

    const Result div = run({"trace", "--flavor", "three-kadets", "--levels", "2", "--schedule", "divergent", "--target",
                            "0,1,1"});
    EXPECT_EQ(div.code, 0);
    EXPECT_NE(div.out.find(",Q2,1,2,"), std::string::npos);

    EXPECT_EQ(run({"trace", "--flavor", "kadets", "--levels", "2", "--schedule", "p10"}).code, cli::kExitConfig);
    EXPECT_EQ(run({"trace", "--flavor", "kadets", "--levels", "2", "--schedule", "sigma", "--target", "0,0"}).code,
              cli::kExitConfig);
    EXPECT_EQ(run({"trace", "--flavor", "kadets", "--levels", "2"}).code, cli::kExitConfig);
}

TEST_F(Cli, ShuffleTraceIsSeeded)
{
    const std::vector<std::string> args{"trace", "--flavor", "kadets", "--levels", "3", "--schedule", "shuffle"};
    auto with_seed = [&](const std::string& seed) {
        std::vector<std::string> a = args;
        a.push_back("--seed");
        a.push_back(seed);
        return run(a).out;
    };
    EXPECT_EQ(with_seed("4"), with_seed("4"));
    EXPECT_NE(with_seed("4"), with_seed("5"));
}

TEST_F(Cli, ConfigFileAndOverrides)
{
    spit(path("run.cfg"), "# family for trace\ncommand = build\nflavor = three-kadets\nlevels = 2\n");
    const Result from_config = run({"build", "--config", path("run.cfg")});
    EXPECT_EQ(from_config.code, 0);
    EXPECT_NE(from_config.out.find("flavor three-kadets\ndepth 2\n"), std::string::npos);

    const Result overridden = run({"build", "--config", path("run.cfg"), "--levels", "1"});
    EXPECT_EQ(overridden.code, 0);
    EXPECT_NE(overridden.out.find("flavor three-kadets\ndepth 1\n"), std::string::npos);

    EXPECT_EQ(run({"verify", "--config", path("run.cfg")}).code, cli::kExitConfig);

    spit(path("bad.cfg"), "flavour = kadets\n");
    EXPECT_EQ(run({"build", "--config", path("bad.cfg")}).code, cli::kExitConfig);
    spit(path("junk.cfg"), "levels 3\n");
    EXPECT_EQ(run({"build", "--config", path("junk.cfg")}).code, cli::kExitConfig);
    EXPECT_EQ(run({"build", "--config", path("none.cfg")}).code, cli::kExitConfig);
}

TEST_F(Cli, LemmaSuites)
{
    const Result l0 = run({"lemmas", "--suite", "l0", "--cases", "20", "--out", path("l0.csv")});
    EXPECT_EQ(l0.code, 0);
    const Result l0_again = run({"lemmas", "--suite", "l0", "--cases", "20", "--out", path("l0b.csv")});
    EXPECT_EQ(slurp(path("l0.csv")), slurp(path("l0b.csv")));
    EXPECT_EQ(l0.out, l0_again.out);

    const Result drift = run({"lemmas", "--suite", "drift"});
    EXPECT_EQ(drift.code, 0);
    EXPECT_NE(drift.out.find("harmonic-32"), std::string::npos);
    EXPECT_NE(drift.out.find("drift_sum="), std::string::npos);

    EXPECT_EQ(run({"lemmas", "--suite", "l7"}).code, cli::kExitConfig);
}

TEST_F(Cli, Transform)
{
    const Result id = run({"transform", "--flavor", "three-kadets", "--levels", "3", "--matrix", "1 0;0 1"});
    EXPECT_EQ(id.code, 0) << id.err;
    EXPECT_NE(id.out.find("(2,2,2)"), std::string::npos);
    EXPECT_NE(id.out.find("3 distinct limit points of 3"), std::string::npos);

    spit(path("collapse.txt"), "0 0\n0 -1\n");
    const Result collapse = run({"transform", "--flavor", "three-kadets", "--levels", "3", "--matrix",
                                 path("collapse.txt"), "--out", path("t.fam")});
    EXPECT_EQ(collapse.code, 0) << collapse.err;
    EXPECT_NE(collapse.out.find("2 distinct limit points of 3"), std::string::npos);
    EXPECT_NE(slurp(path("t.fam")).find("flavor transformed"), std::string::npos);
    EXPECT_EQ(run({"verify", "--family", path("t.fam")}).code, cli::kExitConfig);

    EXPECT_EQ(run({"transform", "--flavor", "three-kadets", "--levels", "2", "--matrix", "1 0 0;0 1 0;0 0 1"}).code,
              cli::kExitConfig);
    EXPECT_EQ(run({"transform", "--flavor", "three-kadets", "--levels", "2"}).code, cli::kExitConfig);
}
