#include "qcd/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qcd;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = cli::run(args, out, err).exit_code;
    return {code, out.str(), err.str()};
}

} // namespace

TEST(Cli, PrimesInClass)
{
    auto r = run({"primes", "--limit", "100", "--mod", "4", "--classes", "1"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "x,mod,class,count\n100,4,1,11\n");
}

TEST(Cli, PrimesAllClasses)
{
    auto r = run({"primes", "--limit", "30", "--mod", "4"});
    EXPECT_EQ(r.out, "x,mod,class,count\n30,4,0,0\n30,4,1,4\n30,4,2,1\n30,4,3,5\n");
    auto plain = run({"primes", "--limit", "100"});
    EXPECT_EQ(plain.out, "x,mod,class,count\n100,1,0,25\n");
}

TEST(Cli, CountWithClasses)
{
    auto r = run({"count", "--x", "50", "--k", "2", "--mod", "4", "--classes", "1,3", "--mode", "squarefree"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "x,k,D,constraint,mode,count\n50,2,,\"m=1,3 mod 4\",squarefree,3\n");
}

TEST(Cli, CountWithSigns)
{
    auto r = run({"count", "--x", "50", "--k", "2", "--disc", "5", "--eps", "--"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "x,k,D,constraint,mode,count\n50,2,5,eps=--,squarefree,7\n");
}

TEST(Cli, CountUnconstrainedMultiset)
{
    auto r = run({"count", "--x", "30", "--k", "2", "--mode", "multiset"});
    EXPECT_EQ(r.out, "x,k,D,constraint,mode,count\n30,2,,none,multiset,10\n");
}

TEST(Cli, ResiduesText)
{
    auto r = run({"residues", "--disc", "5", "--eps", "+"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1\n9\n11\n19\nQ=20 size=4\n");
    auto c = run({"residues", "--disc", "5", "--eps", "+", "--method", "constructive"});
    EXPECT_EQ(c.out, r.out);
}

TEST(Cli, Solve)
{
    auto r = run({"solve", "--b", "0", "--c", "-5", "--n", "209"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "b,c,D,n,roots,formula,exactly_2k\n0,-5,20,209,4,4,true\n");
    auto outside = run({"solve", "--b", "0", "--c", "-5", "--n", "10"});
    EXPECT_EQ(outside.out, "b,c,D,n,roots,formula,exactly_2k\n0,-5,20,10,1,,\n");
}

TEST(Cli, TableCsv)
{
    auto r = run({"table", "--x", "50", "--k", "2", "--disc", "5"});
    EXPECT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x,k,D,constraint,count,reference,empirical,predicted,asymptotic");
    std::getline(is, line);
    EXPECT_EQ(line.rfind("50,2,5,eps=++,0,13,0,0.25,", 0), 0u) << line;
}

TEST(Cli, TableBudgetGivesPartialOutputAndExitOne)
{
    auto r = run({"table", "--x", "100,1000", "--k", "2", "--disc", "5", "--budget-seconds", "0"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST(Cli, VerifyAll)
{
    auto r = run({"verify", "--suite", "all", "--x", "2000"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out.find("fail"), std::string::npos) << r.out;
    auto one = run({"verify", "--suite", "orthogonality"});
    EXPECT_EQ(one.code, 0);
    EXPECT_NE(one.out.find("orthogonality,pass"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"count", "--x", "50", "--k", "2", "--mod", "4", "--classes", "1,3", "--disc", "5", "--eps", "++"})
                  .code,
              2);
    EXPECT_EQ(run({"count", "--x", "50", "--k", "3", "--mod", "4", "--classes", "1,3"}).code, 2);
    EXPECT_EQ(run({"count", "--x", "50", "--k", "2", "--mod", "4", "--classes", "2,3"}).code, 2);
    EXPECT_EQ(run({"count", "--x", "abc"}).code, 2);
    EXPECT_EQ(run({"residues", "--disc", "16"}).code, 2);
    EXPECT_EQ(run({"count", "--x", "50", "--mode", "weird"}).code, 2);
    EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
    EXPECT_EQ(run({"solve", "--n", "2000000"}).code, 2);
}

TEST(Cli, JsonRoundTripsForEverySubcommand)
{
    const std::vector<std::vector<std::string>> cmds = {
        {"primes", "--limit", "100", "--mod", "4", "--format", "json"},
        {"count", "--x", "50", "--k", "2", "--mod", "4", "--classes", "1,3", "--format", "json"},
        {"table", "--x", "50,100", "--k", "2", "--disc", "5", "--format", "json"},
        {"residues", "--disc", "-20", "--eps", "-", "--format", "json"},
        {"solve", "--b", "1", "--c", "1", "--n", "91", "--format", "json"},
        {"verify", "--suite", "quadratic", "--format", "json"},
    };
    for (const auto& c : cmds) {
        auto r = run(c);
        ASSERT_EQ(r.code, 0) << c[0] << ": " << r.err;
        auto j = nlohmann::ordered_json::parse(r.out);
        EXPECT_EQ(j.dump(2) + "\n", r.out) << c[0];
    }
}

TEST(Cli, DeterministicAcrossThreadCounts)
{
    auto a = run({"table", "--x", "1000,100000", "--k", "2", "--disc", "-3", "--threads", "1"});
    auto b = run({"table", "--x", "1000,100000", "--k", "2", "--disc", "-3", "--threads", "4"});
    EXPECT_EQ(a.out, b.out);
    auto c = run({"count", "--x", "1000000", "--k", "3", "--threads", "3"});
    auto d = run({"count", "--x", "1000000", "--k", "3"});
    EXPECT_EQ(c.out, d.out);
}

TEST(Cli, OutFile)
{
    const auto path = (std::filesystem::temp_directory_path() / "qcd_cli_out.csv").string();
    auto r = run({"residues", "--disc", "-1", "--out", path});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(ss.str(), "1\nQ=4 size=1\n");
    std::filesystem::remove(path);
}

TEST(Cli, SpfCacheIsWrittenAndReused)
{
    const auto path = (std::filesystem::temp_directory_path() / "qcd_cli_spf.bin").string();
    std::filesystem::remove(path);
    ::setenv(cli::spf_cache_env, path.c_str(), 1);
    auto first = run({"primes", "--limit", "1000"});
    EXPECT_TRUE(std::filesystem::exists(path));
    auto second = run({"primes", "--limit", "500"});
    EXPECT_EQ(second.out, "x,mod,class,count\n500,1,0,95\n");
    EXPECT_EQ(std::filesystem::file_size(path), 12u + 4u * 1001u); // reused, not rebuilt smaller

    {
        std::ofstream bad(path, std::ios::binary | std::ios::trunc);
        bad << "junk";
    }
    auto third = run({"primes", "--limit", "100"});
    EXPECT_EQ(third.code, 0);
    EXPECT_NE(third.err.find("ignoring SPF cache"), std::string::npos);
    EXPECT_EQ(third.out, "x,mod,class,count\n100,1,0,25\n");
    ::unsetenv(cli::spf_cache_env);
    std::filesystem::remove(path);
}
