#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fewsub/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(FEWSUB_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string data(const std::string& rel) { return std::string(FEWSUB_DATA_DIR) + "/" + rel; }

std::string pair(const std::string& templ, const std::string& inst) {
    return "--template " + data("templates/" + templ + ".json") + " --instance " + data("instances/" + inst + ".json");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("fewsub_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SolveExitCodes) {
    auto sat = run("solve " + pair("z2_parity", "z2_chain_sat"));
    EXPECT_EQ(sat.status, 0);
    EXPECT_NE(sat.out.find("decision SAT"), std::string::npos);
    EXPECT_NE(sat.out.find("witness x=0 y=1 z=0"), std::string::npos);
    auto unsat = run("solve " + pair("z2_parity", "z2_odd_triangle"));
    EXPECT_EQ(unsat.status, 1);
    EXPECT_NE(unsat.out.find("decision UNSAT"), std::string::npos);
    EXPECT_EQ(run("solve " + pair("z2_linear3", "z2_affine_unsat")).status, 1);
    EXPECT_EQ(run("solve " + pair("twosat", "twosat_chain")).status, 0);
}

TEST_F(Cli, UsageAndInputErrors) {
    EXPECT_EQ(run("").status, 2);
    EXPECT_EQ(run("frobnicate").status, 2);
    EXPECT_EQ(run("solve --template " + data("templates/z2_parity.json")).status, 2);
    EXPECT_EQ(run("solve --template /no/such.json --instance /no/such.json").status, 2);
    EXPECT_EQ(run("solve " + pair("z2_parity", "z2_chain_sat") + " --term-depth 0").status, 2);
    // Template without an edge term.
    EXPECT_EQ(run("solve " + pair("one_in_three", "one_in_three_small")).status, 2);
    // Relation unknown to the template.
    EXPECT_EQ(run("solve " + pair("horn3", "one_in_three_small")).status, 2);
}

TEST_F(Cli, ResourceCap) {
    EXPECT_EQ(run("solve " + pair("twosat", "twosat_chain") + " --iteration-cap 1").status, 3);
}

TEST_F(Cli, JsonIsDeterministicAndParses) {
    auto args = "solve " + pair("z3_linear", "z3_cycle_sat") + " --json --trace";
    auto a = run(args);
    auto b = run(args);
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    auto j = fewsub::io::parse_text(a.out);
    EXPECT_EQ(j.at("decision"), "SAT");
    for (auto key : {"witness", "trace", "statistics", "config"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(Cli, Stages) {
    EXPECT_EQ(run("pc23 " + pair("z2_parity", "z2_odd_triangle")).status, 1);
    EXPECT_EQ(run("pc23 " + pair("z2_parity", "z2_chain_sat")).status, 0);
    EXPECT_EQ(run("pc23 " + pair("z2_linear3", "z2_affine_unsat")).status, 0);
    auto aff = run("affine " + pair("z2_linear3", "z2_affine_unsat") + " --json");
    EXPECT_EQ(aff.status, 1);
    EXPECT_EQ(fewsub::io::parse_text(aff.out).at("result"), "contradiction");
    EXPECT_EQ(run("slac " + pair("twosat", "twosat_unsat")).status, 1);
    EXPECT_EQ(run("lac " + pair("twosat", "twosat_chain")).status, 0);
    EXPECT_EQ(run("oracle " + pair("z3_linear", "z3_cycle_unsat")).status, 1);
}

TEST_F(Cli, PolysearchAndAbsorb) {
    auto m = run("polysearch --template " + data("templates/z2_parity.json") + " --kind maltsev --json");
    EXPECT_EQ(m.status, 0);
    EXPECT_EQ(fewsub::io::parse_text(m.out).at("operation").at("table"),
              fewsub::io::json({0, 1, 1, 0, 1, 0, 0, 1}));
    EXPECT_EQ(run("polysearch --template " + data("templates/one_in_three.json") + " --kind maltsev").status, 1);
    EXPECT_EQ(run("polysearch --template " + data("templates/twosat.json") + " --kind majority").status, 0);
    EXPECT_EQ(run("polysearch --template " + data("templates/twosat.json") + " --kind bogus").status, 2);

    auto ab = run("absorb --algebra " + data("algebras/majority2.json") + " --json");
    EXPECT_EQ(ab.status, 0);
    EXPECT_EQ(fewsub::io::parse_text(ab.out).at("subuniverse"), fewsub::io::json({0}));
    EXPECT_EQ(run("absorb --algebra " + data("algebras/z3_maltsev.json")).status, 1);
    EXPECT_EQ(run("absorb --algebra " + data("algebras/chain3.json") + " --within 1,2").status, 0);
    EXPECT_EQ(run("absorb --algebra " + data("algebras/chain3.json") + " --within 1,7").status, 2);
}

TEST_F(Cli, GenIsDeterministic) {
    auto a = dir_ / "a";
    auto b = dir_ / "b";
    auto base = std::string("gen --kind linear_mod_p --p 2 --vars 5 --eqs 6 --seed 1 -o ");
    EXPECT_EQ(run(base + a.string()).status, 0);
    EXPECT_EQ(run(base + b.string()).status, 0);
    for (auto f : {"template.json", "instance.json", "system.txt"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    auto s1 = run("gen --kind twosat --vars 4 --eqs 6 --seed 7");
    auto s2 = run("gen --kind twosat --vars 4 --eqs 6 --seed 7");
    EXPECT_EQ(s1.out, s2.out);
    EXPECT_EQ(run("gen --kind nonsense").status, 2);

    auto solved = run("solve --template " + (a / "template.json").string() + " --instance " +
                      (a / "instance.json").string());
    auto oracle = run("oracle --template " + (a / "template.json").string() + " --instance " +
                      (a / "instance.json").string());
    EXPECT_EQ(solved.status, oracle.status);
}

TEST_F(Cli, VerifyReplaysReports) {
    auto report = dir_ / "report.json";
    auto args = pair("z2_parity", "z2_parity_sat");
    EXPECT_EQ(run("solve " + args + " --json --trace -o " + report.string()).status, 0);
    EXPECT_EQ(run("verify " + args + " --report " + report.string()).status, 0);

    auto j = fewsub::io::parse_text(slurp(report));
    j["trace"][1] = "something else";
    auto tampered = dir_ / "tampered.json";
    fewsub::io::save_file(tampered.string(), j);
    auto v = run("verify " + args + " --report " + tampered.string());
    EXPECT_EQ(v.status, 1);
    EXPECT_NE(v.out.find("trace line 2"), std::string::npos);
}
