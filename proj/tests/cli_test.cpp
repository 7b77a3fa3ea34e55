#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alqe/structure_io.hpp"
#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "alqe");
  std::ostringstream out;
  std::ostringstream err;
  const int code = alqe::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(ALQE_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("alqe_cli_test_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

}  // namespace

TEST(Cli, QeVerify) {
  const auto r = run({"qe", "--q", "2", "--n", "1", "--formula", "sup y. (d(x,y)+d(y,0))", "--verify"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2 - |x|\nverify PASS (2 points)\n");
}

TEST(Cli, QePadsContext) {
  const auto r = run({"--format", "json", "qe", "--q", "3", "--n", "2", "--formula", "inf y. d(x, y + y)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"context\":[\"x\",\"x1\"]"), std::string::npos) << r.out;
  EXPECT_EQ(run({"qe", "--q", "2", "--n", "0", "--formula", "d(x,0)"}).code, 2);
  EXPECT_EQ(run({"qe", "--q", "4", "--n", "1", "--formula", "d(x,0)"}).code, 2);
}

TEST(Cli, OdagA13Counterexample) {
  const auto r = run({"odag", "check", "--axiom", "A13", "--trials", "1000", "--seed", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "A13 FAIL at (x = -1, y = 1): lhs 0, rhs 1\n");
  EXPECT_EQ(run({"odag", "check", "--axiom", "A8", "--trials", "50"}).code, 0);
  EXPECT_EQ(run({"odag", "check", "--axiom", "A99"}).code, 2);
}

TEST(Cli, OdagRewrite) {
  const auto r = run({"odag", "rewrite", "--formula", "|2*x + 4|"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "|x + 2|\n");
  EXPECT_EQ(run({"odag", "rewrite", "--formula", "|(x /\\ 1) \\/ (-x /\\ 2)|"}).code, 1);
}

TEST(Cli, EvalValidateCheck) {
  EXPECT_EQ(run({"eval", "--structure", data("f2.json"), "--formula", "sup x. d(x,0)"}).out, "1\n");
  EXPECT_EQ(run({"eval", "--structure", data("f2.json"), "--formula", "d(x,0)", "--assign", "x=1"}).out, "1\n");
  EXPECT_EQ(run({"eval", "--structure", data("f2.json"), "--formula", "d(x,0)"}).code, 2);
  EXPECT_EQ(run({"eval", "--structure", data("missing.json"), "--formula", "1"}).code, 2);
  EXPECT_EQ(run({"validate", "--structure", data("f2_half.json")}).out, "valid\n");
  EXPECT_EQ(run({"check", "--structure", data("f2.json"), "--condition", "sup x. d(x,0) <= 1"}).code, 0);
  EXPECT_EQ(run({"check", "--structure", data("f2.json"), "--condition", "sup x. d(x,0) <= 1/2"}).code, 1);
}

TEST(Cli, ValidateReportsViolation) {
  std::string text = alqe::dump_structure(alqe::prime_field_vector_space(2));
  const auto pos = text.find("\"metric\"");
  const auto one = text.find("\"1\"", pos);
  text.replace(one, 3, "\"3/2\"");
  const auto r = run({"validate", "--structure", temp_file("bad.json", text)});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("violation"), std::string::npos);
}

TEST(Cli, UltrameanAndCap) {
  const std::vector<std::string> args{"ultramean", "--member", data("f2.json"), "--weight", "1/2",
                                      "--member", data("f2_half.json"), "--weight", "1/2", "--sentence", "sup x. |x|"};
  const auto r = run(args);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("value in mean: 3/4"), std::string::npos);
  EXPECT_EQ(run({"ultramean", "--member", data("f2.json"), "--weight", "1/2"}).code, 2);
  setenv("ALQE_MAX_UNIVERSE", "3", 1);
  const auto capped = run(args);
  unsetenv("ALQE_MAX_UNIVERSE");
  EXPECT_EQ(capped.code, 2);
  EXPECT_NE(capped.err.find("ALQE_MAX_UNIVERSE"), std::string::npos);
}

TEST(Cli, Typespace) {
  const auto r = run({"typespace", "--structure", data("f2.json"), "--fragment", data("f2_pairs.frag"), "--n", "2",
                      "--extremes", "--separate", "qf"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("extreme points of the realized cloud (4)"), std::string::npos) << r.out;
  const auto frag = temp_file("const.frag", "1\n|x| @general\n");
  EXPECT_EQ(run({"typespace", "--structure", data("f2.json"), "--fragment", frag, "--n", "1", "--separate", "qf"}).code, 1);
  EXPECT_EQ(run({"typespace", "--structure", data("f2.json"), "--fragment", frag, "--n", "1", "--separate", "atomic"}).code, 2);
}

TEST(Cli, Riesz) {
  const auto r = run({"riesz", "expand", "--op", "meet", "--formulas", data("three_atoms.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 24), "d(x,0) + d(y,0) + d(x,y)");
  EXPECT_EQ(run({"riesz", "prob-check", "--k", "3", "--weights", "1/2,1/4,1/4"}).code, 0);
  EXPECT_EQ(run({"riesz", "prob-check", "--k", "2", "--literal"}).code, 1);
}

TEST(Cli, ScanPrimes) {
  const auto r = run({"scan-primes", "--sentence", "|1+1|", "--primes", "2,3,5,7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2\t0\n3\t1\n5\t1\n7\t1\n"), std::string::npos) << r.out;
  const auto residue = run({"scan-primes", "--sentence", "inf x. d(x*x, 1+1)", "--primes", "3,7"});
  EXPECT_NE(residue.out.find("3\t1\n7\t0\n"), std::string::npos) << residue.out;
  EXPECT_NE(run({"scan-primes", "--sentence", "1", "--max-prime", "13"}).out.find("constant from p = 2"),
            std::string::npos);
  EXPECT_EQ(run({"scan-primes", "--sentence", "1", "--primes", "9"}).code, 2);
  EXPECT_EQ(run({"scan-primes", "--sentence", "d(x,0)"}).code, 2);
}

TEST(Cli, DeterministicAndUsage) {
  const std::vector<std::string> args{"--format", "json", "odag", "check", "--axiom", "all", "--trials", "30", "--seed", "7"};
  const auto a = run(args);
  EXPECT_EQ(a.out, run(args).out);
  EXPECT_EQ(a.code, 1);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
