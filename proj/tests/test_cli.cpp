#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bvreduce/problem_io.hpp"

#ifndef BVREDUCE_CLI
#error "BVREDUCE_CLI must point at the command-line binary"
#endif

namespace {

const std::string kData = BVREDUCE_TEST_DATA;
const std::string kTmp = BVREDUCE_TEST_TMP;

int run(const std::string& args, const std::string& out = "/dev/null") {
  const std::string cmd = std::string(BVREDUCE_CLI) + " " + args + " > " + out + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("reduce") {
  const std::string out = kTmp + "/cubic_result.json";
  REQUIRE(run("reduce " + kData + "/cubic.json -o " + out) == 0);
  bvreduce::JacClass c = bvreduce::parse_result(slurp(out));
  CHECK(c.dense() == std::vector<bvreduce::Scalar>{bvreduce::Scalar::fraction(-1, 3), bvreduce::Scalar(0)});

  const std::string log = kTmp + "/quartic.log";
  CHECK(run("reduce " + kData + "/quartic_failure.json", log) == 2);
  CHECK(slurp(log).find("weight 4") != std::string::npos);

  CHECK(run("reduce " + kData + "/malformed.json") == 3);
  CHECK(run("reduce " + kData + "/no_such_file.json") == 3);
  CHECK(run("reduce " + kData + "/zero_diagonal.json") == 2);
  CHECK(run("frobnicate") == 3);
}

TEST_CASE("wick and basis") {
  const std::string out = kTmp + "/wick.txt";
  REQUIRE(run("wick " + kData + "/gaussian_x4.json", out) == 0);
  CHECK(slurp(out).find("\"re\": [\n      3,\n      1\n    ]") != std::string::npos);
  CHECK(run("wick " + kData + "/cubic.json") == 3);
  REQUIRE(run("basis --n 2 --d 3", out) == 0);
  CHECK(slurp(out) == "[[0,0],[0,1],[1,0],[1,1]]\n");
}

TEST_CASE("hbar") {
  const std::string out = kTmp + "/hbar.json";
  REQUIRE(run("hbar " + kData + "/hbar_cubic.json -K 2 -o " + out) == 0);
  auto j = nlohmann::json::parse(slurp(out));
  REQUIRE(j["series"].size() == 3);
  CHECK(bvreduce::scalar_from_json(j["series"][0]).is_zero());
  CHECK(bvreduce::scalar_from_json(j["series"][1]) == bvreduce::Scalar::fraction(1, 2));
  CHECK(run("hbar " + kData + "/cubic.json") == 3);
}

TEST_CASE("verify") {
  CHECK(run("verify --n 2 --d 3 --trials 100 --seed 42") == 0);
  const std::string log = kTmp + "/flip.log";
  CHECK(run("verify --n 2 --d 3 --trials 5 --seed 42 --flip-homotopy-sign", log) == 4);
  CHECK(slurp(log).find("tau~(d_BV v) = 0") != std::string::npos);
  const std::string zero = kTmp + "/zero.log";
  CHECK(run("verify --trials 0", zero) == 0);
  CHECK(slurp(zero).find("0 checks run") != std::string::npos);
  CHECK(run("verify --n 0") == 3);
}

TEST_CASE("oracle") {
  CHECK(run("oracle " + kData + "/cubic_x6.json --tol 1e-6") == 0);
  CHECK(run("oracle " + kData + "/cubic_x6.json --contour " + kData + "/bad_contour.json") == 2);
  CHECK(run("oracle " + kData + "/cubic_x6.json --contour " + kData + "/malformed.json") == 3);
  CHECK(run("oracle " + kData + "/cubic_x6.json --tol 1e-30") == 4);
}
