#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const fs::path kSource = STRATWAVE_SOURCE_DIR;
const std::string kCli = STRATWAVE_CLI;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stratwave_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Outcome {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const std::string& args, const fs::path& dir) {
  const auto o = dir / "stdout.txt", e = dir / "stderr.txt";
  const std::string cmd = "\"" + kCli + "\" " + args + " >\"" + o.string() + "\" 2>\"" +
                          e.string() + "\"";
  const int st = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

ordered_json load(const fs::path& p) {
  std::ifstream in(p);
  return ordered_json::parse(in);
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string scenario(const std::string& name) {
  return (kSource / "scenarios" / (name + ".json")).string();
}

}  // namespace

TEST(Cli, MalformedConfigExitsTwo) {
  const auto dir = scratch("malformed");
  write(dir / "broken.json", "{\"grid\": {");
  auto r = cli("run \"" + (dir / "broken.json").string() + "\"", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("parse error"), std::string::npos) << r.err;

  write(dir / "typo.json", R"({"grid": {"L": 1, "p0": -1, "Nq": 16, "Np": 17}, "Q": 20, "amplitud": 0})");
  r = cli("run \"" + (dir / "typo.json").string() + "\"", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("amplitud"), std::string::npos) << r.err;

  write(dir / "grid.json", R"({"grid": {"L": 1, "p0": -1, "Nq": 7, "Np": 17}, "Q": 20})");
  r = cli("solve \"" + (dir / "grid.json").string() + "\"", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Nq"), std::string::npos) << r.err;

  write(dir / "unstable.json",
        R"({"grid": {"L": 1, "p0": -1, "Nq": 16, "Np": 17}, "Q": 20,
            "rho": {"kind": "poly", "values": [1.0, 0.1]}})");
  r = cli("solve \"" + (dir / "unstable.json").string() + "\"", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unstable"), std::string::npos) << r.err;

  EXPECT_EQ(cli("frobnicate", dir).code, 2);
}

TEST(Cli, StillWater) {
  const auto dir = scratch("still");
  const auto r = cli("run " + scenario("still_water") + " --out \"" + (dir / "o").string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"report.json", "diagnostics.csv", "solution.swf", "contours.svg", "trace.csv"})
    EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
  const auto j = load(dir / "o" / "report.json");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["diagnostics"]["M"].get<double>(), 0.0);
  for (const char* k : {"S1", "S2", "S3"}) EXPECT_EQ(j["certificates"][k]["verdict"], "pass") << k;
  EXPECT_EQ(j["certificates"]["lemma"]["verdict"], "pass");
  EXPECT_EQ(j["sweep"]["classification"], "symmetric");
  for (const auto& s : j["stages"]) EXPECT_EQ(s["status"], "ok") << s.dump();
}

TEST(Cli, StratifiedGolden) {
  const auto dir = scratch("golden");
  const auto r = cli("run " + scenario("stratified_small") + " --out \"" + dir.string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto got = slurp(dir / "report.json");
  const auto want = slurp(kSource / "tests" / "golden" / "stratified_small.report.json");
  EXPECT_EQ(got, want);
}

TEST(Cli, StageFailureRecorded) {
  const auto dir = scratch("stagefail");
  write(dir / "low_q.json", R"({"grid": {"L": 1, "p0": -1, "Nq": 16, "Np": 17}, "Q": 1.0})");
  const auto r = cli("run \"" + (dir / "low_q.json").string() + "\" --out \"" +
                         (dir / "o").string() + "\"", dir);
  EXPECT_EQ(r.code, 1);
  const auto j = load(dir / "o" / "report.json");
  EXPECT_EQ(j["status"], "failed");
  EXPECT_EQ(j["stages"][0]["name"], "laminar");
  EXPECT_EQ(j["stages"][0]["status"], "failed");
  EXPECT_EQ(j["stages"][0]["error"]["type"], "NoLaminarFlow");
  EXPECT_FALSE(j["stages"][0]["error"]["slopes"].empty());
}

TEST(Cli, SingleStageCommands) {
  const auto dir = scratch("single");
  auto r = cli("solve " + scenario("still_water") + " --out \"" + (dir / "s").string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = load(dir / "s" / "report.json");
  EXPECT_FALSE(j.contains("certificates"));
  EXPECT_EQ(j["stages"].size(), 3u);

  r = cli("sweep " + scenario("still_water") + " --out \"" + (dir / "w").string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  j = load(dir / "w" / "report.json");
  EXPECT_TRUE(j.contains("sweep"));
  EXPECT_FALSE(j.contains("eigen"));

  r = cli("report --dir \"" + (dir / "w").string() + "\"", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("symmetric"), std::string::npos) << r.out;
}

TEST(Cli, BatchDirectory) {
  const auto dir = scratch("batch");
  fs::create_directories(dir / "in");
  fs::copy_file(scenario("still_water"), dir / "in" / "a.json");
  write(dir / "in" / "b.json", R"({"name": "b", "grid": {"L": 2, "p0": -1, "Nq": 16, "Np": 9}, "Q": 20.62})");
  const auto r = cli("solve \"" + (dir / "in").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "o" / "still_water" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "o" / "b" / "report.json"));
}

TEST(Cli, VerifySuites) {
  const auto dir = scratch("verify");
  auto r = cli("verify perturbation --trials 4 --seed 3 --size 10", dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0 failures"), std::string::npos) << r.out;
  r = cli("verify max-principle --trials 4 --seed 3 --size 10", dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("negative_control"), std::string::npos) << r.out;
  r = cli("verify eigen-props --trials 2 --seed 3 --size 10", dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cli("verify nonsense", dir).code, 2);
}
