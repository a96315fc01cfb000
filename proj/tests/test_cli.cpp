#include "cli.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "poolea");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = poolea::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("poolea_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    for (const char* v : {"POOLEA_ISLAND_SEED", "POOLEA_ISLAND_POPULATION"}) ::unsetenv(v);
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

const std::vector<std::string> kTinyIsland = {"island", "--population", "8", "--traps", "4",
                                              "--max-generations", "2"};

nlohmann::json islandReport(const std::vector<std::string>& extra) {
  auto args = kTinyIsland;
  args.insert(args.end(), extra.begin(), extra.end());
  const CliRun r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  const CliRun bogus = run({"bogus"});
  EXPECT_EQ(bogus.code, 2);
  EXPECT_NE(bogus.err.find("simulate"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--nope"}).code, 2);
  EXPECT_EQ(run({"simulate", "--seed", "abc"}).code, 2);
  EXPECT_EQ(run({"analyze"}).code, 2);
}

TEST_F(Cli, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("serve"), std::string::npos);
  EXPECT_EQ(run({"island", "--help"}).code, 0);
}

TEST_F(Cli, InvalidConfigurationExitsOne) {
  const CliRun zipf = run({"simulate", "--zipf", "-1", "--log", path("l"), "--report", path("r")});
  EXPECT_EQ(zipf.code, 1);
  EXPECT_NE(zipf.err.find("zipf exponent must be positive"), std::string::npos);
  EXPECT_EQ(run({"island", "--elite", "300"}).code, 1);
  EXPECT_EQ(run({"island", "--trap-length", "1"}).code, 1);
  EXPECT_EQ(run({"serve", "--port", "70000", "--log-file", ""}).code, 1);
  EXPECT_EQ(run({"serve", "--static-dir", path("absent"), "--log-file", ""}).code, 1);
  EXPECT_EQ(run({"analyze", "--input", path("absent.ndjson")}).code, 1);
  EXPECT_EQ(run({"analyze", "--input", "https://example.org"}).code, 1);
}

TEST_F(Cli, IslandReportOnStdout) {
  const auto j = islandReport({"--seed", "9"});
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["generations"], 2);
  EXPECT_EQ(j["evaluations"], 8 + 2 * 6);
  EXPECT_EQ(islandReport({"--seed", "9"})["bestFitnessTrace"], j["bestFitnessTrace"]);
}

TEST_F(Cli, IslandReportToFile) {
  auto args = kTinyIsland;
  args.insert(args.end(), {"--seed", "3", "--report", path("report.json")});
  const CliRun r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("report written"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("report.json")))["seed"], 3);
}

TEST_F(Cli, IslandSurvivesUnreachableServer) {
  const auto j = islandReport({"--seed", "1", "--period", "1", "--server", "http://127.0.0.1:9",
                               "--timeout-ms", "200"});
  EXPECT_EQ(j["migrationsSent"], 2);
  EXPECT_EQ(j["migrationsReceived"], 0);
}

TEST_F(Cli, IslandSolvesWithServerDown) {
  const CliRun r = run({"island", "--traps", "10", "--seed", "4", "--period", "10", "--server",
                        "http://127.0.0.1:9", "--timeout-ms", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["solved"], true);
  EXPECT_EQ(j["migrationsReceived"], 0);
}

TEST_F(Cli, FlagsBeatEnvBeatConfigBeatDefaults) {
  std::ofstream(path("config.json")) << R"({"island": {"seed": 5, "population": 10}})";
  const std::string cfg = path("config.json");

  EXPECT_EQ(islandReport({"--config", cfg})["seed"], 5);
  EXPECT_EQ(islandReport({"--config", cfg})["evaluations"], 8 + 2 * 6);  // CLI population wins

  ::setenv("POOLEA_ISLAND_SEED", "6", 1);
  EXPECT_EQ(islandReport({"--config", cfg})["seed"], 6);
  EXPECT_EQ(islandReport({"--config", cfg, "--seed", "7"})["seed"], 7);

  ::unsetenv("POOLEA_ISLAND_SEED");
  const CliRun r = run({"island", "--config", cfg, "--traps", "4", "--max-generations", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["evaluations"], 10 + 8);  // population from config
}

TEST_F(Cli, ConfigAfterSubcommandAndBadConfig) {
  std::ofstream(path("bad.json")) << "[1,2]";
  EXPECT_EQ(run({"island", "--config", path("bad.json")}).code, 2);
  EXPECT_EQ(run({"island", "--config", path("missing.json")}).code, 2);
  std::ofstream(path("extra.json")) << R"({"island": {"bogus": 1}})";
  EXPECT_EQ(run({"island", "--config", path("extra.json")}).code, 2);
}

TEST_F(Cli, ConfigSectionsForOtherSubcommandsAreAccepted) {
  std::ofstream(path("all.json")) << R"({"serve": {"port": 9}, "island": {"seed": 4},
                                        "simulate": {"seed": 1}, "analyze": {"out-dir": "x"}})";
  EXPECT_EQ(islandReport({"--config", path("all.json")})["seed"], 4);
}

TEST_F(Cli, SimulateIsByteIdentical) {
  const std::vector<std::string> base = {"simulate", "--seed", "42", "--traps", "12", "--trap-length", "5",
                                         "--population", "64", "--period", "20", "--top-quota", "15"};
  auto first = base, second = base;
  first.insert(first.end(), {"--log", path("a.ndjson"), "--report", path("a.json")});
  second.insert(second.end(), {"--log", path("b.ndjson"), "--report", path("b.json")});
  ASSERT_EQ(run(first).code, 0);
  ASSERT_EQ(run(second).code, 0);
  EXPECT_FALSE(slurp(path("a.ndjson")).empty());
  EXPECT_EQ(slurp(path("a.ndjson")), slurp(path("b.ndjson")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));

  const CliRun analyze = run({"analyze", "--input", path("a.ndjson"), "--out-dir", path("out")});
  ASSERT_EQ(analyze.code, 0) << analyze.err;
  for (const char* f : {"ranked_puts.csv", "intervals.csv", "summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const auto report = nlohmann::json::parse(slurp(path("a.json")));
  std::size_t rows = 0;
  std::ifstream ranked(dir_ / "out" / "ranked_puts.csv");
  for (std::string line; std::getline(ranked, line);) ++rows;
  EXPECT_EQ(rows - 1, report["perClientPuts"].size());
}
