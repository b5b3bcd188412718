#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cdm/ingest.hpp"
#include "cli_app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cdm_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cdm");
  std::ostringstream out, err;
  const int code = cdm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cdm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_F(CliTest, SynthWritesValidReproducibleHistory) {
  const auto a = cdm_cli({"synth", "--pool", "52", "--picks", "6", "--draws", "100", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, cdm_cli({"synth", "--pool", "52", "--picks", "6", "--draws", "100", "--seed", "7"}).out);
  EXPECT_NE(a.out.find("mt19937_64"), std::string::npos);
  EXPECT_EQ(cdm::parse_history(a.out, cdm::GameSpec::set_draw(52, 6)).size(), 100u);

  const auto pick = cdm_cli({"synth", "--game", "pick", "--draws", "10"});
  ASSERT_EQ(pick.code, 0) << pick.err;
  EXPECT_EQ(cdm::parse_history(pick.out, cdm::GameSpec::pick(3)).size(), 10u);

  EXPECT_EQ(cdm_cli({"synth", "--pool", "6", "--picks", "6"}).code, 2);
}

TEST_F(CliTest, PredictPrintsOneLinePerEstimator) {
  const auto hist = path("h.csv");
  ASSERT_EQ(cdm_cli({"synth", "--draws", "200", "--seed", "3", "--output", hist}).code, 0);
  const auto r = cdm_cli({"predict", "--input", hist, "--estimator", "md,mm"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_TRUE(l[0].ends_with(" [MD]"));
  EXPECT_TRUE(l[1].ends_with(" [MM]"));
  std::istringstream nums(l[0]);
  int count = 0;
  for (std::string w; nums >> w && w != "[MD]";) ++count;
  EXPECT_EQ(count, 6);

  const auto pick = path("p.csv");
  ASSERT_EQ(cdm_cli({"synth", "--game", "pick", "--draws", "50", "--output", pick}).code, 0);
  const auto p = cdm_cli({"predict", "--game", "pick", "--input", pick, "--estimator", "mm"});
  ASSERT_EQ(p.code, 0) << p.err;
  ASSERT_EQ(lines(p.out).size(), 1u);
  EXPECT_TRUE(lines(p.out)[0].ends_with(" [MM]"));

  const auto j = cdm_cli({"predict", "--input", hist, "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  const auto doc = json::parse(j.out);
  ASSERT_EQ(doc["predictions"].size(), 2u);
  EXPECT_EQ(doc["predictions"][0]["scores"][0].size(), 52u);
}

TEST_F(CliTest, MissingFileIsUsageErrorNamingPath) {
  const auto missing = path("nope.csv");
  const auto r = cdm_cli({"predict", "--input", missing});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos);
  EXPECT_EQ(cdm_cli({"simulate", "--gaps-file", missing}).code, 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cdm_cli({}).code, 2);
  EXPECT_EQ(cdm_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cdm_cli({"--help"}).code, 0);
  EXPECT_EQ(cdm_cli({"backtest", "--draws", "60", "--threshold", "7"}).code, 2);
  EXPECT_EQ(cdm_cli({"backtest", "--window", "zero"}).code, 2);
  const auto bad = write("bad.csv", "0,,1 2 3 4 5 6\n1,,1 2 3 4 5 99\n");
  const auto r = cdm_cli({"predict", "--input", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  // Model failure: the unsmoothed MLE on indicator data.
  const auto m = cdm_cli({"backtest", "--draws", "80", "--estimator", "mle", "--threshold", "1"});
  EXPECT_EQ(m.code, 1);
  EXPECT_NE(m.err.find("draw 52"), std::string::npos) << m.err;
  const auto cap = cdm_cli({"simulate", "--gaps", "44,1410", "--player-cap", "20"});
  EXPECT_EQ(cap.code, 1);
  EXPECT_NE(cap.err.find("stream 2"), std::string::npos) << cap.err;
}

TEST_F(CliTest, BacktestHitReplayReportsAverageGap) {
  const auto hits = write("hits.txt", "0, 44, 659, 1357, 1369\n1915 2039 3449 3685 4285\n");
  const auto r = cdm_cli({"backtest", "--hits-file", hits});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("(rounded 476)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("S L L S L S L S L"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("NOT reproduced"), std::string::npos) << r.out;

  const auto j = cdm_cli({"backtest", "--hits-file", hits, "--format", "json"});
  const auto doc = json::parse(j.out);
  EXPECT_EQ(doc["gaps"], json::parse("[44,615,698,12,546,124,1410,236,600]"));
  EXPECT_EQ(doc["stretches"]["reference_reproduced"], false);
}

TEST_F(CliTest, BacktestIsDeterministic) {
  const std::vector<std::string> args{"backtest", "--draws", "400", "--seed", "11", "--threshold", "2",
                                      "--estimator", "md", "--format", "json"};
  const auto a = cdm_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, cdm_cli(args).out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  EXPECT_EQ(a.out, cdm_cli(threaded).out);
  const auto doc = json::parse(a.out);
  EXPECT_EQ(doc["config"]["generator"]["algorithm"], "mt19937_64");
  EXPECT_EQ(doc["draws"].size(), 400u - 52u);
}

TEST_F(CliTest, BacktestJsonFeedsSimulate) {
  const auto bt = path("bt.json");
  ASSERT_EQ(cdm_cli({"backtest", "--draws", "600", "--seed", "5", "--threshold", "2", "--format", "json",
                     "--output", bt})
                .code,
            0);
  std::ifstream in(bt);
  const auto doc = json::parse(in);
  const auto gaps = doc["gaps"].get<std::vector<std::int64_t>>();
  ASSERT_FALSE(gaps.empty());

  const auto sim = cdm_cli({"simulate", "--gaps-file", bt, "--format", "json"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto out = json::parse(sim.out);
  ASSERT_EQ(out["streams"].size(), gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) EXPECT_EQ(out["streams"][i]["gap_draws"], gaps[i]);

  std::string list;
  for (auto g : gaps) list += (list.empty() ? "" : ",") + std::to_string(g);
  EXPECT_EQ(json::parse(cdm_cli({"simulate", "--gaps", list, "--format", "json"}).out), out);
}

TEST_F(CliTest, SimulateExamples) {
  const auto one = cdm_cli({"simulate", "--gaps", "44"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_NE(one.out.find("profit $380"), std::string::npos) << one.out;

  const auto dry = cdm_cli({"simulate", "--no-win-horizon", "240"});
  ASSERT_EQ(dry.code, 0) << dry.err;
  EXPECT_NE(dry.out.find("$2,400"), std::string::npos) << dry.out;

  const auto table = cdm_cli({"simulate", "--gaps", "44,615,698,12,546,124,1410,236,600", "--format", "json"});
  ASSERT_EQ(table.code, 0) << table.err;
  const auto doc = json::parse(table.out);
  EXPECT_EQ(doc["streams"].size(), 9u);
  EXPECT_EQ(doc["streams"][0]["profit_cents"], 38000);
  EXPECT_EQ(doc["streams"][0]["quarters"][0]["outcome"], "won");

  EXPECT_EQ(cdm_cli({"simulate"}).code, 2);
  EXPECT_EQ(cdm_cli({"simulate", "--gaps", "44", "--extension", "double"}).code, 2);
  EXPECT_EQ(cdm_cli({"simulate", "--gaps", "44", "--ticket-price", "1.005"}).code, 2);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  const auto cfg = write("run.toml", "payout = \"400\"\ngaps = [44]\n");
  const auto from_file = json::parse(cdm_cli({"simulate", "--config", cfg, "--format", "json"}).out);
  EXPECT_EQ(from_file["config"]["payout_cents"], 40000);
  EXPECT_EQ(from_file["streams"][0]["profit_cents"], 28000);

  const auto overridden =
      json::parse(cdm_cli({"simulate", "--config", cfg, "--payout", "500", "--format", "json"}).out);
  EXPECT_EQ(overridden["config"]["payout_cents"], 50000);
  EXPECT_EQ(overridden["streams"][0]["profit_cents"], 38000);
}
