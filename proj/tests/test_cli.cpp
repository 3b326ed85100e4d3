#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "cli_helpers.hpp"
#include "cpsor/dbn.hpp"
#include "cpsor/text_format.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace cpsor;
using test::run_cli;

namespace {

std::size_t count_ext(const std::string& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

// Small shared dataset: 2 scenarios x 2 emotions x 3 episodes of 6 s.
const std::string& small_dataset() {
  static const std::string dir = [] {
    const auto d = test::fresh_dir(test::temp_dir("cli_small"));
    const int rc = run_cli("generate --out " + d + " --episodes 3 --scenarios 1,2 --emotions anger,fright "
                           "--duration 6 --trigger 2");
    EXPECT_EQ(rc, 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST(Cli, GenerateIsDeterministic) {
  const auto a = test::fresh_dir(test::temp_dir("cli_gen_a"));
  const auto b = test::fresh_dir(test::temp_dir("cli_gen_b"));
  const std::string flags = " --episodes 2 --scenarios 1,3 --emotions anger,neutral --duration 3 --trigger 1";
  ASSERT_EQ(run_cli("generate --out " + a + flags), 0);
  ASSERT_EQ(run_cli("generate --out " + b + flags), 0);
  EXPECT_EQ(count_ext(a, ".csv"), 8u);
  EXPECT_TRUE(fs::exists(a + "/manifest.json"));
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(read_file(e.path().string()), read_file(b + "/" + e.path().filename().string()))
        << e.path().filename();
  }
}

TEST(Cli, ZeroEpisodesWritesEmptyManifest) {
  const auto d = test::fresh_dir(test::temp_dir("cli_gen_zero"));
  ASSERT_EQ(run_cli("generate --out " + d + " --episodes 0"), 0);
  EXPECT_EQ(count_ext(d, ".csv"), 0u);
  EXPECT_TRUE(fs::exists(d + "/manifest.json"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("generate --out x --bogus 3"), 1);
  EXPECT_EQ(run_cli("generate --out x --scenarios 7"), 1);
  EXPECT_EQ(run_cli("plot --kind metrics --format png"), 1);
  const auto run = test::temp_dir("cli_cp_nodbn");
  EXPECT_EQ(run_cli("train --data " + small_dataset() + " --out " + run + " --variant cp"), 2);
  EXPECT_EQ(run_cli("eval --data " + small_dataset() + " --run " + test::temp_dir("no_such_run")), 2);
}

TEST(Cli, HelpListsDefaults) {
  const auto log = test::temp_dir("cli_help.txt");
  ASSERT_EQ(run_cli("train --help", log), 0);
  const auto text = read_file(log);
  for (const char* flag : {"--epochs", "--lr", "--momentum", "--batch", "--history", "--horizon", "--variant", "--dbn"}) {
    EXPECT_NE(text.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(text.find("30"), std::string::npos);
  EXPECT_NE(text.find("cpsor"), std::string::npos);
  for (const char* cmd : {"generate", "discretize", "learn-dbn", "eval", "ablate", "compare-dbn", "plot"}) {
    EXPECT_EQ(run_cli(std::string(cmd) + " --help"), 0) << cmd;
  }
}

TEST(Cli, LearnDbnIsSorLegalAndReproducible) {
  const auto out = test::fresh_dir(test::temp_dir("cli_learn"));
  const std::string args = "learn-dbn --data " + small_dataset() + " --restarts 2 --out ";
  ASSERT_EQ(run_cli(args + out + "/a.txt"), 0);
  ASSERT_EQ(run_cli(args + out + "/b.txt"), 0);
  const auto doc = read_file(out + "/a.txt");
  EXPECT_EQ(doc, read_file(out + "/b.txt"));
  EXPECT_NO_THROW(dbn::deserialize(doc).structure.validate(true));
  const auto log = read_file(out + "/a.txt.bic.log");
  for (const char* key : {"prior sor", "penalty params", "restart 1 score", "bic_params", "bic_nodes"}) {
    EXPECT_NE(log.find(key), std::string::npos) << key;
  }
}

TEST(Cli, TrainEvalAndPlot) {
  const auto out = test::fresh_dir(test::temp_dir("cli_train"));
  const auto data = small_dataset();
  const std::string small = " --epochs 2 --gcn-dim 4 --lstm-dim 6 --attn-dim 4 --history 1 --horizon 1 --stride 10";
  ASSERT_EQ(run_cli("learn-dbn --data " + data + " --restarts 1 --out " + out + "/dbn.txt"), 0);
  ASSERT_EQ(run_cli("train --data " + data + " --variant p --out " + out + "/p" + small), 0);
  ASSERT_EQ(run_cli("train --data " + data + " --variant cpsor --dbn " + out + "/dbn.txt --out " + out + "/c" + small),
            0);
  for (const char* f : {"weights.txt", "losses.csv", "discretizer.json", "run.json"}) {
    EXPECT_TRUE(fs::exists(out + "/p/" + f)) << f;
  }
  EXPECT_TRUE(fs::exists(out + "/c/dbn.txt"));
  ASSERT_EQ(run_cli("eval --data " + data + " --run " + out + "/c --out " + out + "/eval.csv"), 0);
  const auto report = read_file(out + "/eval.csv");
  EXPECT_TRUE(std::isfinite(test::csv_value(report, "rmse", "cpsor,0,")));

  const std::string traj = "plot --kind trajectory --data " + data + " --run " + out + "/p --run " + out + "/c";
  ASSERT_EQ(run_cli(traj + " --out " + out + "/t1.svg"), 0);
  ASSERT_EQ(run_cli(traj + " --out " + out + "/t2.svg"), 0);
  EXPECT_EQ(read_file(out + "/t1.svg"), read_file(out + "/t2.svg"));
  const auto svg = read_file(out + "/t1.svg");
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 0, true);
  std::size_t lines = 0;
  for (auto at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) ++lines;
  EXPECT_EQ(lines, 4u);
  ASSERT_EQ(run_cli("plot --kind metrics --format csv --input " + out + "/eval.csv --out " + out + "/bars.csv"), 0);
  EXPECT_NE(read_file(out + "/bars.csv").find("group,series,value"), std::string::npos);
}

TEST(Cli, EvalOnMemorizedSample) {
  const auto out = test::fresh_dir(test::temp_dir("cli_memo"));
  ASSERT_EQ(run_cli("generate --out " + out + "/data --episodes 1 --scenarios 1 --emotions neutral --duration 4 "
                    "--trigger 1"),
            0);
  const std::string flags = " --history 0.4 --horizon 0.2 --stride 1000 --gcn-dim 3 --lstm-dim 4 --attn-dim 3"
                            " --epochs 3000 --lr 0.05 --batch 1 --train-fraction 1 --valid-fraction 0";
  ASSERT_EQ(run_cli("train --variant p --data " + out + "/data --out " + out + "/run" + flags), 0);
  ASSERT_EQ(run_cli("eval --split train --data " + out + "/data --run " + out + "/run --out " + out + "/r.csv"), 0);
  const double rmse = test::csv_value(read_file(out + "/r.csv"), "rmse", "p,0,");
  EXPECT_LT(rmse, 1e-3);
}

TEST(Cli, AblateWritesAllRows) {
  const auto out = test::fresh_dir(test::temp_dir("cli_ablate"));
  const auto data = test::fresh_dir(test::temp_dir("cli_ablate_data"));
  ASSERT_EQ(run_cli("generate --out " + data + " --episodes 3 --duration 5 --trigger 2"), 0);
  ASSERT_EQ(run_cli("ablate --data " + data + " --out " + out + " --seeds 1 --restarts 1 --epochs 1 --gcn-dim 2 "
                    "--lstm-dim 3 --attn-dim 2 --history 1 --stride 25"),
            0);
  const auto csv = read_file(out + "/ablation.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 36);
  EXPECT_TRUE(fs::exists(out + "/ablation.md"));
  EXPECT_TRUE(fs::exists(out + "/ablation_overall.csv"));
}
