#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "anchorrefine/cli/commands.h"
#include "anchorrefine/cli/config.h"
#include "anchorrefine/cli/reports.h"
#include "anchorrefine/core/errors.h"

namespace anchorrefine::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kSmallConfig = R"(
# tiny run for tests
[data]
seed = 4
n_episodes = 4

[train]
latent_dim = 4
hidden_widths = 16,16
phase1_steps = 60
phase2_steps = 40
batch_size = 16

[eval]
eval_seeds = 6
smoothing_window = 10
)";

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("ar_cli_") + info->name() + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = (dir_ / "run.cfg").string();
    std::ofstream(config_) << kSmallConfig;
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "anchorrefine");
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }
  std::vector<std::string> Common(const fs::path& out) {
    return {"--config", config_, "--output", out.string()};
  }
  std::vector<std::string> Cmd(std::vector<std::string> head,
                               const fs::path& out) {
    for (auto& a : Common(out)) head.push_back(a);
    return head;
  }

  fs::path dir_;
  std::string config_;
  std::ostringstream out_, err_;
};

TEST(Config, DefaultsAndOverrides) {
  RunConfig c;
  ApplyConfigText("[train]\nvariant = NaiveGripMSE ; trailing comment\n"
                  "hidden_widths = 32, 64\n[data]\nn_episodes=7\n",
                  c);
  c.Validate();
  EXPECT_EQ(c.train.variant, pipeline::Variant::kNaiveGripMSE);
  EXPECT_EQ(c.train.hidden_widths, (std::vector<int>{32, 64}));
  EXPECT_EQ(c.n_episodes, 7);
  EXPECT_EQ(c.train.lambda_grip, 0.01);
  EXPECT_EQ(c.train.epsilon, 0.05);
  EXPECT_EQ(c.train.context_dim, 11);
}

TEST(Config, UnknownKeysAndBadValuesRejected) {
  RunConfig c;
  EXPECT_THROW(ApplyConfigText("[train]\nlamda_grip = 0.1\n", c), ConfigError);
  EXPECT_THROW(ApplyConfigText("[nosuch]\nx = 1\n", c), ConfigError);
  EXPECT_THROW(ApplyConfigText("[train]\nphase1_steps = 12abc\n", c),
               ConfigError);
  EXPECT_THROW(ApplyConfigText("[train]\nvariant = Fancy\n", c), ConfigError);
  EXPECT_THROW(ApplyConfigText("no equals sign\n", c), ConfigError);
  try {
    ApplyConfigText("[train]\n\nbogus = 1\n", c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(Config, ValidationFailures) {
  RunConfig c;
  c.n_episodes = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = RunConfig{};
  c.train.epsilon = -1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(Config, HashStableAndSensitive) {
  RunConfig a, b;
  a.Validate();
  b.Validate();
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.output_dir = "elsewhere";
  b.emit_svg = true;
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.train.variant = pipeline::Variant::kNaiveGripMSE;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  RunConfig c;
  ApplyConfigText(CanonicalText(a), c);
  c.Validate();
  EXPECT_EQ(ConfigHash(c), ConfigHash(a));
  EXPECT_EQ(CanonicalText(c), CanonicalText(a));
}

TEST(Reports, AblationTableHandTally) {
  using pipeline::Variant;
  const std::vector<AblationCell> cells = {
      {Variant::kFull, 0, 0.80, ""},
      {Variant::kFull, 1, 0.70, ""},
      {Variant::kNaiveGripMSE, 0, 0.60, ""},
      {Variant::kNaiveGripMSE, 1, std::nullopt, "numerical failure"},
      {Variant::kNoDetach, 0, 0.75, ""},
      {Variant::kNoDetach, 1, 0.65, ""},
  };
  const auto rows = AblationTable(
      {Variant::kFull, Variant::kNaiveGripMSE, Variant::kNoDetach}, cells);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(*rows[0].mean_success, 0.75);
  EXPECT_EQ(*rows[0].mean_delta_vs_full, 0.0);
  EXPECT_EQ(rows[1].n_ok, 1);
  EXPECT_EQ(rows[1].n_failed, 1);
  EXPECT_DOUBLE_EQ(*rows[1].mean_delta_vs_full, -0.20);
  EXPECT_DOUBLE_EQ(*rows[2].mean_delta_vs_full, -0.05);
  EXPECT_DOUBLE_EQ(rows[1].published_delta, -9.7);
  const std::string csv = AblationCsv(rows);
  EXPECT_NE(csv.find("NaiveGripMSE,1,1,"), std::string::npos);
  EXPECT_NE(csv.find(",72.6,-9.7\n"), std::string::npos);
  EXPECT_NE(AblationCellsCsv(cells).find("NaiveGripMSE,1,,numerical failure"),
            std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Run({}), kExitUsage);
  EXPECT_EQ(Run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(Run(Cmd({"train", "--phase", "3"}, dir_ / "x")), kExitUsage);
  EXPECT_EQ(Run(Cmd({"train", "--phase", "2"}, dir_ / "x")), kExitUsage);
  EXPECT_EQ(Run(Cmd({"analyze", "--kind", "vibes"}, dir_ / "x")), kExitUsage);
  EXPECT_EQ(Run(Cmd({"gen-data", "--variant", "Nope"}, dir_ / "x")),
            kExitUsage);
  EXPECT_EQ(Run({"eval", "--config", (dir_ / "missing.cfg").string()}),
            kExitUsage);
}

TEST_F(CliTest, ZeroEpisodesRejected) {
  std::ofstream(config_, std::ios::app) << "[data]\nn_episodes = 0\n";
  EXPECT_EQ(Run(Cmd({"gen-data"}, dir_ / "out")), kExitUsage);
  EXPECT_NE(err_.str().find("n_episodes"), std::string::npos);
}

TEST_F(CliTest, GenDataDeterministic) {
  ASSERT_EQ(Run(Cmd({"gen-data"}, dir_ / "a")), kExitOk) << err_.str();
  ASSERT_EQ(Run(Cmd({"gen-data"}, dir_ / "b")), kExitOk) << err_.str();
  EXPECT_EQ(Slurp(dir_ / "a" / "dataset.jsonl"),
            Slurp(dir_ / "b" / "dataset.jsonl"));
  EXPECT_FALSE(Slurp(dir_ / "a" / "dataset.jsonl").empty());
  EXPECT_EQ(Slurp(dir_ / "a" / "config.resolved"),
            Slurp(dir_ / "b" / "config.resolved"));
}

TEST_F(CliTest, EndToEndWithHashChecks) {
  const fs::path out = dir_ / "run";
  ASSERT_EQ(Run(Cmd({"gen-data"}, out)), kExitOk) << err_.str();
  ASSERT_EQ(Run(Cmd({"train", "--phase", "1"}, out)), kExitOk) << err_.str();
  const std::string anchor = (out / "anchor.ckpt").string();
  ASSERT_EQ(Run(Cmd({"train", "--phase", "2", "--anchor", anchor}, out)),
            kExitOk)
      << err_.str();
  const std::string refine = (out / "refine.ckpt").string();
  ASSERT_EQ(Run(Cmd({"eval", "--anchor", anchor, "--refine", refine}, out)),
            kExitOk)
      << err_.str();
  const auto report =
      nlohmann::json::parse(Slurp(out / "eval_report.json"));
  EXPECT_EQ(report["anchor_only"]["n"], 6);
  EXPECT_EQ(report["transitions"]["total"], 6);
  EXPECT_FALSE(fs::exists(out / "eval_full_outcomes.svg"));

  // A different seed changes the hash; the checkpoint no longer matches.
  const fs::path other = dir_ / "other";
  auto mismatch = Cmd({"eval", "--anchor", anchor, "--refine", refine}, other);
  mismatch.insert(mismatch.end(), {"--seed", "99"});
  EXPECT_EQ(Run(mismatch), kExitUsage);
  EXPECT_NE(err_.str().find("hash"), std::string::npos);
  mismatch.push_back("--force");
  EXPECT_EQ(Run(mismatch), kExitOk) << err_.str();

  // Loading the refine checkpoint under the wrong variant fails cleanly.
  auto wrong = Cmd({"eval", "--anchor", anchor, "--refine", refine, "--force",
                    "--variant", "NoGripRefine"},
                   dir_ / "wrong");
  EXPECT_EQ(Run(wrong), kExitUsage);

  for (const std::string kind : {"residuals", "transitions", "grip-profile"}) {
    EXPECT_EQ(Run(Cmd({"analyze", "--kind", kind, "--anchor", anchor,
                       "--refine", refine, "--emit-svg"},
                      out)),
              kExitOk)
        << kind << ": " << err_.str();
  }
  EXPECT_TRUE(fs::exists(out / "residuals.json"));
  EXPECT_TRUE(fs::exists(out / "grip_profile.csv"));
  EXPECT_TRUE(fs::exists(out / "transitions.csv"));

  const std::string log1 = (out / "phase1_loss.csv").string();
  const std::string log2 = (out / "phase2_loss.csv").string();
  EXPECT_EQ(Run(Cmd({"analyze", "--kind", "loss-dynamics", log1}, out)),
            kExitUsage);
  EXPECT_EQ(
      Run(Cmd({"analyze", "--kind", "loss-dynamics", log1, log2}, out)),
      kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(out / "loss_dynamics.csv"));
}

TEST_F(CliTest, LossDynamicsExponentialOracle) {
  // Two synthetic logs: exp(-i / 20) and 7 * exp(-i / 80), no smoothing.
  auto write = [&](const std::string& name, double scale, double tau) {
    std::ofstream f(dir_ / name);
    f << "phase,step,arm_loss,grip_loss,total\n";
    for (int i = 0; i < 600; ++i) {
      const double v = scale * std::exp(-i / tau);
      char buf[128];
      std::snprintf(buf, sizeof buf, "1,%d,%.17g,0,%.17g\n", i, v, v);
      f << buf;
    }
    return (dir_ / name).string();
  };
  const std::string a = write("a.csv", 1.0, 20.0);
  const std::string b = write("b.csv", 7.0, 80.0);
  std::ofstream(config_, std::ios::app) << "[eval]\nsmoothing_window = 1\n";
  const fs::path out = dir_ / "ld";
  ASSERT_EQ(Run(Cmd({"analyze", "--kind", "loss-dynamics", a, b}, out)),
            kExitOk)
      << err_.str();
  const auto j = nlohmann::json::parse(Slurp(out / "loss_dynamics.json"));
  const auto& la = j["loss_dynamics"]["a"]["crossings"];
  const auto& lb = j["loss_dynamics"]["b"]["crossings"];
  // floor(-tau ln f) + 1
  EXPECT_EQ(la["50%"], 14);
  EXPECT_EQ(la["20%"], 33);
  EXPECT_EQ(la["10%"], 47);
  EXPECT_EQ(lb["50%"], 56);
  EXPECT_EQ(lb["20%"], 129);
  EXPECT_EQ(lb["10%"], 185);
}

TEST_F(CliTest, AblateSmallGrid) {
  const fs::path out = dir_ / "abl";
  ASSERT_EQ(Run(Cmd({"gen-data"}, out)), kExitOk) << err_.str();
  ASSERT_EQ(Run(Cmd({"ablate", "--variants", "Full,NaiveGripMSE,AnchorOnlyDeep",
                     "--seeds", "2"},
                    out)),
            kExitOk)
      << err_.str();
  const std::string cells = Slurp(out / "ablation_cells.csv");
  EXPECT_EQ(std::count(cells.begin(), cells.end(), '\n'), 7);
  const auto j = nlohmann::json::parse(Slurp(out / "ablation.json"));
  EXPECT_FALSE(j.empty());
  EXPECT_EQ(Run(Cmd({"ablate", "--variants", "Full,Bogus"}, out)), kExitUsage);
}

}  // namespace
}  // namespace anchorrefine::cli
