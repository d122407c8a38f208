#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavnav/cli/cli.h"

namespace uavnav::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "uavnav");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("uavnav_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config() const {
    const fs::path p = dir_ / "tiny.ini";
    std::ofstream(p) << "[scenario]\nn_uavs = 2\ndensity = 0.01\n"
                        "[camera]\nwidth = 16\nheight = 16\n"
                        "[net]\nfilters = 4\nlatent_dim = 8\nhidden = 16\n"
                        "[sac]\nbatch_size = 4\n"
                        "[train]\nmax_episodes = 1\nupdate_times = 2\nwarmup_transitions = 4\n"
                        "t_max = 10\ncheckpoint_every = 0\n";
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({}).code, exit_code::kUsage);
  EXPECT_EQ(call({"fly"}).code, exit_code::kUsage);
  EXPECT_EQ(call({"render", "--bogus"}).code, exit_code::kUsage);
  EXPECT_EQ(call({"info"}).code, exit_code::kUsage);
  EXPECT_EQ(call({"--help"}).code, exit_code::kOk);
}

TEST_F(CliTest, RenderWritesPgm) {
  const fs::path pgm = dir_ / "frame.pgm";
  const Outcome r = call({"render", "--n-uavs", "4", "--density", "0.01", "--seed", "3", "--uav", "2", "--width",
                          "32", "--height", "24", "--output", pgm.string()});
  ASSERT_EQ(r.code, exit_code::kOk) << r.err;
  std::ifstream in(pgm, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 32);
  EXPECT_EQ(h, 24);
  EXPECT_EQ(maxval, 65535);
  EXPECT_EQ(fs::file_size(pgm), static_cast<std::uintmax_t>(in.tellg()) + 1 + 32 * 24 * 2);
}

TEST_F(CliTest, RenderRejectsBadInput) {
  const Outcome bad_index = call({"render", "--n-uavs", "2", "--density", "0.01", "--uav", "2", "--output",
                                  (dir_ / "x.pgm").string()});
  EXPECT_EQ(bad_index.code, exit_code::kUsage);
  EXPECT_NE(bad_index.err.find("out of range"), std::string::npos) << bad_index.err;
  EXPECT_EQ(call({"render", "--width", "4", "--output", (dir_ / "y.pgm").string()}).code, exit_code::kUsage);
  EXPECT_EQ(call({"render", "--scenario", "spiral"}).code, exit_code::kUsage);
}

TEST_F(CliTest, TrainInfoEvalRoundTrip) {
  const fs::path run_dir = dir_ / "run";
  const Outcome t = call({"train", "--config", write_config().string(), "--set", "sac.gamma=0.9", "--seed", "4",
                          "--output", run_dir.string()});
  ASSERT_EQ(t.code, exit_code::kOk) << t.err;
  const fs::path ckpt = run_dir / "checkpoints" / "final";
  EXPECT_TRUE(fs::exists(run_dir / "metrics.csv"));

  const Outcome i = call({"info", "--checkpoint", ckpt.string()});
  ASSERT_EQ(i.code, exit_code::kOk) << i.err;
  EXPECT_NE(i.out.find("latent_dim 8"), std::string::npos) << i.out;
  EXPECT_NE(i.out.find("image 16x16"), std::string::npos);
  EXPECT_NE(i.out.find("gamma = 0.9"), std::string::npos);
  EXPECT_NE(i.out.find("seed = 4"), std::string::npos);

  const Outcome e = call({"eval", "--checkpoint", ckpt.string(), "--n-uavs", "2", "--density", "0.01", "--episodes",
                          "2", "--t-max", "20", "--output", (dir_ / "eval").string()});
  ASSERT_EQ(e.code, exit_code::kOk) << e.err;
  EXPECT_NE(e.out.find("SPL"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "eval" / "results.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "eval" / "trajectory_0002.csv"));
}

TEST_F(CliTest, TrainRejectsUnknownKey) {
  const Outcome r = call({"train", "--config", write_config().string(), "--set", "sac.warp=1", "--output",
                          (dir_ / "run").string()});
  EXPECT_EQ(r.code, exit_code::kUsage);
  EXPECT_NE(r.err.find("sac.warp"), std::string::npos) << r.err;
  EXPECT_EQ(call({"train", "--config", (dir_ / "missing.ini").string()}).code, exit_code::kUsage);
}

TEST_F(CliTest, EvalArgumentChecks) {
  EXPECT_EQ(call({"eval", "--output", dir_.string()}).code, exit_code::kUsage);
  EXPECT_EQ(call({"eval", "--baseline", "--checkpoint", dir_.string()}).code, exit_code::kUsage);
  EXPECT_EQ(call({"eval", "--checkpoint", (dir_ / "nope").string()}).code, exit_code::kUsage);
  EXPECT_EQ(call({"info", "--checkpoint", (dir_ / "nope").string()}).code, exit_code::kUsage);
  const Outcome b = call({"eval", "--baseline", "--n-uavs", "1", "--density", "0.001", "--episodes", "3", "--output",
                          (dir_ / "base").string()});
  ASSERT_EQ(b.code, exit_code::kOk) << b.err;
  EXPECT_NE(b.out.find("success rate"), std::string::npos);
}

TEST(CliDefaults, OutputRootFromEnvironment) {
  ::setenv(kOutputRootEnv, "/tmp/somewhere", 1);
  EXPECT_EQ(default_output_dir("eval"), fs::path("/tmp/somewhere/eval"));
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(default_output_dir("train"), fs::path("runs/train"));
}

}  // namespace
}  // namespace uavnav::cli
