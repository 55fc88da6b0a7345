#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "esrb/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("esrb_cli_" + std::string(info->name()) + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " \"" + std::string(ESRB_CLI_PATH) + "\" " + args + " >\"" +
                            (dir_ / "stdout").string() + "\" 2>\"" + (dir_ / "stderr").string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir_ / "stdout"),
            slurp(dir_ / "stderr")};
  }

  fs::path p(const std::string& name) const { return dir_ / name; }
  std::string q(const std::string& name) const { return "\"" + p(name).string() + "\""; }

  // Small scene, degraded to 16x16 with noise.
  void make_observation() {
    ASSERT_EQ(run("simulate --width 64 --height 64 --frames 9 --exposure 0.008 --speed 3000 --out-dir " +
                  q("hr")).code, 0);
    ASSERT_EQ(run("degrade --frames-dir " + q("hr") + " --scale 4 --omega 0.3 --seed 5 --blurry-out " +
                  q("Y.pgm") + " --events-out " + q("ev.txt")).code, 0);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitTwo) {
  auto r = run("");
  EXPECT_EQ(r.code, 2);
  r = run("frobnicate");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  r = run("stats --no-such-flag 3");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no-such-flag"), std::string::npos);
  r = run("edi --events x.txt");
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, ProcessingErrorsExitOne) {
  auto r = run("edi --blurry " + q("missing.pgm") + " --events " + q("missing.txt") + " --out " +
               q("I.pgm"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.pgm"), std::string::npos);
  r = run("stats --T 1 --f 2");
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, StatsPrintsModelAndMonteCarlo) {
  const auto r = run("stats --lambda 50 --c 0.01 --T 1 --f 0 --trials 2000 --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* key : {"rho = 0.5", "mu = 1.25", "sigma = ", "empirical_mean = ",
                          "empirical_variance = "}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, EdiWritesFrameAndManifest) {
  make_observation();
  const auto r = run("edi --blurry " + q("Y.pgm") + " --events " + q("ev.txt") +
                     " --c 0.25 --f 0.0 --out " + q("I0.pgm"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto frame = esrb::read_frame(p("I0.pgm"));
  EXPECT_EQ(frame.width, 16);
  const auto m = nlohmann::json::parse(slurp(p("I0.manifest.json")));
  EXPECT_EQ(m["command"], "edi");
  EXPECT_EQ(m["config"]["c"], "0.25");
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m.contains("seed"));
  for (const auto& out : m["outputs"]) EXPECT_TRUE(fs::exists(out.get<std::string>()));
}

TEST_F(CliTest, SequenceEmitsZeroPaddedFrames) {
  make_observation();
  const auto r = run("sequence --blurry " + q("Y.pgm") + " --events " + q("ev.txt") +
                         " --times 13 --out-dir " + q("seq"),
                     "ESRB_THREADS=2");
  ASSERT_EQ(r.code, 0) << r.err;
  for (int k = 0; k < 13; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%02d.pgm", k);
    EXPECT_TRUE(fs::exists(p("seq") / name)) << name;
  }
  EXPECT_FALSE(fs::exists(p("seq") / "frame_13.pgm"));
  EXPECT_TRUE(fs::exists(p("seq") / "manifest.json"));
}

TEST_F(CliTest, ConfigFileFeedsOptionsAndCommandLineWins) {
  make_observation();
  std::ofstream(p("run.cfg")) << "# solver settings\nscale = 2\niterations = 3\nstep_halving = true\n";
  auto r = run("solve --config " + q("run.cfg") + " --blurry " + q("Y.pgm") + " --events " +
               q("ev.txt") + " --dict identity --iterations 4 --out " + q("X.pgm"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(esrb::read_frame(p("X.pgm")).width, 32);
  const auto m = nlohmann::json::parse(slurp(p("X.manifest.json")));
  EXPECT_EQ(m["config"]["iterations"], "4");
  EXPECT_EQ(m["config"]["scale"], "2");
  EXPECT_EQ(m["objective_trace"].size(), 5u);

  std::ofstream(p("bad.cfg")) << "bogus_key = 1\n";
  r = run("stats --config " + q("bad.cfg"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus-key"), std::string::npos);
}

TEST_F(CliTest, MetricsOnIdenticalImages) {
  make_observation();
  const auto r = run("metrics --a " + q("Y.pgm") + " --b " + q("Y.pgm"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("psnr = inf"), std::string::npos);
  EXPECT_NE(r.out.find("ssim = 1"), std::string::npos);
}

TEST_F(CliTest, PipelineIsDeterministic) {
  make_observation();
  const std::string y1 = slurp(p("Y.pgm")), e1 = slurp(p("ev.txt"));
  auto m1 = nlohmann::json::parse(slurp(p("Y.manifest.json")));
  fs::remove_all(p("hr"));
  make_observation();
  EXPECT_EQ(slurp(p("Y.pgm")), y1);
  EXPECT_EQ(slurp(p("ev.txt")), e1);
  auto m2 = nlohmann::json::parse(slurp(p("Y.manifest.json")));
  m1.erase("created");
  m2.erase("created");
  EXPECT_EQ(m1, m2);
}
