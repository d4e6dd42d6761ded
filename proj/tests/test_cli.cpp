#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kdvb/cli.hpp"

namespace fs = std::filesystem;
using namespace kdvb;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("kdvb_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "kdvb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const std::string& p) { return read_file(p); }

}  // namespace

TEST(Cli, SolveZeroDataStaysZero) {
  TempDir d;
  ASSERT_EQ(run({"--out", d / "z", "--grid-n", "64", "solve", "--data", "zero", "--t-final", "0.05", "--dt", "0.01"}), 0);
  const auto snaps = decode_snapshots(slurp(d / "z_snapshots.bin"));
  ASSERT_FALSE(snaps.empty());
  for (const auto& s : snaps)
    for (const auto& c : s.field.coeffs) EXPECT_EQ(c, cplx(0.0));
}

TEST(Cli, RunsAreByteIdentical) {
  TempDir d;
  const std::vector<std::string> a = {"--grid-n", "64", "--seed", "7", "solve", "--t-final", "0.05"};
  auto first = a, second = a;
  first.insert(first.begin(), {"--out", d / "a"});
  second.insert(second.begin(), {"--out", d / "b"});
  ASSERT_EQ(run(first), 0);
  ASSERT_EQ(run(second), 0);
  EXPECT_EQ(slurp(d / "a.csv"), slurp(d / "b.csv"));
  EXPECT_EQ(slurp(d / "a_snapshots.bin"), slurp(d / "b_snapshots.bin"));
  std::string other = d / "c";
  ASSERT_EQ(run({"--out", other, "--grid-n", "64", "--seed", "8", "solve", "--t-final", "0.05"}), 0);
  EXPECT_NE(slurp(d / "a_snapshots.bin"), slurp(d / "c_snapshots.bin"));
}

TEST(Cli, HeaderCarriesSeedAndHash) {
  TempDir d;
  ASSERT_EQ(run({"--out", d / "h", "--format", "json", "--grid-n", "64", "--seed", "11", "solve", "--t-final", "0.02"}), 0);
  const auto j = nlohmann::json::parse(slurp(d / "h.json"));
  EXPECT_EQ(j["header"]["seed"].get<std::uint64_t>(), 11u);
  EXPECT_EQ(j["header"]["config_hash"].get<std::string>().size(), 16u);
}

TEST(Cli, ConfigFileAndOverride) {
  TempDir d;
  {
    std::ofstream f(d / "run.toml");
    f << "grid-n = 64\nseed = 3\n[solve]\nt-final = 0.02\n";
  }
  ASSERT_EQ(run({"--config", d / "run.toml", "--out", d / "x", "solve"}), 0);
  ASSERT_EQ(run({"--config", d / "run.toml", "--out", d / "y", "--seed", "3", "solve"}), 0);
  EXPECT_EQ(slurp(d / "x.csv"), slurp(d / "y.csv"));
}

TEST(Cli, BadConfigIsUsageError) {
  TempDir d;
  {
    std::ofstream f(d / "bad.toml");
    f << "no-such-key = 4\n";
  }
  EXPECT_EQ(run({"--config", d / "bad.toml", "solve"}), 1);
  EXPECT_EQ(run({"--config", d / "missing.toml", "solve"}), 1);
  EXPECT_EQ(run({"solve", "--dt", "abc"}), 1);
  EXPECT_EQ(run({}), 1);
}

TEST(Cli, OutOfRangeParametersAreUsageErrors) {
  TempDir d;
  EXPECT_EQ(run({"--out", d / "n", "--grid-n", "64", "inflate", "--N", "600"}), 1);
  EXPECT_EQ(run({"--out", d / "a", "--alpha", "1.5", "solve"}), 1);
  EXPECT_EQ(run({"--out", d / "g", "--grid-n", "100", "solve"}), 1);
  EXPECT_EQ(run({"--out", d / "r", "multiplier", "--mode", "lemma32", "--rho", "1.0"}), 1);
}

TEST(Cli, EmptyMultiplierSweep) {
  TempDir d;
  std::string out;
  EXPECT_EQ(run({"--out", d / "m", "multiplier", "--n-lo", "3", "--n-hi", "2"}, &out), 0);
  EXPECT_NE(out.find("0"), std::string::npos);
}

TEST(Cli, PicardReportsContraction) {
  TempDir d;
  std::string out;
  ASSERT_EQ(run({"--out", d / "p", "--grid-n", "32", "picard", "--T", "0.1", "--k", "3", "--dt", "0.01"}, &out), 0);
  EXPECT_NE(slurp(d / "p.csv").find("distance"), std::string::npos);
}

TEST(Cli, SnapshotRoundTrip) {
  const Grid1D g(16, 2);
  SpectralField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = cplx(0.1 * i, -1.0 / (i + 1));
  const auto snaps = decode_snapshots(encode_snapshot(f, 0.25) + encode_snapshot(f, 0.5));
  ASSERT_EQ(snaps.size(), 2u);
  EXPECT_EQ(snaps[1].t, 0.5);
  EXPECT_EQ(snaps[0].field.grid.half_width(), 2.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(snaps[0].field[i], f[i]);
}

TEST(Cli, ConfigSectionSelectsSubcommand) {
  TempDir d;
  {
    std::ofstream f(d / "run.toml");
    f << "grid-n = 64\nout = \"" << (d / "sec") << "\"\n[solve]\nt-final = 0.02\n";
  }
  ASSERT_EQ(run({"--config", d / "run.toml"}), 0);
  EXPECT_NE(slurp(d / "sec.csv").find("t_final = 0.02"), std::string::npos);
}
