#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPCA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path out_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spca_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("verify --family barrier --d 50 --delta 0.1 --gamma 0.2 -o " + out_dir("ok").string()), 0);
  EXPECT_EQ(run_cli("run --config /nonexistent.cfg -o " + out_dir("io").string()), 3);
  EXPECT_EQ(run_cli("run --bogus_key 3 -o " + out_dir("param").string()), 1);
  EXPECT_EQ(run_cli("verify --family covthresh --s 4 --u 1000 --tau 0.02 -o " + out_dir("pre").string()), 1);
  EXPECT_EQ(run_cli("verify --family greedycorr --s 2 -o " + out_dir("cert").string()), 2);
  EXPECT_EQ(run_cli("frobnicate"), 1);
}

TEST(Cli, OutputsAndManifestRerun) {
  const fs::path a = out_dir("run_a"), b = out_dir("run_b");
  ASSERT_EQ(run_cli("run --family spiked --d 30 --s 3 --gamma 0.4 --n 300 --seeds 2 --T 5 --seed 4 --threads 2 -o " +
                    a.string()),
            0);
  for (const char* f : {"records.csv", "manifest.txt", "summary.json"}) EXPECT_TRUE(fs::exists(a / f)) << f;
  const std::string csv = slurp(a / "records.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "algorithm,family,d,s,k,gamma,delta,n,seed,mode,r,T,metric,value,wall_ms,iterations_used,flags");
  ASSERT_EQ(run_cli("run --config " + (a / "manifest.txt").string() + " -o " + b.string()), 0);
  EXPECT_EQ(slurp(b / "records.csv"), csv);
  EXPECT_NE(slurp(a / "summary.json").find("config_hash"), std::string::npos);
}

TEST(Cli, KeyValueOverrideForms) {
  const fs::path a = out_dir("kv_a"), b = out_dir("kv_b");
  ASSERT_EQ(run_cli("run family=spiked d=20 s=2 gamma=0.5 n=100 seeds=1 T=3 -o " + a.string()), 0);
  ASSERT_EQ(run_cli("run --family=spiked --set d=20 --s 2 --gamma 0.5 --n 100 --seeds 1 --T 3 -o " + b.string()), 0);
  EXPECT_EQ(slurp(a / "records.csv"), slurp(b / "records.csv"));
}

TEST(Cli, GenWritesInstanceAndDataset) {
  const fs::path a = out_dir("gen");
  ASSERT_EQ(run_cli("gen --family greedycorr --s 4 --n 20 -o " + a.string()), 0);
  EXPECT_TRUE(fs::exists(a / "instance.spcx"));
  EXPECT_TRUE(fs::exists(a / "dataset.bin"));
}
