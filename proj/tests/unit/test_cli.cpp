#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "swapsim/io.hpp"
#include "swapsim/metrics.hpp"
#include "swapsim/tomography.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const std::string kCli = SWAPSIM_CLI_PATH;
const std::string kPaper = std::string(SWAPSIM_CONFIG_DIR) + "/paper.ini";
const std::string kIdeal = std::string(SWAPSIM_CONFIG_DIR) + "/ideal.ini";

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("swapsim_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun invoke(const std::string& args, const std::string& env = "") const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = env + " '" + kCli + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = swapsim::read_file(out.string());
    r.err = swapsim::read_file(err.string());
    return r;
  }

  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

  static Json load(const std::string& path) { return Json::parse(swapsim::read_file(path)); }

  static Json without_timestamps(Json j) {
    j["manifest"].erase("timestamps");
    return j;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ZeroPulsesIsUsageError) {
  const auto r = invoke("hom --config '" + kPaper + "' --pulses 0 --out '" + out("o") + "'");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--pulses"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out("o") + "/hom.json"));
}

TEST_F(CliTest, MissingSubcommandOrModeIsUsageError) {
  EXPECT_NE(invoke("").code, 0);
  EXPECT_NE(invoke("swap --config '" + kPaper + "'").code, 0);
  EXPECT_NE(invoke("swap --scan --tomo --config '" + kPaper + "'").code, 0);
}

TEST_F(CliTest, MissingKeyNamesField) {
  std::string ini = swapsim::read_file(kPaper);
  const std::string key = "pump_bandwidth_ghz = 24.4\n";
  ini.erase(ini.find(key), key.size());
  swapsim::write_file(out("broken.ini"), ini);
  const auto r = invoke("herald --config '" + out("broken.ini") + "' --out '" + out("o") + "'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("heralding.pump_bandwidth_ghz"), std::string::npos) << r.err;
}

TEST_F(CliTest, EmptyScanAsksForMorePulses) {
  const auto r = invoke("swap --scan --config '" + kIdeal + "' --pulses 10 --out '" + out("o") + "'");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("increase --pulses"), std::string::npos) << r.err;
}

TEST_F(CliTest, HeraldTable) {
  const auto r = invoke("herald --config '" + kPaper + "' --out '" + out("o") + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("17.39%"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("34.78%"), std::string::npos) << r.out;
  const auto j = load(out("o/herald.json"));
  EXPECT_NEAR(j["rows"][0]["expected"].get<double>(), 0.0296, 5e-5);
  EXPECT_NEAR(j["rows"][1]["expected"].get<double>(), 0.166, 5e-4);
  EXPECT_EQ(std::lround(100 * j["rows"][0]["coupling"].get<double>()), 66);
  EXPECT_EQ(std::lround(100 * j["rows"][1]["coupling"].get<double>()), 35);
  EXPECT_EQ(j["manifest"]["config"]["path"], kPaper);
}

TEST_F(CliTest, HomOutputsAndReproducibility) {
  const std::string args = "hom --config '" + kPaper + "' --pulses 1e12 --seed 4 --out '" + out("o") + "'";
  ASSERT_EQ(invoke(args).code, 0);
  const auto first = load(out("o/hom.json"));
  ASSERT_EQ(invoke(args).code, 0);
  EXPECT_EQ(without_timestamps(load(out("o/hom.json"))), without_timestamps(first));
  EXPECT_LE(first["V"].get<double>(), 1.0 / 3.0);
  EXPECT_GT(first["V"].get<double>(), 0.2);

  std::ifstream curve(out("o/hom_curve.csv"));
  const auto t = swapsim::read_csv(curve);
  EXPECT_EQ(t.rows.size(), 11u);
  EXPECT_EQ(t.header[1], "distinguishability");
}

TEST_F(CliTest, ScanIsByteIdenticalApartFromTimestamps) {
  const std::string args = "swap --scan --config '" + kPaper + "' --pulses 1e13 --seed 9 --out '" + out("o") + "'";
  ASSERT_EQ(invoke(args).code, 0);
  const std::string a = swapsim::read_file(out("o/scan.json"));
  const std::string csv_a = swapsim::read_file(out("o/scan.csv"));
  ASSERT_EQ(invoke(args).code, 0);
  EXPECT_EQ(without_timestamps(Json::parse(a)), without_timestamps(load(out("o/scan.json"))));
  EXPECT_EQ(csv_a, swapsim::read_file(out("o/scan.csv")));
  // Only the timestamp lines may differ in the raw text.
  std::istringstream la(a), lb(swapsim::read_file(out("o/scan.json")));
  std::string x, y;
  while (std::getline(la, x) && std::getline(lb, y)) {
    if (x != y) {
      EXPECT_TRUE(x.find("\"started\"") != std::string::npos || x.find("\"finished\"") != std::string::npos) << x;
    }
  }

  const auto j = load(out("o/scan.json"));
  EXPECT_GT(j["fit"]["V"].get<double>(), 1.0 / 3.0);
  std::ifstream scan(out("o/scan.csv"));
  EXPECT_EQ(swapsim::read_csv(scan).rows.size(), 12u);
  std::ifstream records(out("o/records.csv"));
  EXPECT_EQ(swapsim::read_csv(records).rows.size(), 12u * 32u);
}

TEST_F(CliTest, IdealTomographyRoundTrip) {
  ASSERT_EQ(invoke("swap --tomo --config '" + kIdeal + "' --pulses 1e10 --workers 4 --out '" + out("o") + "'").code, 0);
  const auto tomo = load(out("o/tomo.json"));
  EXPECT_NEAR(tomo["analysis"]["concurrence"].get<double>(), 1.0, 0.01);
  EXPECT_EQ(tomo["analysis"]["werner"]["psi_bell"], "PsiPlus");

  std::ifstream csv(out("o/tomography.csv"));
  const auto data = swapsim::read_tomography_csv(csv);
  ASSERT_EQ(data.size(), 36u);

  ASSERT_EQ(invoke("reconstruct --data '" + out("o/tomography.csv") + "' --out '" + out("r") + "'").code, 0);
  const auto rec = load(out("r/reconstruct.json"));
  EXPECT_EQ(rec["mle"]["rho"], tomo["mle"]["rho"]);
  EXPECT_EQ(rec["rows"], 36);
}

TEST_F(CliTest, SingleValueSweepMatchesTomo) {
  const std::string common = " --config '" + kPaper + "' --pulses 1e12 --seed 5 --workers 4";
  ASSERT_EQ(invoke("swap --tomo" + common + " --out '" + out("t") + "'").code, 0);
  ASSERT_EQ(invoke("sweep --param mu --values 0.191" + common + " --out '" + out("s") + "'").code, 0);
  const auto tomo = load(out("t/tomo.json"));
  const auto sweep = load(out("s/sweep.json"));
  EXPECT_EQ(sweep["rows"][0]["mle"]["rho"], tomo["mle"]["rho"]);
  EXPECT_EQ(sweep["rows"][0]["analysis"]["concurrence"], tomo["analysis"]["concurrence"]);
  std::ifstream csv(out("s/sweep.csv"));
  const auto t = swapsim::read_csv(csv);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header, (std::vector<std::string>{"param", "value", "concurrence", "fidelity", "visibility", "counts"}));
}

TEST_F(CliTest, WorkersFromEnvironment) {
  ASSERT_EQ(invoke("herald --config '" + kPaper + "' --out '" + out("o") + "'", "SWAPSIM_WORKERS=3").code, 0);
  EXPECT_EQ(load(out("o/herald.json"))["manifest"]["workers"], 3);
  ASSERT_EQ(invoke("herald --workers 2 --config '" + kPaper + "' --out '" + out("o") + "'", "SWAPSIM_WORKERS=3").code, 0);
  EXPECT_EQ(load(out("o/herald.json"))["manifest"]["workers"], 2);
}

TEST_F(CliTest, ClickTrace) {
  ASSERT_EQ(invoke("swap --scan --config '" + kIdeal + "' --pulses 1e10 --trace '" + out("trace.csv") +
                "' --trace-pulses 20000 --out '" + out("o") + "'")
                .code,
            0);
  std::ifstream in(out("trace.csv"));
  const auto t = swapsim::read_csv(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"pulse", "detector", "bin"}));
  EXPECT_GT(t.rows.size(), 0u);
  for (const auto& row : t.rows) {
    EXPECT_LT(std::stoull(row[0]), 20000u);
    EXPECT_TRUE(row[1] == "A+" || row[1] == "A-" || row[1] == "D+" || row[1] == "D-" || row[1] == "BSM1" ||
                row[1] == "BSM2");
  }
}
