#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("infodesign_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "infodesign");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return infodesign::cli::main_entry(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  json result(const fs::path& out) {
    std::ifstream in(out / "result.json");
    return json::parse(in);
  }

  std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

const char* kBoundary = R"({"scenarios": {"kind": "discrete", "scenarios": [
  {"weight": 0.5, "a": [1, 1], "b": [2, 0]}, {"weight": 0.5, "a": [1, 1], "b": [0, 2]}]}})";

}  // namespace

TEST_F(CliTest, DesignOnTwoPointBoundary) {
  const auto cfg = write("c.json", kBoundary);
  ASSERT_EQ(run({"design", "--config", cfg.string(), "--out", (dir_ / "o").string()}), 0) << err_.str();
  const auto r = result(dir_ / "o");
  EXPECT_NEAR(r["result"]["poa"].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(r["result"]["program"], "two-link");
  EXPECT_TRUE(r.contains("metadata"));
  EXPECT_EQ(r["config"]["solver"]["restarts"], 16);  // defaults are echoed
  EXPECT_TRUE(fs::exists(dir_ / "o" / "plot.csv"));
}

TEST_F(CliTest, MalformedConfigExitsWithTwo) {
  const auto cfg = write("bad.json", "{\"scenarios\": [1, 2");
  EXPECT_EQ(run({"design", "--config", cfg.string(), "--out", dir_.string()}), 2);
  const auto e = json::parse(err_.str());
  EXPECT_EQ(e["error"]["code"], "ConfigParse");
  EXPECT_EQ(e["error"]["exit_code"], 2);
}

TEST_F(CliTest, ConfigAndUsageErrors) {
  const auto cfg = write("c.json", kBoundary);
  EXPECT_EQ(run({"teleport", "--config", cfg.string()}), 2);
  EXPECT_EQ(run({"design"}), 2);
  EXPECT_EQ(run({"design", "--config", (dir_ / "missing.json").string()}), 3);
  EXPECT_EQ(json::parse(err_.str())["error"]["code"], "FileIO");
  const auto typo = write("t.json", R"({"scenario": {}})");
  EXPECT_EQ(run({"design", "--config", typo.string()}), 2);
  const auto neg = write("n.json", R"({"scenarios": {"kind": "discrete", "scenarios": [{"a": [-1, 1], "b": [0, 0]}]}})");
  EXPECT_EQ(run({"design", "--config", neg.string(), "--out", dir_.string()}), 2);
  EXPECT_EQ(json::parse(err_.str())["error"]["code"], "NegativeCoefficient");
}

TEST_F(CliTest, SolverFailureExitsWithOne) {
  const auto cfg = write("c.json", R"({"scenarios": {"kind": "discrete", "scenarios": [
      {"weight": 0.3, "a": [1, 2, 0.5], "b": [0.4, 0, 0.1]}, {"weight": 0.7, "a": [0.2, 1, 3], "b": [0, 1, 0.5]}]},
      "policy": [[0.2, 0.5, 0.3], [0.6, 0.1, 0.3]],
      "solver": {"max_iterations": 1, "tolerance": 1e-14}})");
  EXPECT_EQ(run({"solve-bue", "--config", cfg.string(), "--out", dir_.string()}), 1);
  EXPECT_EQ(json::parse(err_.str())["error"]["code"], "SolverDivergence");
}

TEST_F(CliTest, RerunsAreByteIdenticalOutsideMetadata) {
  const auto cfg = write("c.json", R"({
    "graph": {"edges": [{"id": "ou", "tail": "o", "head": "u"}, {"id": "ov", "tail": "o", "head": "v"},
                        {"id": "uv", "tail": "u", "head": "v"}, {"id": "ud", "tail": "u", "head": "d"},
                        {"id": "vd", "tail": "v", "head": "d"}], "origin": "o", "destination": "d"},
    "scenarios": {"kind": "monte-carlo", "n": 4, "sampler": {"type": "uniform-box",
      "a_low": [0.5, 0.1, 0, 0.1, 0.5], "a_high": [1.5, 0.2, 0, 0.2, 1.5],
      "b_low": [0, 0.5, 0, 0.5, 0], "b_high": [0, 1.5, 0, 1.5, 0]}},
    "seed": 5, "solver": {"restarts": 3}})");
  ASSERT_EQ(run({"design", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 0) << err_.str();
  ASSERT_EQ(run({"design", "--config", cfg.string(), "--out", (dir_ / "b").string()}), 0) << err_.str();
  auto a = result(dir_ / "a");
  auto b = result(dir_ / "b");
  a.erase("metadata");
  b.erase("metadata");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["seed"], 5);
  EXPECT_EQ(a["config"]["scenarios"]["seed"], 5);
  EXPECT_EQ(read(dir_ / "a" / "plot.csv"), read(dir_ / "b" / "plot.csv"));
}

TEST_F(CliTest, FlagsWinOverFile) {
  const auto cfg = write("c.json", R"({"scenarios": {"kind": "monte-carlo", "n": 3, "seed": 1,
      "sampler": {"type": "uniform-box", "a_low": [1, 1], "a_high": [2, 2], "b_low": [0, 0], "b_high": [1, 1]}},
      "solver": {"restarts": 2, "tolerance": 1e-9}})");
  ASSERT_EQ(run({"solve-sysopt", "--config", cfg.string(), "--out", dir_.string(), "--seed", "77", "--restarts", "5",
                 "--tol", "1e-10"}),
            0)
      << err_.str();
  const auto r = result(dir_);
  EXPECT_EQ(r["seed"], 77);
  EXPECT_EQ(r["config"]["scenarios"]["seed"], 77);
  EXPECT_EQ(r["config"]["solver"]["restarts"], 5);
  EXPECT_EQ(r["config"]["solver"]["tolerance"], 1e-10);
}

TEST_F(CliTest, SweepCsvContract) {
  const auto cfg = write("s.json", R"({"sweep": {"a1": {"min": 0.01, "max": 0.49, "step": 0.04},
      "a2": {"min": 0.01, "max": 0.49, "step": 0.04}, "a1_le_a2": true}})");
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", dir_.string()}), 0) << err_.str();
  std::ifstream csv(dir_ / "plot.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "a1,a2,g_poly,h_poly,lhs1,lhs2,poa");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    ASSERT_GE(cells.size(), 6u);
    EXPECT_LE(std::stod(cells[0]), std::stod(cells[1]));
    EXPECT_LE(std::stod(cells[2]), 0.0);
    EXPECT_LE(std::stod(cells[3]), 0.0);
  }
  EXPECT_EQ(rows, 13 * 14 / 2);
  EXPECT_TRUE(result(dir_)["result"]["polynomials_nonpositive"].get<bool>());
}

TEST_F(CliTest, EmptySweepGivesHeaderOnly) {
  const auto cfg = write("s.json", R"({"sweep": {"a1": {"min": 1, "max": 0, "step": 0.1},
      "a2": {"min": 0.1, "max": 0.2, "step": 0.1}}})");
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", dir_.string()}), 0) << err_.str();
  EXPECT_EQ(read(dir_ / "plot.csv"), "a1,a2,g_poly,h_poly,lhs1,lhs2,poa\n");
}

TEST_F(CliTest, SweepDesignFillsPoaColumn) {
  const auto cfg = write("s.json", R"({"sweep": {"a1": {"min": 0.3, "max": 0.6, "step": 0.3},
      "a2": {"min": 0.5, "max": 0.5, "step": 0.1}, "command": "design"}, "grid_n": 40})");
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", dir_.string()}), 0) << err_.str();
  const auto r = result(dir_);
  EXPECT_EQ(r["result"]["points"], 2);
  EXPECT_LE(r["result"]["max_poa"].get<double>(), 1.0 + 1e-3);
}

TEST_F(CliTest, SingleScenarioDesignPlotHasOneRow) {
  const auto cfg = write("p.json", R"({"scenarios": {"kind": "discrete", "scenarios": [{"a": [1, 2], "b": [0.5, 0]}]}})");
  ASSERT_EQ(run({"design", "--config", cfg.string(), "--out", dir_.string()}), 0) << err_.str();
  const auto csv = read(dir_ / "plot.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.rfind("scenario,weight,pi1,pi2,cost\n", 0), 0u);
}

TEST_F(CliTest, CsvUsesTwelveSignificantDigits) {
  infodesign::cli::PlotTable t{{"v"}, {{1.0 / 3.0}, {2.0}, {1e-20 / 3.0}}};
  std::ostringstream os;
  infodesign::cli::write_csv(t, os);
  EXPECT_EQ(os.str(), "v\n0.333333333333\n2\n3.33333333333e-21\n");
}

TEST_F(CliTest, CheckTheoremsAndPoa) {
  const auto cfg = write("c.json", R"({"scenarios": {"kind": "discrete", "scenarios": [{"a": [1, 0], "b": [0, 1]}]}})");
  ASSERT_EQ(run({"check-theorems", "--config", cfg.string(), "--out", (dir_ / "t").string()}), 0) << err_.str();
  EXPECT_EQ(result(dir_ / "t")["result"]["thm2"]["conclusion"], "not-optimal");
  ASSERT_EQ(run({"poa", "--config", cfg.string(), "--out", (dir_ / "p").string()}), 0) << err_.str();
  EXPECT_NEAR(result(dir_ / "p")["result"]["full_information_poa"].get<double>(), 4.0 / 3.0, 1e-9);
}
