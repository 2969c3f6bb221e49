#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "tve/diagnostics.hpp"

using namespace tve;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const char* name) { return (fs::path(TVE_SOURCE_DIR) / "scenarios" / name).string(); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tve_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::vector<double>> read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const Result r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("check-constitutive"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  const Result r = cli({"run", "--scenario", scenario("homogeneous.json"), "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(cli({"run"}).code, 2);
}

TEST(Cli, InvalidValuesExitTwo) {
  EXPECT_EQ(cli({"check-constitutive", "--p", "1.5", "--samples", "10"}).code, 2);
  EXPECT_EQ(cli({"run", "--scenario", scenario("homogeneous.json"), "--variant", "odd"}).code, 2);
  EXPECT_EQ(cli({"compare-variants", "--scenario", scenario("inhomogeneous.json"), "--out", scratch("cmp").string()}).code, 2);
}

TEST(Cli, MissingScenarioIsInvalidInput) {
  EXPECT_EQ(cli({"run", "--scenario", "/nonexistent/scenario.json"}).code, 2);
}

TEST(Cli, RuntimeErrorsExitOne) {
  EXPECT_EQ(cli({"basis", "--scenario", scenario("homogeneous.json"), "--k", "2", "--l", "2", "--out", "/dev/null/sub"}).code, 1);
}

TEST(Cli, CheckConstitutive) {
  const Result r = cli({"check-constitutive", "--p", "3", "--samples", "2000"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("monotonicity_violations = 0"), std::string::npos);
  EXPECT_NE(r.out.find("admissible = true"), std::string::npos);
}

TEST(Cli, BasisWritesCacheAndReport) {
  const fs::path dir = scratch("basis");
  const Result r = cli({"basis", "--scenario", scenario("homogeneous.json"), "--out", dir.string(), "--k", "4", "--l", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "basis.bin"));
  EXPECT_NE(read_file(dir / "basis_report.txt").find("valid = 1"), std::string::npos);
}

TEST(Cli, RunOutputsAreCompleteAndReproducible) {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const std::vector<std::string> base{"run", "--scenario", scenario("homogeneous.json"), "--k", "4", "--l", "4"};
  auto with_out = [&](const fs::path& d) {
    auto v = base;
    v.push_back("--out");
    v.push_back(d.string());
    return v;
  };
  const Result ra = cli(with_out(a));
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(cli(with_out(b)).code, 0);
  for (const char* f : {"energy.csv", "bounds.csv", "trajectory.csv", "report.txt"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
  int dumps = 0;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".bin") {
      ++dumps;
      EXPECT_EQ(read_file(e.path()), read_file(b / e.path().filename()));
      EXPECT_NO_THROW(decode_field_dump(read_file(e.path())));
    }
  EXPECT_EQ(dumps, 2);

  const auto rows = read_csv(a / "energy.csv");
  ASSERT_EQ(rows.size(), 101u);
  for (std::size_t j = 1; j < rows.size(); ++j) EXPECT_LE(rows[j][1], rows[j - 1][1] + 1e-12);
  const std::string report = read_file(a / "report.txt");
  EXPECT_NE(report.find("completed = 1"), std::string::npos);
  EXPECT_EQ(report.find("theory = none"), std::string::npos);
}

TEST(Cli, NonlinearRunIsFlagged) {
  const fs::path d = scratch("nonlinear");
  const Result r = cli({"run", "--scenario", scenario("homogeneous.json"), "--k", "3", "--l", "3", "--variant",
                        "nonlinear", "--out", d.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read_file(d / "report.txt").find("theory = none"), std::string::npos);
}

TEST(Cli, SeedChangesInitialPlasticStrain) {
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  const std::vector<std::string> base{"run", "--scenario", scenario("homogeneous.json"), "--k", "3", "--l", "3"};
  auto run = [&](const fs::path& d, const char* seed) {
    auto v = base;
    v.insert(v.end(), {"--out", d.string(), "--seed", seed});
    return cli(v).code;
  };
  ASSERT_EQ(run(a, "1"), 0);
  ASSERT_EQ(run(b, "2"), 0);
  EXPECT_NE(read_file(a / "trajectory.csv"), read_file(b / "trajectory.csv"));
}

TEST(Cli, CompareVariantsWritesReport) {
  const fs::path d = scratch("compare");
  const Result r = cli({"compare-variants", "--scenario", scenario("homogeneous.json"), "--k", "4", "--l", "4", "--out", d.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(d / "comparison.txt"));
}

TEST(Cli, MmsConstant) {
  const fs::path d = scratch("mms");
  EXPECT_EQ(cli({"mms", "--case", "constant", "--out", d.string()}).code, 0);
  EXPECT_TRUE(fs::exists(d / "mms_constant.csv"));
  EXPECT_EQ(cli({"mms", "--case", "nope"}).code, 2);
}
