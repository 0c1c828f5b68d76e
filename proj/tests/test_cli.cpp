#include "cli.hpp"
#include "schema_validator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using cscb::cli::run_cli;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "cscb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cscb_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const cscb::testing::SchemaValidator& validator() {
  static const cscb::testing::SchemaValidator v(
      json::parse(slurp(CSCB_SCHEMA_PATH)));
  return v;
}

void expect_valid(const json& report) {
  const auto errors = validator().validate(report);
  for (const auto& e : errors) ADD_FAILURE() << e;
}

const std::vector<std::string> kWorked{
    "verify", "--k1", "1", "--k2", "1", "--a1", "3.1622776601", "--a2",
    "3.1622776601", "--modulus-sq", "0.5", "--base-scal", "0"};

TEST(Verify, WorkedInstancePasses) {
  const Outcome o = run(kWorked);
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out);
  EXPECT_TRUE(r["pass"].get<bool>());
  EXPECT_NEAR(r["results"]["R"].get<double>(), -4.242640687, 1e-9);
  EXPECT_EQ(r["results"]["branch"], "case2-elliptic");
  expect_valid(r);
}

TEST(Verify, RoundSphereJoin) {
  const Outcome o = run({"verify", "--k1", "1", "--k2", "1", "--a1", "0", "--a2", "0",
                         "--gamma", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out);
  EXPECT_NEAR(r["results"]["R"].get<double>(), 6.0, 1e-12);
  EXPECT_EQ(r["results"]["branch"], "flat");
}

TEST(Verify, InadmissibleModulusExitsTwo) {
  const Outcome o = run({"verify", "--k1", "1", "--k2", "1", "--a1", "1", "--a2", "2",
                         "--modulus-sq", "0.5"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("inadmissible modulus"), std::string::npos) << o.err;
}

TEST(Verify, PerturbedGammaFailsTolerance) {
  const Outcome o = run({"verify", "--k1", "1", "--k2", "1", "--a1", "3.1622776601",
                         "--a2", "3.1622776601", "--modulus-sq", "0.5", "--gamma", "1.2"});
  EXPECT_EQ(o.code, 1);
  EXPECT_FALSE(json::parse(o.out)["pass"].get<bool>());
}

TEST(Verify, ToleranceOverrideCanFail) {
  std::vector<std::string> args = kWorked;
  args.insert(args.end(), {"--tol-residual", "1e-20"});
  EXPECT_EQ(run(args).code, 1);
  args = kWorked;
  args.insert(args.end(), {"--tol-bogus", "1"});
  EXPECT_EQ(run(args).code, 2);
}

TEST(Verify, InvalidInputs) {
  EXPECT_EQ(run({"verify", "--k1", "0", "--k2", "1", "--a1", "1", "--a2", "1"}).code, 2);
  EXPECT_EQ(run({"verify", "--k1", "1", "--k2", "1", "--a1", "-1", "--a2", "1"}).code, 2);
  EXPECT_EQ(run({"verify", "--k1", "1", "--k2", "1", "--a1", "1"}).code, 2);
  EXPECT_EQ(run({"verify", "--k1", "abc"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"verify", "--help"}).code, 0);
}

TEST(Verify, DeterministicBytes) {
  std::vector<std::string> args = kWorked;
  args.insert(args.end(), {"--random-points", "64", "--seed", "9"});
  const Outcome a = run(args);
  const Outcome b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Verify, ReportRoundTrips) {
  std::vector<std::string> args = kWorked;
  args.insert(args.end(), {"--random-points", "32", "--seed", "4", "--tol-residual", "1e-9"});
  const Outcome first = run(args);
  ASSERT_EQ(first.code, 0);
  const json report = json::parse(first.out);
  const auto cfg = cscb::cli::config_from_report(report);
  const auto again = cscb::cli::run(cfg);
  EXPECT_EQ(cscb::cli::dump_report(again.report), first.out);
}

TEST(Verify, SeriesAndCsv) {
  const fs::path series = scratch("series.csv");
  std::vector<std::string> args = kWorked;
  args.insert(args.end(), {"--series", series.string(), "--grid", "10"});
  ASSERT_EQ(run(args).code, 0);
  const std::string text = slurp(series);
  EXPECT_EQ(text.rfind("t,scal,deviation\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);

  args = kWorked;
  args.insert(args.end(), {"--format", "csv", "--grid", "5"});
  const Outcome o = run(args);
  EXPECT_EQ(o.out.rfind("t,scal,deviation\n", 0), 0u);
}

TEST(Verify, ConfigFileOverridesFlags) {
  const fs::path cfg = scratch("verify.cfg");
  std::ofstream(cfg) << "# worked instance\nk1 = 1\nk2=1\na1=3.1622776601\n"
                        "a2=3.1622776601\nmodulus-sq=0.5\ntol-residual=1e-9\n";
  const Outcome o = run({"verify", "--config", cfg.string(), "--modulus-sq", "0.9"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out);
  EXPECT_DOUBLE_EQ(r["params"]["modulus-sq"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(r["tolerances"]["residual"].get<double>(), 1e-9);

  std::ofstream(cfg) << "unknown=1\n";
  EXPECT_EQ(run({"verify", "--config", cfg.string()}).code, 2);
  std::ofstream(cfg) << "k1\n";
  EXPECT_EQ(run({"verify", "--config", cfg.string()}).code, 2);
  EXPECT_EQ(run({"verify", "--config", scratch("missing.cfg").string()}).code, 2);
}

TEST(Families, TwoFamilyFiles) {
  const fs::path dir = scratch("fam_21");
  fs::remove_all(dir);
  const Outcome o = run({"families", "--k1", "1", "--k2", "1", "--a1", "2", "--a2", "1",
                         "--out", dir.string(), "--points", "20"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json summary = json::parse(slurp(dir / "summary.json"));
  expect_valid(summary);
  EXPECT_EQ(summary["results"]["family_count"], 2);
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") {
      ++csvs;
      EXPECT_EQ(slurp(e.path()).rfind("branch,k,gamma,T,R,residual\n", 0), 0u);
    }
  }
  EXPECT_EQ(csvs, 2);
}

TEST(Families, FlatFamily) {
  const fs::path dir = scratch("fam_00");
  fs::remove_all(dir);
  ASSERT_EQ(run({"families", "--k1", "1", "--k2", "2", "--a1", "0", "--a2", "0", "--out",
                 dir.string(), "--points", "10"})
                .code,
            0);
  const json summary = json::parse(slurp(dir / "summary.json"));
  ASSERT_EQ(summary["results"]["family_count"], 1);
  const std::string table =
      slurp(dir / summary["results"]["families"][0]["file"].get<std::string>());
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) EXPECT_EQ(line.rfind("flat,0,", 0), 0u) << line;
}

TEST(Families, TailIncreases) {
  const fs::path dir = scratch("fam_13");
  fs::remove_all(dir);
  ASSERT_EQ(run({"families", "--k1", "1", "--k2", "3", "--a1", "1", "--a2", "1", "--out",
                 dir.string(), "--points", "40"})
                .code,
            0);
  const json summary = json::parse(slurp(dir / "summary.json"));
  bool checked = false;
  for (const auto& f : summary["results"]["families"]) {
    if (f["branch"] != "case2-elliptic") continue;
    std::istringstream in(slurp(dir / f["file"].get<std::string>()));
    std::string line;
    std::getline(in, line);
    std::vector<double> R;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      R.push_back(std::stod(cells[4]));
    }
    for (std::size_t i = R.size() - 8; i < R.size(); ++i) EXPECT_GT(R[i], R[i - 1]);
    EXPECT_EQ(f["limit_probes"][0]["observed"], "+inf");
    checked = true;
  }
  EXPECT_TRUE(checked);
}

TEST(Families, RequiresOutputDirectory) {
  EXPECT_EQ(run({"families", "--k1", "1", "--k2", "1", "--a1", "2", "--a2", "1"}).code, 2);
}

TEST(Count, BundleForm) {
  const Outcome o = run({"count", "--m", "2", "--k", "3", "--a", "0", "--r", "2", "--l", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out);
  expect_valid(r);
  EXPECT_GE(r["results"]["count"].get<int>(), 2);
  EXPECT_TRUE(r["results"]["multiplicity_predicate"]["holds"].get<bool>());
}

TEST(Count, UniquenessRegime) {
  const Outcome o = run({"count", "--d", "1", "--n", "3", "--R", "1.9", "--r", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(json::parse(o.out)["results"]["count"], 1);
}

TEST(Count, NonPositiveScalarExitsTwo) {
  const Outcome o = run({"count", "--d", "1", "--n", "3", "--R", "-1", "--r", "1"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("only constant solutions when R(g) <= 0"), std::string::npos);
  // a large O'Neill constant drives the bundle scalar curvature negative
  EXPECT_EQ(run({"count", "--m", "2", "--k", "3", "--a", "5", "--r", "2"}).code, 2);
  EXPECT_EQ(run({"count", "--m", "2", "--k", "3", "--r", "2", "--factor", "x"}).code, 2);
}

TEST(Count, CsvTable) {
  const Outcome o = run({"count", "--d", "1", "--n", "3", "--R", "2.5", "--r", "1",
                         "--format", "csv"});
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(o.out.rfind("alpha,boundary_residual,", 0), 0u);
  EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 4);
}

TEST(Thresholds, Margins) {
  Outcome o = run({"thresholds", "--m", "2", "--k", "3", "--r", "1", "--a", "0"});
  ASSERT_EQ(o.code, 0);
  json r = json::parse(o.out);
  expect_valid(r);
  EXPECT_TRUE(r["results"]["product"]["uniqueness_fiber"]["holds"].get<bool>());
  EXPECT_DOUBLE_EQ(r["results"]["product"]["uniqueness_fiber"]["margin"].get<double>(), 2.0);

  o = run({"thresholds", "--m", "2", "--k", "3", "--r", "2", "--l", "1", "--a", "0"});
  r = json::parse(o.out);
  EXPECT_TRUE(r["results"]["product"]["multiplicity_fiber"]["holds"].get<bool>());
  EXPECT_DOUBLE_EQ(r["results"]["product"]["multiplicity_fiber"]["margin"].get<double>(), 2.0);
}

// The flip of predicate (3) along the sweep must bracket the root of
// -a^2 r^2 + k(k-1)/r^2 - (l(l+m-1)(m+k-1) - m(m-1)), found by bisection.
TEST(Thresholds, SweepFlipsAtMarginRoot) {
  const int m = 2, k = 3, l = 1;
  const double a = 1.0;
  auto margin = [&](double r) {
    return -a * a * r * r + k * (k - 1) / (r * r) -
           (l * (l + m - 1) * (m + k - 1) - m * (m - 1.0));
  };
  double lo = 0.2, hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) > 0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);

  const Outcome o = run({"thresholds", "--m", "2", "--k", "3", "--a", "1", "--r", "1",
                         "--l", "1", "--r-min", "0.2", "--r-max", "3", "--r-steps", "281"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json flips = json::parse(o.out)["results"]["sweep"]["flips"];
  ASSERT_EQ(flips.size(), 1u);
  EXPECT_LT(flips[0][0].get<double>(), root);
  EXPECT_GE(flips[0][1].get<double>(), root);
}

TEST(Thresholds, InvalidSweep) {
  EXPECT_EQ(run({"thresholds", "--m", "2", "--k", "3", "--r", "1", "--r-min", "2",
                 "--r-max", "1"})
                .code,
            2);
  EXPECT_EQ(run({"thresholds", "--m", "1", "--k", "1", "--r", "1"}).code, 2);
}

TEST(Output, WritesToFile) {
  const fs::path out = scratch("report.json");
  std::vector<std::string> args = kWorked;
  args.insert(args.end(), {"--out", out.string()});
  const Outcome o = run(args);
  ASSERT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
  EXPECT_EQ(slurp(out), run(kWorked).out);
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(cscb::cli::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(cscb::cli::format_double(-4.0), "-4");
  EXPECT_EQ(std::stod(cscb::cli::format_double(std::sqrt(2.0))), std::sqrt(2.0));
}

TEST(Schema, RejectsMalformedReports) {
  json r = json::parse(run(kWorked).out);
  EXPECT_TRUE(validator().validate(r).empty());
  r["schema"] = "csc-bundles/0";
  EXPECT_FALSE(validator().validate(r).empty());
  r = json::parse(run(kWorked).out);
  r["results"].erase("gamma");
  EXPECT_FALSE(validator().validate(r).empty());
  r = json::parse(run(kWorked).out);
  r.erase("pass");
  EXPECT_FALSE(validator().validate(r).empty());
}

}  // namespace
