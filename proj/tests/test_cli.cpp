#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "combtn/cli.hpp"

namespace fs = std::filesystem;
using namespace combtn;
using combtn::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Value column of the first line starting with `label`.
std::string field(const std::string& text, const std::string& label) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(label, 0) != 0) continue;
    std::istringstream cols(line.substr(label.size()));
    std::string v;
    cols >> v;
    return v;
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("combtn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

const std::vector<std::string> kExampleFlags{"--teeth", "50", "--tooth-len", "5", "--dim-raw", "100",
                                             "--dim-comp", "30", "--bond", "10"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST(CliCost, ExampleTable) {
  const auto r = run(with({"cost"}, kExampleFlags));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1519410"), std::string::npos);
  EXPECT_NE(r.out.find("1438010"), std::string::npos);
  EXPECT_NE(r.out.find("1443010"), std::string::npos);
  EXPECT_NE(r.out.find("81400"), std::string::npos);
  EXPECT_NE(r.out.find("76400"), std::string::npos);
}

TEST(CliCost, PrintedBasis) {
  const auto r = run(with({"cost", "--basis", "printed"}, kExampleFlags));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("delta C (printed)"), std::string::npos);
  EXPECT_NE(r.out.find("x^2 M"), std::string::npos);
}

TEST(CliCost, MinimalChain) {
  const auto r = run({"cost", "--teeth", "2", "--tooth-len", "1", "--dim-raw", "1", "--dim-comp", "1", "--bond", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(field(r.out, "C_regular"), "5") << r.out;
}

TEST(CliCost, UsageErrors) {
  const auto bad_d = run({"cost", "--teeth", "50", "--tooth-len", "5", "--dim-raw", "10", "--dim-comp", "30", "--bond", "10"});
  EXPECT_EQ(bad_d.code, 2);
  EXPECT_NE(bad_d.err.find("d <= D"), std::string::npos);
  EXPECT_EQ(run({"cost", "--teeth", "50"}).code, 2);
  EXPECT_EQ(run(with({"cost", "--basis", "sideways"}, kExampleFlags)).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliThreshold, ExampleText) {
  const auto r = run({"threshold", "--teeth", "50", "--dim-comp", "30"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("x- = 1.04"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("x+ = 28.92"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("28.83"), std::string::npos) << r.out;  // discrepancy note
  EXPECT_NE(r.out.find("CombWindow"), std::string::npos);
}

TEST(CliThreshold, NoRoots) {
  const auto r = run({"threshold", "--teeth", "50", "--dim-comp", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("no real roots; MPS always cheaper"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("28.83"), std::string::npos);
}

TEST(CliThreshold, TwoTeeth) {
  const auto r = run({"threshold", "--teeth", "2", "--dim-comp", "30"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("MpsAlwaysCheaper"), std::string::npos);
}

TEST(CliThreshold, Json) {
  const auto r = run({"threshold", "--teeth", "50", "--dim-comp", "30", "--json"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.size(), 4u);
  EXPECT_DOUBLE_EQ(j["x_minus"].get<double>(), 1.037308);
  EXPECT_DOUBLE_EQ(j["x_plus"].get<double>(), 28.921026);
  EXPECT_EQ(j["regime"], "CombWindow");
  EXPECT_DOUBLE_EQ(j["discriminant"].get<double>(), 1791364.0);

  const auto none = nlohmann::json::parse(run({"threshold", "--teeth", "50", "--dim-comp", "2", "--json"}).out);
  EXPECT_TRUE(none["x_minus"].is_null());
  EXPECT_TRUE(none["x_plus"].is_null());
  EXPECT_EQ(none["regime"], "MpsAlwaysCheaper");
}

TEST(CliThreshold, UsageErrors) {
  EXPECT_EQ(run({"threshold", "--teeth", "1", "--dim-comp", "30"}).code, 2);
  EXPECT_EQ(run({"threshold", "--teeth", "50", "--dim-comp", "-3"}).code, 2);
  EXPECT_EQ(run({"threshold", "--teeth", "50"}).code, 2);
}

TEST_F(CliTest, SweepCsvAndSvg) {
  const auto csv = dir_ / "sweep.csv";
  const auto svg = dir_ / "sweep.svg";
  const auto r = run({"sweep", "--teeth", "50", "--d-min", "1", "--d-max", "60", "--out", csv.string(), "--svg",
                      svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(slurp(csv));
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 61u);
  EXPECT_EQ(rows[0], "d,x_minus,x_plus,regime");
  for (int d = 1; d <= 4; ++d) EXPECT_EQ(rows[d], std::to_string(d) + ",,,MpsAlwaysCheaper");
  EXPECT_EQ(rows[30], "30,1.037308,28.921026,CombWindow");

  const std::string chart = slurp(svg);
  EXPECT_NE(chart.find("viewBox=\"0 0 800 600\""), std::string::npos);
  EXPECT_EQ(std::count(chart.begin(), chart.end(), '\n') > 10, true);
  std::size_t polylines = 0;
  for (std::size_t pos = 0; (pos = chart.find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
  EXPECT_EQ(polylines, 2u);
  EXPECT_NE(chart.find(">x-</text>"), std::string::npos);
  EXPECT_NE(chart.find(">x+</text>"), std::string::npos);
  EXPECT_NE(chart.find(">d</text>"), std::string::npos);
  EXPECT_NE(chart.find(">x</text>"), std::string::npos);
}

TEST_F(CliTest, SweepIsByteStable) {
  const auto a = dir_ / "a.csv";
  const auto b = dir_ / "b.csv";
  ASSERT_EQ(run({"sweep", "--teeth", "50", "--d-min", "5", "--d-max", "60", "--out", a.string()}).code, 0);
  ASSERT_EQ(run({"sweep", "--teeth", "50", "--d-min", "5", "--d-max", "60", "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, SweepUnwritablePath) {
  const auto r = run({"sweep", "--teeth", "50", "--out", (dir_ / "missing" / "x.csv").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(run({"sweep", "--teeth", "50", "--step", "0", "--out", (dir_ / "x.csv").string()}).code, 2);
}

TEST(CliVerify, SmallGridPasses) {
  const auto r = run({"verify"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("tuples=162"), std::string::npos);
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
  EXPECT_EQ(r.out, run({"verify", "--seed", "42"}).out);
}

TEST(CliVerify, CorruptedFormulaFails) {
  cli::VerifyOptions opt;
  opt.formulas.regular = [](const NetworkParams& p) {
    const Count good = c_regular(p);
    return p.teeth == 3 && p.bond_dim == 2 ? good + 1 : good;
  };
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(opt, out, err), 1);
  EXPECT_NE(out.str().find("FAILED: first failure: mps measured == printed C_regular at (N=1, M=3, D=1, d=1, x=2)"),
            std::string::npos)
      << out.str();
}

TEST(CliVerify, UnknownGrid) { EXPECT_EQ(run({"verify", "--grid", "huge"}).code, 2); }

TEST_F(CliTest, ContractZeroData) {
  const auto data = dir_ / "zeros.csv";
  {
    std::ofstream f(data);
    for (int r = 0; r < 6; ++r) f << "0,0,0\n";
  }
  const auto r = run({"contract", "--kind", "mps", "--teeth", "3", "--tooth-len", "2", "--dim-raw", "3", "--dim-comp",
                      "2", "--bond", "2", "--data", data.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "value"), "0") << r.out;
}

TEST(CliContract, ExampleCombCount) {
  const auto r = run(with({"contract", "--kind", "comb", "--json"}, kExampleFlags));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["measured_mults"], 1438010);
  EXPECT_EQ(j["analytic_schedule"], 1438010);
  EXPECT_EQ(j["analytic_printed"], 1443010);
  EXPECT_EQ(j["residual_printed_minus_measured"], 5000);
  EXPECT_EQ(j["per_phase"]["tooth-to-backbone"], 2 * 100 + 48 * 1000);
}

TEST(CliContract, OrthonormalAndDeterministic) {
  const std::vector<std::string> args{"contract", "--kind", "comb", "--teeth", "3", "--tooth-len", "2", "--dim-raw",
                                      "5", "--dim-comp", "3", "--bond", "2", "--orthonormal-u", "--seed", "7"};
  const auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, run(args).out);
}

TEST_F(CliTest, ContractMalformedData) {
  const auto data = dir_ / "bad.csv";
  {
    std::ofstream f(data);
    f << "1,2,3\n4,oops,6\n";
  }
  const auto r = run({"contract", "--kind", "mps", "--teeth", "2", "--tooth-len", "1", "--dim-raw", "3", "--dim-comp",
                      "2", "--bond", "2", "--data", data.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 2, column 2"), std::string::npos) << r.err;

  {
    std::ofstream f(data);
    f << "1,2,3\n";
  }
  const auto short_file = run({"contract", "--kind", "mps", "--teeth", "2", "--tooth-len", "1", "--dim-raw", "3",
                               "--dim-comp", "2", "--bond", "2", "--data", data.string()});
  EXPECT_EQ(short_file.code, 2);
  EXPECT_NE(short_file.err.find("row 2"), std::string::npos) << short_file.err;

  EXPECT_EQ(run({"contract", "--kind", "tree", "--teeth", "2", "--tooth-len", "1", "--dim-raw", "3", "--dim-comp",
                 "2", "--bond", "2"})
                .code,
            2);
}

TEST_F(CliTest, BenchCsv) {
  const auto out = dir_ / "bench.csv";
  const auto r = run({"bench", "--teeth", "4", "--tooth-len", "3", "--dim-raw", "8", "--dim-comp", "4", "--bond-list",
                      "2,3,5", "--reps", "3", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(slurp(out));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "kind,x,measured_mults,median_ns,reps");
  std::map<std::string, std::vector<Count>> mults;
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ASSERT_EQ(f.size(), 5u);
    const NetworkParams p{8, 4, std::stoul(f[1]), 4, 3};
    const Count expected = f[0] == "mps" ? c_regular(p) : c_comb_schedule(p);
    EXPECT_EQ(std::stoull(f[2]), expected);
    EXPECT_GT(std::stoll(f[3]), 0);
    EXPECT_EQ(f[4], "3");
    mults[f[0]].push_back(std::stoull(f[2]));
  }
  EXPECT_EQ(rows, 6);
  for (const auto& [kind, v] : mults)
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]) << kind;
}

TEST_F(CliTest, BenchUsage) {
  const auto out = (dir_ / "bench.csv").string();
  EXPECT_EQ(run({"bench", "--teeth", "4", "--tooth-len", "3", "--dim-raw", "8", "--dim-comp", "4", "--bond-list", "2",
                 "--reps", "2", "--out", out})
                .code,
            2);
  EXPECT_EQ(run({"bench", "--teeth", "4", "--tooth-len", "3", "--dim-raw", "8", "--dim-comp", "4", "--bond-list", "2",
                 "--out", (dir_ / "no" / "b.csv").string()})
                .code,
            1);
}

TEST(DataMatrixCsv, ParsesAndRoundTrips) {
  std::istringstream in("1.5, -2,3e-1\n4,5,6\n\n");
  const auto m = read_data_matrix(in, 2, 3);
  EXPECT_EQ(m.rows, 2u);
  EXPECT_EQ(m(0, 1), -2.0);
  EXPECT_EQ(m(0, 2), 0.3);
  std::ostringstream out;
  write_data_matrix(out, m);
  std::istringstream back(out.str());
  EXPECT_EQ(read_data_matrix(back).values, m.values);
}

TEST(DataMatrixCsv, ReportsPosition) {
  std::istringstream ragged("1,2,3\n4,5\n");
  try {
    read_data_matrix(ragged);
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
  std::istringstream gap("1\n\n2\n");
  EXPECT_THROW(read_data_matrix(gap), CsvError);
  std::istringstream empty_field("1,,2\n");
  EXPECT_THROW(read_data_matrix(empty_field), CsvError);
}
