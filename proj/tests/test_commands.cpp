#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "crvirtres/commands.hpp"

namespace crvirtres {
namespace {

struct Output {
  int code = 0;
  std::string out;
  std::string err;
};

Output run(std::string_view command, std::string_view scenario = "") {
  std::ostringstream out, err;
  Output o;
  o.code = run_command(command, parse_scenario_text(scenario), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::size_t column(std::string_view header, std::string_view name) {
  const auto names = fields(std::string(header));
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw std::out_of_range(std::string(name));
}

TEST(Commands, SolveWritesOneRow) {
  const auto o = run("solve", "r = 2");
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto ls = lines(o.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], kSolveHeader);
  const auto row = fields(ls[1]);
  ASSERT_EQ(row.size(), fields(std::string(kSolveHeader)).size());
  const auto k = compute_kpis(reference_config(2));
  EXPECT_EQ(row[column(kSolveHeader, "r")], "2");
  EXPECT_EQ(std::stod(row[column(kSolveHeader, "p_ft")]), k.p_ft);
  EXPECT_EQ(std::stod(row[column(kSolveHeader, "p_block")]), k.p_block);
  EXPECT_EQ(std::stoul(row[column(kSolveHeader, "states")]), k.states);
}

TEST(Commands, SweepIteratesReservationInnermost) {
  const auto o = run("sweep-pft", "[sweep]\nlambda_p = 1, 2\nr = 0, 2, 4\n");
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto ls = lines(o.out);
  ASSERT_EQ(ls.size(), 7u);
  EXPECT_EQ(ls[0], kSweepHeader);
  const auto r_col = column(kSweepHeader, "r");
  const auto lp_col = column(kSweepHeader, "lambda_p");
  const auto pft_col = column(kSweepHeader, "p_ft");
  for (std::size_t block = 0; block < 2; ++block) {
    double prev = 1.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const auto row = fields(ls[1 + 3 * block + j]);
      EXPECT_EQ(row[r_col], std::to_string(2 * j));
      EXPECT_EQ(std::stod(row[lp_col]), block == 0 ? 1.0 : 2.0);
      const double pft = std::stod(row[pft_col]);
      EXPECT_LT(pft, prev);
      prev = pft;
    }
  }
  EXPECT_EQ(run("sweep-pb", "[sweep]\nlambda_p = 1, 2\nr = 0, 2, 4\n").out, o.out);
}

TEST(Commands, SweepMu1AndCmin) {
  const auto mu = run("sweep-mu1", "[sweep]\nmu1 = 0.5, 1\nrho_s = 0.4, 0.8\n");
  ASSERT_EQ(mu.code, kExitOk) << mu.err;
  const auto ls = lines(mu.out);
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_DOUBLE_EQ(std::stod(fields(ls[1])[column(kSweepHeader, "rho_s")]), 0.4);
  EXPECT_EQ(fields(ls[2])[column(kSweepHeader, "mu1")], "1");

  const auto cm = run("sweep-cmin", "[sweep]\nC_min = 1, 4\nr = 0\n");
  ASSERT_EQ(cm.code, kExitOk) << cm.err;
  const auto cl = lines(cm.out);
  ASSERT_EQ(cl.size(), 3u);
  EXPECT_EQ(fields(cl[2])[column(kSweepHeader, "C_min")], "4");
  EXPECT_DOUBLE_EQ(std::stod(fields(cl[2])[column(kSweepHeader, "rho_s")]), 0.6);
}

TEST(Commands, EmptyGridIsInputError) {
  const auto o = run("sweep-pft", "[sweep]\nr =\n");
  EXPECT_EQ(o.code, kExitInputError);
  EXPECT_NE(o.err.find("empty"), std::string::npos);
}

TEST(Commands, OptimizeReportsArgmin) {
  const auto o = run("optimize", "[sweep]\nlambda_p = 1.3\nrho_s = 0.6\n[optimize]\nalpha = 1\n");
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto ls = lines(o.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], kOptimizeHeader);
  const auto best = optimal_reservation(reference_config(), 1.0);
  const auto row = fields(ls[1]);
  EXPECT_EQ(std::stoi(row[column(kOptimizeHeader, "r_star")]), best.r_star);
  EXPECT_EQ(std::stod(row[column(kOptimizeHeader, "zeta_star")]), best.zeta_star);
}

TEST(Commands, DriftListsEveryState) {
  const auto o = run("drift");
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(lines(o.out).size(), enumerate_states(reference_config()).size() + 1);
}

TEST(Commands, UnknownCommand) {
  const auto o = run("frobnicate");
  EXPECT_EQ(o.code, kExitInputError);
  EXPECT_TRUE(o.out.empty());
  EXPECT_NE(o.err.find("usage:"), std::string::npos);
}

TEST(Commands, SimulateIsByteIdentical) {
  const std::string sc = "[system]\nr = 2\n[simulation]\nhorizon = 500\nreplications = 3\nseed = 5\n";
  const auto a = run("simulate", sc);
  const auto b = run("simulate", sc);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto ls = lines(a.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], kSimulateHeader);
  EXPECT_EQ(fields(ls[1]).size(), fields(std::string(kSimulateHeader)).size());
  EXPECT_EQ(fields(ls[1])[0], "fsu");
}

TEST(Commands, SimulateNonCooperative) {
  const auto o = run("simulate", "[simulation]\nhorizon = 500\nreplications = 2\npolicy = nc\n");
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(fields(lines(o.out)[1])[0], "nc");
}

TEST(Commands, ValidateExitCodeFollowsCoverage) {
  const std::string sc = "[system]\nr = 2\n[simulation]\nhorizon = 2000\nreplications = 4\nseed = 3\n";
  const auto o = run("validate", sc);
  const auto v = cross_validate(reference_config(2), {2000, 4, 3});
  EXPECT_EQ(o.code, v.all_covered() ? kExitOk : kExitValidationFailed);
  EXPECT_EQ(lines(o.out).size(), 4u);
}

}  // namespace
}  // namespace crvirtres
