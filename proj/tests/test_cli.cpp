#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "egwg/io.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded.
Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" EGWG_CLI_PATH "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "egwg_cli_" + name; }

std::vector<double> column(const std::vector<egwg::CurveRow>& rows, double egwg::CurveRow::*field) {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.*field);
  return v;
}

const std::string kLaw = "--a 0.05 --b 0.7 --c 0.1 --d 1.2 --theta 0.8";

}  // namespace

TEST(CliFit, AarsetEgwgd) {
  const auto r = run("fit --data aarset --model egwgd");
  ASSERT_EQ(r.code, 0);
  const auto fit = egwg::io::fit_from_json(r.out);
  EXPECT_LE(-fit.loglik, 229.5);
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(egwg::io::parse_json(r.out).at("model").get<std::string>(), "egwgd");
}

TEST(CliFit, AarsetExponential) {
  const auto r = run("fit --data aarset --model ed");
  ASSERT_EQ(r.code, 0);
  const auto fit = egwg::io::competitor_fit_from_json(r.out);
  EXPECT_NEAR(fit.spec.params[0], 50.0 / 2284.3, 1e-9);
  EXPECT_NEAR(-fit.loglik, 241.09, 0.005);
}

TEST(CliFit, WritesTheSameArtifactToFile) {
  const std::string path = temp_path("fit.json");
  const auto r = run("fit --data aarset --model gd --out " + path);
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path);
  const std::string saved((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(saved, r.out);
}

TEST(CliFit, InputErrorsExitOne) {
  EXPECT_EQ(run("fit --data /nonexistent/egwg.txt --model ed").code, 1);
  EXPECT_EQ(run("fit --data aarset --model nosuch").code, 1);
  EXPECT_EQ(run("fit --data aarset --model chen").code, 1);
  EXPECT_EQ(run("fit --model ed").code, 1);
  EXPECT_EQ(run("nosuch").code, 1);

  const std::string path = temp_path("bad.txt");
  std::ofstream(path) << "1.5\n-2\n3\n";
  EXPECT_EQ(run("fit --data " + path + " --model ed").code, 1);
}

TEST(CliFit, NonConvergedFitExitsTwoWithBestPoint) {
  const auto r = run("fit --data aarset --model egwgd --restarts 1 --max-iter 1");
  EXPECT_EQ(r.code, 2);
  const auto fit = egwg::io::fit_from_json(r.out);
  EXPECT_FALSE(fit.converged);
  EXPECT_TRUE(std::isfinite(fit.loglik));
}

TEST(CliFit, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST(CliCompare, EgwgdIsBestOnEveryCriterion) {
  const auto r = run("compare --data aarset --models ed,ged,gd,egwgd");
  ASSERT_EQ(r.code, 0);
  const auto t = egwg::io::comparison_from_csv(r.out);
  ASSERT_EQ(t.rows.size(), 4u);
  const std::vector<std::string> order{"ed", "ged", "gd", "egwgd"};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(t.rows[i].model, order[i]);
  for (const auto* rank : {&t.by_ks, &t.by_aic, &t.by_caic, &t.by_bic}) EXPECT_EQ(rank->front(), 3u);
}

TEST(CliCompare, SingleModelMatchesFit) {
  const auto cmp = egwg::io::comparison_from_csv(run("compare --data aarset --models gd").out);
  ASSERT_EQ(cmp.rows.size(), 1u);
  const auto fit = egwg::io::competitor_fit_from_json(run("fit --data aarset --model gd").out);
  EXPECT_EQ(cmp.rows[0].report.neg_loglik, -fit.loglik);
  EXPECT_EQ(cmp.rows[0].params[0].second, fit.spec.params[0]);
  EXPECT_EQ(cmp.rows[0].report.k, 2);
}

TEST(CliCompare, EmptyModelListExitsOne) {
  EXPECT_EQ(run("compare --data aarset --models \"\"").code, 1);
  EXPECT_EQ(run("compare --data aarset").code, 1);
}

TEST(CliCurves, AarsetMleHazardIsBathtub) {
  const auto fit = run("fit --data aarset --model egwgd");
  ASSERT_EQ(fit.code, 0);
  const std::string path = temp_path("mle.json");
  std::ofstream(path) << fit.out;
  const auto r = run("curves --params @" + path + " --lo 0.5 --hi 90 --count 180 --spacing linear");
  ASSERT_EQ(r.code, 0);
  const auto rows = egwg::io::curves_from_csv(r.out);
  ASSERT_EQ(rows.size(), 180u);
  const auto h = column(rows, &egwg::CurveRow::hazard);
  int changes = 0;
  for (std::size_t i = 2; i < h.size(); ++i)
    if ((h[i] - h[i - 1] > 0.0) != (h[i - 1] - h[i - 2] > 0.0)) ++changes;
  EXPECT_EQ(changes, 1);
  EXPECT_LT(h[1], h[0]);
  EXPECT_GT(h.back(), h[h.size() - 2]);
}

TEST(CliCurves, GompertzReduction) {
  const double a = 0.3, c = 0.7;
  const auto r = run("curves --a 0.3 --b 0 --c 0.7 --d 1 --theta 1 --lo 0.1 --hi 4 --count 25");
  ASSERT_EQ(r.code, 0);
  for (const auto& row : egwg::io::curves_from_csv(r.out))
    EXPECT_NEAR(row.pdf, a * c * std::exp(c * row.x - a * std::expm1(c * row.x)), 1e-12);
}

TEST(CliCurves, CountTwoAndErrors) {
  const auto r = run("curves " + kLaw + " --lo 1 --hi 3 --count 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(egwg::io::curves_from_csv(r.out).size(), 2u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "x,pdf,cdf,survival,hazard");
  EXPECT_EQ(run("curves " + kLaw + " --lo 1 --hi 3 --count 1").code, 1);
  EXPECT_EQ(run("curves --a -1 --b 0.7 --c 0.1 --d 1.2 --theta 0.8 --lo 1 --hi 3 --count 5").code, 1);
  EXPECT_EQ(run("curves " + kLaw + " --lo 1 --hi 3 --count 5 --spacing cubic").code, 1);
}

TEST(CliSample, DeterministicAndValidated) {
  const auto first = run("sample " + kLaw + " --n 500 --seed 9");
  const auto second = run("sample " + kLaw + " --n 500 --seed 9");
  ASSERT_EQ(first.code, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_NE(first.out, run("sample " + kLaw + " --n 500 --seed 10").out);
  EXPECT_EQ(egwg::io::parse_dataset(first.out, "sample").size(), 500u);
  EXPECT_EQ(run("sample " + kLaw + " --n 0").code, 1);
  EXPECT_EQ(run("sample --a 1 --b 1 --c 1 --d 1 --theta 0 --n 5").code, 1);
}

TEST(CliSample, LargeSampleRoundTripsThroughFit) {
  // Gompertz with hazard a c e^{c x}, refitted in the hazard-rate form.
  const std::string path = temp_path("gompertz.txt");
  ASSERT_EQ(run("sample --submodel gompertz --sub-params 0.5,0.8 --n 100000 --seed 3 --out " + path).code, 0);
  const auto r = run("fit --data " + path + " --model gd");
  ASSERT_EQ(r.code, 0);
  const auto fit = egwg::io::competitor_fit_from_json(r.out);
  EXPECT_NEAR(fit.spec.params[0], 0.4, 0.04);
  EXPECT_NEAR(fit.spec.params[1], 0.8, 0.08);
}

TEST(CliReliability, IdenticalLawsAndBoundaryConventions) {
  const std::string repair = " --repair-a 0.05 --repair-b 0.7 --repair-c 0.1 --repair-d 1.2 --repair-theta 0.8";
  const auto r = run("reliability " + kLaw + repair + " --t 0,2,5");
  ASSERT_EQ(r.code, 0);
  const auto s = egwg::io::reliability_from_json(r.out);
  EXPECT_DOUBLE_EQ(*s.availability, 0.5);
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.points[0].mrl, s.mttf);
  EXPECT_EQ(*s.points[0].maintainability, 0.0);
  EXPECT_FALSE(s.points[0].mpl.has_value());
  EXPECT_TRUE(s.points[1].mpl.has_value());

  const auto rows = egwg::io::curves_from_csv(run("curves " + kLaw + " --lo 2 --hi 5 --count 2 --mrl").out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(*rows[0].mrl, s.points[1].mrl);
  EXPECT_EQ(*rows[1].mrl, s.points[2].mrl);
}

TEST(CliReliability, FailureLawAlone) {
  const auto r = run("reliability " + kLaw + " --t 1");
  ASSERT_EQ(r.code, 0);
  const auto j = egwg::io::parse_json(r.out);
  EXPECT_FALSE(j.contains("availability"));
  EXPECT_FALSE(j.at("points")[0].contains("maintainability"));
  EXPECT_EQ(run("reliability " + kLaw + " --t -1").code, 1);
}

TEST(CliEval, MatchesCurvesAtTheSamePoints) {
  const auto e = run("eval " + kLaw + " --x 1,3");
  const auto c = run("curves " + kLaw + " --lo 1 --hi 3 --count 2");
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(e.out, c.out);
  EXPECT_EQ(run("eval " + kLaw + " --x 0").code, 1);
}

TEST(CliQuadrature, ToleranceFromEnvironment) {
  const std::string args = "reliability " + kLaw + " --t 3";
  const auto base = egwg::io::reliability_from_json(run(args).out);
  const auto loose = egwg::io::reliability_from_json(run(args, "EGWG_QUAD_RTOL=1e-4").out);
  EXPECT_NEAR(loose.mttf, base.mttf, 1e-3 * base.mttf);
  EXPECT_NEAR(loose.points[0].mrl, base.points[0].mrl, 1e-3 * base.points[0].mrl);
  EXPECT_EQ(run(args, "EGWG_QUAD_RTOL=abc").code, 1);
  EXPECT_EQ(run(args, "EGWG_QUAD_RTOL=-1").code, 1);
}
