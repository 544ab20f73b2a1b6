#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kerrwave/harness/experiments.hpp"

using namespace kerrwave;

TEST(Fit, RecoversExactPowerLaw) {
  std::vector<std::pair<double, double>> p;
  for (double e : {0.1, 0.05, 0.025}) p.emplace_back(e, 3.0 * std::pow(e, 2.5));
  const SlopeFit f = fit_slope(p);
  EXPECT_NEAR(f.slope, 2.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
}

TEST(Fit, NoisyDataStaysNearSlope) {
  std::mt19937 rng(20240501u);
  std::normal_distribution<double> n(0.0, 0.02);
  std::vector<std::pair<double, double>> p;
  for (double e = 0.2; e > 0.01; e *= 0.8) p.emplace_back(e, std::pow(e, 1.5) * std::exp(n(rng)));
  const SlopeFit f = fit_slope(p);
  EXPECT_NEAR(f.slope, 1.5, 0.05);
  EXPECT_GT(f.residual, 0.0);
}

TEST(Fit, RejectsDegenerateInput) {
  EXPECT_THROW(fit_slope({{0.1, 1.0}}), StructuralError);
  EXPECT_THROW(fit_slope({{0.1, 1.0}, {0.05, 0.0}}), DivisionError);
}

TEST(Fit, ScalingRules) {
  const std::vector<std::pair<double, double>> p{{0.1, 1e-3}, {0.05, 1.25e-4}};
  EXPECT_TRUE(make_scaling("x", p, 3.0, 0.1).pass);
  EXPECT_FALSE(make_scaling("x", p, 3.5, 0.1).pass);
  EXPECT_TRUE(make_scaling("x", p, 2.0, 0.0, SlopeRule::at_least).pass);
  EXPECT_FALSE(make_scaling("x", p, 3.5, 0.0, SlopeRule::at_least).pass);
}

TEST(Config, ParsesSectionsListsAndComments) {
  std::istringstream in(R"(# sweep
experiment = "residual_scaling"
eps = [0.2, 0.1, 0.05]
T0 = 0.5
[grid]
h = 0.05   # finer
[envelope]
width = 2
)");
  const ConfigFile f = ConfigFile::parse(in);
  const ExperimentConfig c = experiment_config(f);
  EXPECT_EQ(c.experiment, "residual_scaling");
  ASSERT_EQ(c.eps_list.size(), 3u);
  EXPECT_DOUBLE_EQ(c.eps_list[2], 0.05);
  EXPECT_DOUBLE_EQ(c.T0, 0.5);
  EXPECT_DOUBLE_EQ(c.h, 0.05);
  EXPECT_DOUBLE_EQ(c.width, 2.0);
}

TEST(Config, ValidationRejectsBadSweeps) {
  std::istringstream a("eps = 0.05, 0.1\n");
  EXPECT_THROW(experiment_config(ConfigFile::parse(a)), StructuralError);
  std::istringstream b("eps = 1.5, 0.1\n");
  EXPECT_THROW(experiment_config(ConfigFile::parse(b)), StructuralError);
  std::istringstream c("T0 = 0\n");
  EXPECT_THROW(experiment_config(ConfigFile::parse(c)), StructuralError);
  std::istringstream d("this line has no equals sign\n");
  EXPECT_THROW(ConfigFile::parse(d), StructuralError);
}

TEST(Report, CsvHasHeaderRowsAndFooter) {
  const auto dir = std::filesystem::temp_directory_path() / "kerrwave_report_test";
  std::filesystem::remove_all(dir);
  ExperimentResult r{"demo", {{1, "value", 0.5, "<= 1", true}}, {{"tab", {"eps", "err"}, {{0.1, 2.0}}, {{"slope", 1.5}}}}};
  emit_report(r, dir);
  std::ifstream f(dir / "tab.csv");
  std::string all((std::istreambuf_iterator<char>(f)), {});
  EXPECT_EQ(all, "eps,err\n0.1,2\nslope,1.5\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "tab.err.dat"));
  EXPECT_EQ(format_check(r.checks[0]), "PASS  value = 0.5  (<= 1)");
}

TEST(Report, SnapshotRoundTrip) {
  const Grid2D g2 = make_grid2d(make_grid(1.0, 0.25), 0.0, 1.0, 4);
  Field2D f(g2);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < f.comp(c).size(); ++i) f.comp(c)[i] = 0.25 * i - c;
  const auto path = std::filesystem::temp_directory_path() / "kerrwave_snapshot_test.bin";
  write_snapshot(f, 1.75, path);
  double t = 0.0;
  const Field2D g = read_snapshot(path, t);
  EXPECT_EQ(t, 1.75);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(g.comp(c), f.comp(c));
}

TEST(Harness, PacketGridHoldsWholeCarrierPeriods) {
  const Grid2D g2 = packet_grid(make_grid(6.0, 0.1), 0.1, 0.5, 40.0, 0.4);
  const double periods = g2.length_x2() * 0.5 / (2.0 * std::numbers::pi);
  EXPECT_NEAR(periods, std::round(periods), 1e-9);
  EXPECT_LE(g2.dx2(), 0.4);
  EXPECT_TRUE(is_power_of_two(g2.n_x2));
}

TEST(Harness, NlsExperimentPasses) {
  const ExperimentResult r = run_nls_test(ExperimentConfig{});
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.checks.size(), 4u);
}
