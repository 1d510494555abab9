#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dlcz/photon_statistics.hpp"
#include "oracles/count_enumeration.hpp"

using namespace dlcz;

TEST(TwoModeState, IdealDistribution) {
  const auto d = TwoModeState{0.1, 0}.distribution();
  EXPECT_NEAR(d.mass(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(d.P(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(d.P(1, 1), 0.09);
  EXPECT_EQ(d.P(1, 0), 0.0);
  EXPECT_THROW(ideal_joint_distribution(0.1, 3), std::invalid_argument);
  EXPECT_THROW(ideal_joint_distribution(1.0, 30), std::invalid_argument);
  EXPECT_THROW(TwoModeState({0.0, 0}).distribution(), std::invalid_argument);
}

TEST(Correlations, IdealSourceValues) {
  const auto e = correlation_functions(TwoModeState{0.1, 0}.distribution(), {});
  // Truncation at the default cutoff leaves a residue near 1e-9.
  EXPECT_NEAR(e.g11, 2.0, 1e-8);
  EXPECT_NEAR(e.g22, 2.0, 1e-8);
  EXPECT_NEAR(e.g12, 11.0, 1e-7);
  EXPECT_NEAR(e.R, 30.25, 1e-6);
  EXPECT_TRUE(e.nonclassical);
}

TEST(Correlations, LossLeavesNormalizedValues) {
  const auto d = TwoModeState{0.05, 0}.distribution();
  const auto ideal = correlation_functions(d, {});
  const auto lossy = correlation_functions(d, {0.1, 0.3, 0.0, 0.0});
  EXPECT_NEAR(lossy.g12, ideal.g12, 1e-9);
  EXPECT_NEAR(lossy.g11, ideal.g11, 1e-9);
}

TEST(Correlations, MatchesCountEnumeration) {
  const auto d = TwoModeState{0.2, 0}.distribution();
  for (const DetectionModel m : {DetectionModel{1, 1, 0, 0}, DetectionModel{0.3, 0.6, 0.01, 0.02},
                                 DetectionModel{0.05, 0.05, 0.2, 0.0}}) {
    const auto e = correlation_functions(d, m);
    const auto ref = oracle::enumerate_counts(d.P, m.eta1, m.eta2, m.bg1, m.bg2);
    EXPECT_NEAR(e.p1, ref.p1, 1e-12);
    EXPECT_NEAR(e.p2, ref.p2, 1e-12);
    EXPECT_NEAR(e.p11, ref.p11, 1e-12);
    EXPECT_NEAR(e.p22, ref.p22, 1e-12);
    EXPECT_NEAR(e.p12, ref.p12, 1e-12);
  }
}

TEST(Correlations, BackgroundLowersG12Monotonically) {
  const auto d = TwoModeState{0.1, 0}.distribution();
  double last = 1e300;
  for (double bg : {0.0, 1e-4, 1e-3, 1e-2, 0.1}) {
    const double g = correlation_functions(d, {0.5, 0.5, bg, bg}).g12;
    EXPECT_LT(g, last);
    last = g;
  }
}

TEST(Correlations, PoissonianProductIsClassical) {
  const auto e = correlation_functions(poissonian_product(0.3, 0.1, 40), {});
  EXPECT_NEAR(e.g12, 1.0, 1e-9);
  EXPECT_NEAR(e.g11, 1.0, 1e-9);
  EXPECT_FALSE(e.nonclassical);
}

TEST(CauchySchwarz, Bound) {
  EXPECT_DOUBLE_EQ(cauchy_schwarz_R(2.0, 2.0, 11.0).R, 30.25);
  EXPECT_FALSE(cauchy_schwarz_R(2.0, 2.0, 2.0).nonclassical);
  EXPECT_THROW(cauchy_schwarz_R(0.0, 2.0, 2.0), std::invalid_argument);
}

TEST(MonteCarlo, AgreesWithExactValues) {
  const auto d = TwoModeState{0.1, 0}.distribution();
  const DetectionModel m{0.5, 0.5, 0.01, 0.01};
  const auto exact = correlation_functions(d, m);
  const auto mc = simulate_trials(d, m, 400000, 3, 2);
  EXPECT_EQ(mc.trials, 400000u);
  EXPECT_LT(std::abs(mc.g12 - exact.g12), 4.0 * mc.se_g12);
  EXPECT_LT(std::abs(mc.g11 - exact.g11), 4.0 * mc.se_g11);
  EXPECT_LT(std::abs(mc.R - exact.R), 4.0 * mc.se_R);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const auto d = TwoModeState{0.1, 0}.distribution();
  const auto a = simulate_trials(d, {}, 200000, 42, 1);
  const auto b = simulate_trials(d, {}, 200000, 42, 4);
  const auto c = simulate_trials(d, {}, 200000, 43, 1);
  EXPECT_EQ(a.g12, b.g12);
  EXPECT_EQ(a.se_R, b.se_R);
  EXPECT_NE(a.p12, c.p12);
}

TEST(ScaleFit, RecoversKnownScale) {
  const std::vector<double> dt{0, 100, 200, 300, 400, 500, 600, 700, 800, 900};
  std::vector<double> p(dt.size());
  for (std::size_t i = 0; i < dt.size(); ++i) p[i] = 1e-8 * (1.0 + std::exp(-dt[i] / 200.0));
  std::vector<G12Point> data;
  for (double t : {50.0, 250.0, 650.0}) {
    data.push_back({t, 2e8 * 1e-8 * (1.0 + std::exp(-t / 200.0)), 0.1});
  }
  const auto fit = scale_fit_xi(dt, p, data);
  EXPECT_NEAR(fit.xi, 2e8, 2e8 * 2e-2);
  EXPECT_EQ(fit.points, 3u);
  EXPECT_NEAR(fit.xi_th, 1.0 / p.back(), 1.0);
  EXPECT_THROW(scale_fit_xi(dt, p, {}), std::invalid_argument);
  EXPECT_THROW(scale_fit_xi(dt, p, {{2000.0, 1.0, 0.1}}), std::invalid_argument);
  EXPECT_THROW(scale_fit_xi(dt, p, {{100.0, 1.0, 0.0}}), std::invalid_argument);
}

TEST(DataReader, ParsesSeparatorsAndComments) {
  std::istringstream in("# measured\ndelay_ns,g12,sigma\n100, 5.5, 0.3\n200;4.0;0.2\n300\t3.1\t0.2\n");
  const auto pts = read_g12_data(in, "data.csv");
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[1].delay_ns, 200.0);
  EXPECT_EQ(pts[2].g12, 3.1);
}

TEST(DataReader, ReportsLineNumbers) {
  std::istringstream bad("delay_ns,g12,sigma\n100,5.5,0.3\n200,abc,0.2\n");
  try {
    read_g12_data(bad, "data.csv");
    FAIL() << "expected a parse error";
  } catch (const DataParseError& e) {
    EXPECT_NE(std::string(e.what()).find("data.csv:3"), std::string::npos) << e.what();
  }
  std::istringstream empty("");
  EXPECT_THROW(read_g12_data(empty), DataParseError);
}
