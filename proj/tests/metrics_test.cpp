#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "pinn/metrics.hpp"
#include "pinn/pde.hpp"

using namespace pinn;

namespace {

const Interval kX{0.0, 2.0};
const Interval kT{0.0, 4.0};

TEST(EnergyError, IdenticalEvaluatorsGiveZero) {
  auto u = [](auto in) { return sin(in[0]) * cos(in[1]); };
  EXPECT_NEAR(energy_error(u, u, kX, kT, 60, 120), 0.0, 1e-15);
}

TEST(EnergyError, ConstantGradientOffset) {
  // approx = u + delta x on [0,2]x[0,4]: integral of delta^2 is 8 delta^2
  auto u = [](auto in) { return sin(in[0]) * cos(in[1]); };
  const double delta = 0.01;
  auto approx = [delta](auto in) { return sin(in[0]) * cos(in[1]) + delta * in[0]; };
  EXPECT_NEAR(energy_error(u, approx, kX, kT, 200, 400), delta * delta * 8.0, 1e-6);
}

TEST(EnergyError, QuadratureConvergesUnderRefinement) {
  auto u = [](auto in) { return sin(in[0]) * cos(in[1] * 0.5); };
  auto approx = [](auto in) { return sin(in[0]) * cos(in[1] * 0.5) + 0.01 * in[0] * in[0] / 4.0; };
  const double coarse = energy_error(u, approx, kX, kT, 200, 400);
  const double fine = energy_error(u, approx, kX, kT, 399, 799);
  EXPECT_LE(std::abs(coarse - fine), 1e-6);
}

TEST(MseError, IdenticalGridsGiveZero) {
  GridField a(10, 20, kX, kT);
  for (std::size_t k = 0; k < a.values.size(); ++k) a.values[k] = std::sin(0.1 * k);
  EXPECT_EQ(mse_error(a, a), 0.0);
}

TEST(MseError, ConstantOffsetGivesItsSquare) {
  GridField a(10, 20, kX, kT), b(10, 20, kX, kT);
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    a.values[k] = std::sin(0.1 * k);
    b.values[k] = a.values[k] + 0.3;
  }
  EXPECT_NEAR(mse_error(a, b), 0.09, 1e-14);
}

TEST(MseError, IncongruentGridsRejected) {
  GridField a(10, 20, kX, kT), b(10, 21, kX, kT);
  EXPECT_THROW(mse_error(a, b), StructuralError);
}

TEST(RelL2, ExactMatchGivesZero) {
  std::vector<double> x{1.0, -2.0, 3.0};
  EXPECT_EQ(rel_l2_error(x, x), 0.0);
}

TEST(RelL2, DoubledVectorGivesOne) {
  std::vector<double> x{1.0, -2.0, 3.0}, b{2.0, -4.0, 6.0};
  EXPECT_DOUBLE_EQ(rel_l2_error(x, b), 1.0);
}

TEST(RelL2, OrthogonalUnitPerturbation) {
  // x with x[0] = 0, b = x + e0 |x|: error norm equals |x| exactly
  std::vector<double> x{0.0, 3.0, 4.0};
  std::vector<double> b{5.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(rel_l2_error(x, b), 1.0);
}

TEST(RelL2, ScaleInvariant) {
  SplitMix64 rng(6);
  std::vector<double> x(20), b(20);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(-2.0, 2.0);
    b[i] = rng.uniform(-2.0, 2.0);
  }
  const double base = rel_l2_error(x, b);
  for (double s : {3.0, -0.25, 1e6}) {
    std::vector<double> xs(x), bs(b);
    for (std::size_t i = 0; i < x.size(); ++i) {
      xs[i] *= s;
      bs[i] *= s;
    }
    EXPECT_NEAR(rel_l2_error(xs, bs), base, 1e-12);
  }
}

TEST(RelativeErrorField, ExactMatchAllZero) {
  GridField u(5, 5, kX, kT), a(5, 5, kX, kT);
  for (std::size_t k = 0; k < u.values.size(); ++k) u.values[k] = a.values[k] = 1.0 + 0.1 * k;
  GridField r = relative_error_field(u, a);
  for (double v : r.values) EXPECT_EQ(v, 0.0);
}

TEST(RelativeErrorField, TenPercentOverestimate) {
  GridField u(5, 5, kX, kT), a(5, 5, kX, kT);
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    u.values[k] = 2.0 + 0.1 * k;
    a.values[k] = 1.1 * u.values[k];
  }
  GridField r = relative_error_field(u, a);
  for (double v : r.values) EXPECT_NEAR(v, 0.1, 1e-12);
}

TEST(RelativeErrorField, NanSentinelWhereReferenceVanishes) {
  GridField u(2, 2, kX, kT), a(2, 2, kX, kT);
  u.values = {1.0, 0.0, 1e-13, -2.0};
  a.values = {1.2, 5.0, 5.0, -2.2};
  GridField r = relative_error_field(u, a);
  EXPECT_NEAR(r.values[0], 0.2, 1e-12);
  EXPECT_TRUE(std::isnan(r.values[1]));
  EXPECT_TRUE(std::isnan(r.values[2]));
  EXPECT_NEAR(r.values[3], 0.1, 1e-12);
  // sentinels are excluded from rank-correlation aggregates; the two
  // surviving cells still rank-correlate
  GridField g(2, 2, kX, kT);
  g.values = {1.0, 2.0, 3.0, 4.0};
  EXPECT_FALSE(std::isnan(error_gradient_correlation(r, g)));
}

TEST(FitConvergenceRate, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double n : {50.0, 100.0, 200.0, 400.0, 800.0})
    pts.emplace_back(n, 2.5 * std::pow(n, -0.5));
  auto [gamma, exponent] = fit_convergence_rate(pts);
  EXPECT_NEAR(gamma, 2.5, 1e-12);
  EXPECT_NEAR(exponent, -0.5, 1e-12);
}

TEST(FitConvergenceRate, ConstantErrorsGiveZeroExponent) {
  std::vector<std::pair<double, double>> pts = {{10.0, 0.7}, {100.0, 0.7}, {1000.0, 0.7}};
  auto [gamma, exponent] = fit_convergence_rate(pts);
  EXPECT_NEAR(exponent, 0.0, 1e-12);
  EXPECT_NEAR(gamma, 0.7, 1e-12);
}

TEST(FitConvergenceRate, RejectsNonPositiveAndShortInputs) {
  std::vector<std::pair<double, double>> two = {{10.0, 1.0}, {20.0, 0.5}};
  EXPECT_THROW(fit_convergence_rate(two), ArgumentError);
  std::vector<std::pair<double, double>> neg = {{10.0, 1.0}, {20.0, -0.5}, {30.0, 0.2}};
  EXPECT_THROW(fit_convergence_rate(neg), ArgumentError);
}

TEST(Spearman, PerfectAgreementGivesOne) {
  GridField e(4, 5, kX, kT), g(4, 5, kX, kT);
  SplitMix64 rng(3);
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    e.values[k] = rng.next_double();
    g.values[k] = e.values[k];
  }
  EXPECT_NEAR(error_gradient_correlation(e, g), 1.0, 1e-12);
}

TEST(Spearman, ReversedRanksGiveMinusOne) {
  GridField e(4, 5, kX, kT), g(4, 5, kX, kT);
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    e.values[k] = static_cast<double>(k);
    g.values[k] = -static_cast<double>(k);
  }
  EXPECT_NEAR(error_gradient_correlation(e, g), -1.0, 1e-12);
}

TEST(Spearman, ConstantFieldIsUndefined) {
  GridField e(4, 5, kX, kT), g(4, 5, kX, kT);
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    e.values[k] = 1.0;
    g.values[k] = static_cast<double>(k);
  }
  EXPECT_TRUE(std::isnan(error_gradient_correlation(e, g)));
}

TEST(Norms, ZeroIffFieldsCoincide) {
  GridField u(6, 6, kX, kT), a(6, 6, kX, kT);
  SplitMix64 rng(10);
  for (std::size_t k = 0; k < u.values.size(); ++k)
    u.values[k] = a.values[k] = rng.uniform(-1.0, 1.0);
  EXPECT_EQ(mse_error(u, a), 0.0);
  EXPECT_EQ(rel_l2_error(u, a), 0.0);
  a.values[7] += 1e-13;
  EXPECT_GT(mse_error(u, a), 0.0);
  EXPECT_GT(rel_l2_error(u, a), 0.0);
}

TEST(GridCsv, RoundTrip) {
  GridField g(7, 9, kX, kT);
  SplitMix64 rng(12);
  for (double& v : g.values) v = rng.uniform(-3.0, 3.0);
  const std::string path = std::filesystem::temp_directory_path() / "grid_roundtrip.csv";
  save_grid_csv(g, path);
  GridField h = load_grid_csv(path);
  ASSERT_EQ(h.n0, g.n0);
  ASSERT_EQ(h.n1, g.n1);
  for (std::size_t k = 0; k < g.values.size(); ++k) EXPECT_EQ(g.values[k], h.values[k]);
  EXPECT_EQ(h.range0.lo, g.range0.lo);
  EXPECT_EQ(h.range1.hi, g.range1.hi);
  std::filesystem::remove(path);
}

}  // namespace
