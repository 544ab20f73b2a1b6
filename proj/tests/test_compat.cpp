#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kerrwave/correctors/correctors.hpp"
#include "kerrwave/maxwell/compat.hpp"
#include "kerrwave/maxwell/maxwell.hpp"

using namespace kerrwave;

TEST(Compat, FornbergWeightsDifferentiatePolynomialsExactly) {
  const std::vector<double> xs{-0.3, 0.0, 0.2, 0.7, 1.1};
  auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x - x * x * x * x; };
  auto dp = [](double x) { return -2.0 + 1.5 * x * x - 4.0 * x * x * x; };
  auto d2p = [](double x) { return 3.0 * x - 12.0 * x * x; };
  for (double x : {0.0, 0.35, 1.1}) {
    const auto w0 = detail::fd_weights(xs, x, 0), w1 = detail::fd_weights(xs, x, 1), w2 = detail::fd_weights(xs, x, 2);
    double v0 = 0.0, v1 = 0.0, v2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      v0 += w0[i] * p(xs[i]);
      v1 += w1[i] * p(xs[i]);
      v2 += w2[i] * p(xs[i]);
    }
    EXPECT_NEAR(v0, p(x), 1e-12);
    EXPECT_NEAR(v1, dp(x), 1e-11);
    EXPECT_NEAR(v2, d2p(x), 1e-10);
  }
}

TEST(Compat, BlockDerivativeIsExactForQuartics) {
  const int m = 9, nx = 2;
  const double h = 0.1;
  std::vector<double> v(m * nx), out(m * nx);
  for (int k = 0; k < m; ++k)
    for (int c = 0; c < nx; ++c) v[k * nx + c] = std::pow(k * h, 4) + c;
  detail::block_derivative4(v.data(), m, h, nx, out.data());
  for (int k = 0; k < m; ++k) EXPECT_NEAR(out[k * nx + 1], 4.0 * std::pow(k * h, 3), 1e-10);
}

TEST(Compat, ZeroFieldHasNoDefect) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.25), 0.0, 8.0, 16);
  const SampledProfile c = sample_profile(decay_profile(), g2.x1);
  for (const auto& d : compatibility_check(Field2D(g2), c, g2, 3)) {
    EXPECT_EQ(d.jump2_sup, 0.0);
    EXPECT_EQ(d.jump3_sup, 0.0);
  }
}

TEST(Compat, OrdersOutsideRangeAreRejected) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.25), 0.0, 8.0, 16);
  const SampledProfile c = sample_profile(decay_profile(), g2.x1);
  EXPECT_THROW(compatibility_check(Field2D(g2), c, g2, 4), UnsupportedOrderError);
  EXPECT_THROW(compatibility_check(Field2D(g2), c, g2, 0), UnsupportedOrderError);
}

TEST(Compat, IndefiniteSymbolIsReported) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.25), 0.0, 8.0, 16);
  const SampledProfile c = sample_profile(decay_profile(-1.0), g2.x1);
  Field2D u(g2);
  std::fill(u.u1.begin(), u.u1.end(), 1.0);
  EXPECT_THROW(compatibility_check(u, c, g2, 2), FieldExitError);
}

TEST(Compat, CarrierDefectsShrinkUnderRefinement) {
  const PiecewiseProfile lin = decay_profile(0.0);
  std::vector<double> worst;
  for (double h : {0.2, 0.1}) {
    const Grid1D g = make_grid(60.0, h);
    const Mode m = corrector_mode(0.5, 0.494, g, lin);
    const Grid2D g2 = make_grid2d(g, 0.0, 4.0 * std::numbers::pi, 16);
    double w = 0.0;
    for (const auto& d : compatibility_check(carrier_field(m.w, 0.5, m.omega, 0.0, g2), sample_profile(lin, g), g2, 3))
      w = std::max({w, d.jump2_sup, d.jump3_sup});
    worst.push_back(w);
  }
  EXPECT_GT(worst[0] / worst[1], 3.0);
}
