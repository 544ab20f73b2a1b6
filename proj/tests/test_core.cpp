#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kerrwave/core/norms.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/core/sampled.hpp"

using namespace kerrwave;

TEST(Grid, InterfaceSitsOnNodeAndRowsDuplicate) {
  const Grid1D g = make_grid(3.0, 0.5);
  EXPECT_EQ(g.n, 12);
  EXPECT_EQ(g.i0, 6);
  EXPECT_DOUBLE_EQ(g.node_x(g.i0), 0.0);
  EXPECT_EQ(g.n_broken(), g.n_nodes() + 1);
  EXPECT_EQ(g.broken_node(g.i0), g.broken_node(g.i0 + 1));
  EXPECT_EQ(g.broken_side(g.i0), Side::minus);
  EXPECT_EQ(g.broken_side(g.i0 + 1), Side::plus);
}

TEST(Grid, RejectsSpacingThatMissesTheInterface) {
  EXPECT_THROW(make_grid(1.0, 0.3), StructuralError);
  EXPECT_THROW(make_grid(-1.0, 0.1), StructuralError);
}

TEST(Norms, BrokenL2OfSmoothFunctionMatchesIntegral) {
  // int_{-d}^{d} cos^2(x) dx split at zero; trapezoid error O(h^2).
  const Grid1D g = make_grid(2.0, 0.01);
  std::vector<double> v(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) v[i] = std::cos(g.node_x(i));
  const double half = std::sqrt(1.0 + 0.25 * std::sin(4.0));
  EXPECT_NEAR(broken_norm(v, Layout::node, g, 0), 2.0 * half, 1e-4);
}

TEST(Norms, FirstOrderNormAddsDerivative) {
  const Grid1D g = make_grid(1.0, 0.001);
  std::vector<double> v(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) v[i] = g.node_x(i);
  // each side: int x^2 + 1 = 1/3 + 1
  EXPECT_NEAR(broken_norm(v, Layout::node, g, 1), 2.0 * std::sqrt(4.0 / 3.0), 1e-5);
}

TEST(Norms, AccumulatorMatchesFieldNorm) {
  const Grid1D g = make_grid(2.0, 0.25);
  const Grid2D g2 = make_grid2d(g, 0.0, 2.0 * std::numbers::pi, 8);
  Field2D f(g2);
  for (std::size_t i = 0; i < f.u1.size(); ++i) f.u1[i] = std::sin(0.3 * i);
  for (std::size_t i = 0; i < f.u2.size(); ++i) f.u2[i] = std::cos(0.7 * i);
  for (std::size_t i = 0; i < f.u3.size(); ++i) f.u3[i] = 0.01 * i;
  BrokenL2Accumulator acc(g2);
  for (int c = 0; c < g2.n_x2; ++c) {
    Staggered3<double> col(g);
    for (int r = 0; r < g.n_broken(); ++r) col.c1[r] = f.row1(r)[c];
    for (int j = 0; j < g.n_half(); ++j) col.c2[j] = f.row2(j)[c];
    for (int i = 0; i < g.n_nodes(); ++i) col.c3[i] = f.row3(i)[c];
    acc.add_column(col);
  }
  EXPECT_NEAR(acc.value(), broken_norm(f, g2, 0), 1e-12);
}

TEST(Norms, RejectsUnsupportedOrder) {
  const Grid1D g = make_grid(1.5, 0.5);
  std::vector<double> v(g.n_nodes(), 1.0);
  EXPECT_THROW(broken_norm(v, Layout::node, g, 4), UnsupportedOrderError);
}

TEST(Spectral, DerivativeOfTrigonometricPolynomialIsExact) {
  const int n = 32;
  const double L = 3.0;
  RealSpectral s(n, L);
  std::vector<double> f(n), d(n);
  const double k = 2.0 * std::numbers::pi * 3.0 / L;
  for (int j = 0; j < n; ++j) f[j] = std::sin(k * j * L / n);
  for (int order = 1; order <= 3; ++order) {
    s.derivative(f.data(), d.data(), order);
    for (int j = 0; j < n; ++j) {
      const double x = k * j * L / n;
      const double want = std::pow(k, order) * (order == 1 ? std::cos(x) : order == 2 ? -std::sin(x) : -std::cos(x));
      EXPECT_NEAR(d[j], want, 1e-10 * std::pow(k, order));
    }
  }
}

TEST(Profile, ExampleHasJumpAndDecay) {
  const PiecewiseProfile p = decay_profile();
  EXPECT_NEAR(p.eps1(Side::minus, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(p.eps1(Side::plus, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(p.eps1(Side::plus, 50.0), 1.0, 1e-15);
  EXPECT_GT(std::abs(p.relative_jump()), 0.1);
}

TEST(Profile, SampledInterfaceRowsAreOneSided) {
  const Grid1D g = make_grid(4.0, 0.5);
  const SampledProfile c = sample_profile(decay_profile(), g);
  EXPECT_NEAR(c.eps1_b[g.i0], 1.0, 1e-15);
  EXPECT_NEAR(c.eps1_b[g.i0 + 1], 2.0, 1e-15);
}
