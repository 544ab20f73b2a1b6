#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerrwave/correctors/correctors.hpp"
#include "kerrwave/maxwell/maxwell.hpp"

using namespace kerrwave;

namespace {

// Bisection oracle for a x + b x^3 = y on [0, hi], y >= 0.
double bisect(double a, double b, double y, double hi) {
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (a * m + b * m * m * m > y ? hi : lo) = m;
  }
  return 0.5 * (lo + hi);
}

// Smooth field localized near the interface, periodic in x2.
Field2D bump(const Grid2D& g2, double amp) {
  const Grid1D& g = g2.x1;
  Field2D f(g2);
  const double q = 2.0 * std::numbers::pi / g2.length_x2();
  for (int k = 0; k < g2.n_x2; ++k) {
    const double x2 = g2.x2(k);
    for (int r = 0; r < g.n_broken(); ++r)
      f.row1(r)[k] = amp * std::exp(-0.1 * std::pow(g.broken_x(r), 2)) * std::cos(q * x2);
    for (int j = 0; j < g.n_half(); ++j)
      f.row2(j)[k] = amp * std::exp(-0.1 * std::pow(g.half_x(j) - 0.5, 2)) * std::sin(2.0 * q * x2);
    for (int i = 1; i < g.n; ++i) f.row3(i)[k] = amp * std::exp(-0.1 * std::pow(g.node_x(i) + 1.0, 2)) * std::cos(q * x2 + 0.3);
  }
  return f;
}

double max_abs_diff(const Field2D& a, const Field2D& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.comp(c).size(); ++i) m = std::max(m, std::abs(a.comp(c)[i] - b.comp(c)[i]));
  return m;
}

}  // namespace

TEST(Constitutive, MonotoneCubicMatchesBisection) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ua(0.5, 3.0), ub(-1.0, 2.0), uy(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = ua(rng), b = ub(rng);
    double ymax = 5.0, hi = 5.0 / a;
    if (b < 0.0) {
      hi = std::sqrt(a / (-3.0 * b));
      ymax = (2.0 / 3.0) * a * hi;
    }
    const double y = uy(rng) * ymax;
    const double x = solve_monotone_cubic(a, b, y, uy(rng));
    EXPECT_NEAR(x, bisect(a, b, y, hi), 1e-12 * (1.0 + hi));
    EXPECT_NEAR(solve_monotone_cubic(a, b, -y), -x, 1e-12 * (1.0 + hi));
  }
}

TEST(Constitutive, DefocusingBranchEndsAtTheFold) {
  const double a = 1.0, b = -1.0, xc = std::sqrt(1.0 / 3.0);
  EXPECT_THROW(solve_monotone_cubic(a, b, (2.0 / 3.0) * xc * 1.001), FieldExitError);
  EXPECT_THROW(solve_monotone_cubic(0.0, 1.0, 1.0), DivisionError);
}

TEST(Constitutive, VectorInversionRoundTrip) {
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::array<double, 2> e{n(rng), n(rng)};
    const double eps1 = 1.5, eps3 = 0.7;
    const double s = eps1 + eps3 * (e[0] * e[0] + e[1] * e[1]);
    const auto back = invert_constitutive({s * e[0], s * e[1]}, eps1, eps3);
    EXPECT_NEAR(back[0], e[0], 1e-12 * (1.0 + std::abs(e[0])));
    EXPECT_NEAR(back[1], e[1], 1e-12 * (1.0 + std::abs(e[1])));
  }
}

TEST(Constitutive, SymbolMarginTakesSmallestEigenvalue) {
  EXPECT_DOUBLE_EQ(symbol_margin(1.0, -0.1, 1.0, 2.0, 0.5), 1.0 - 0.3 - 0.5);
  EXPECT_DOUBLE_EQ(symbol_margin(1.0, 0.1, 1.0, 0.8, 0.5), 0.3);
}

TEST(Maxwell, DiscreteLawInversionRoundTrip) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.25), 0.0, 8.0, 16);
  const MaterialState mat = make_material(decay_profile(), g2.x1);
  const Field2D e = bump(g2, 0.4);
  const Field2D d = displacement_from_field(e, mat, g2);
  Field2D back(g2);
  const int sweeps = field_from_displacement(d, mat, g2, back);
  EXPECT_GE(sweeps, 1);
  EXPECT_LT(max_abs_diff(back, e), 1e-12);
}

TEST(Maxwell, ZeroStateIsStationary) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.25), 0.0, 8.0, 16);
  MaxwellSolver sol(g2, decay_profile());
  FluxState s = sol.from_fields(Field2D(g2));
  for (int i = 0; i < 10; ++i) sol.step(s, sol.max_dt());
  for (int c = 0; c < 3; ++c)
    for (double v : s.f.comp(c)) ASSERT_EQ(v, 0.0);
}

TEST(Maxwell, CflViolationIsRejected) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.25), 0.0, 8.0, 16);
  MaxwellSolver sol(g2, decay_profile());
  FluxState s = sol.from_fields(Field2D(g2));
  EXPECT_THROW(sol.step(s, 1.01 * sol.max_dt(0.5), StepOptions{0.5, false}), StabilityError);
}

TEST(Maxwell, NonlinearRunConservesDivergenceAndInterfaceJump) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.125), 0.0, 8.0, 32);
  MaxwellSolver sol(g2, decay_profile());
  FluxState s = sol.from_fields(bump(g2, 0.5));
  const FluxDiagnostics d0 = flux_diagnostics(s.f, g2);
  const Field2D div0 = divergence_field(s.f, g2);
  const auto j0 = jump_at_interface(s.f, g2.x1);
  for (int i = 0; i < 40; ++i) sol.step(s, sol.max_dt(), StepOptions{0.5, true});
  const Field2D div1 = divergence_field(s.f, g2);
  const auto j1 = jump_at_interface(s.f, g2.x1);
  double dj = 0.0;
  for (std::size_t k = 0; k < j0.size(); ++k) dj = std::max(dj, std::abs(j1[k] - j0[k]));
  EXPECT_LT(max_abs_diff(div1, div0), 1e-12);
  EXPECT_LT(dj, 1e-13);
  EXPECT_GT(d0.div_l2 + d0.jump_sup, 0.0);
}

TEST(Maxwell, LinearEnergyErrorIsFourthOrderInTime) {
  const Grid2D g2 = make_grid2d(make_grid(6.0, 0.125), 0.0, 8.0, 32);
  const PiecewiseProfile lin = decay_profile(0.0);
  auto drift = [&](double cfl) {
    MaxwellSolver sol(g2, lin);
    FluxState s = sol.from_fields(bump(g2, 1.0));
    const double e0 = linear_energy(sol.fields(s), s.f, g2, lin.mu0);
    const double T = 4.0;
    const int n = static_cast<int>(std::ceil(T / sol.max_dt(cfl)));
    for (int i = 0; i < n; ++i) sol.step(s, T / n, StepOptions{cfl, false});
    return std::abs(linear_energy(sol.fields(s), s.f, g2, lin.mu0) - e0) / e0;
  };
  const double a = drift(0.5), b = drift(0.25);
  EXPECT_GT(a / b, 12.0);
}

TEST(Maxwell, DiscreteModeIsAnExactSemiDiscreteWave) {
  // With eps3 = 0 the staggered eigenmode on the same grid solves the
  // semi-discrete system exactly; only the time integrator errs.
  const Grid1D g = make_grid(30.0, 0.1);
  const PiecewiseProfile lin = decay_profile(0.0);
  const Mode m = corrector_mode(0.5, 0.494, g, lin);
  const Grid2D g2 = make_grid2d(g, 0.0, 2.0 * std::numbers::pi / m.k, 8);
  MaxwellSolver sol(g2, lin);
  FluxState s = sol.from_fields(carrier_field(m.w, m.k, m.omega, 0.0, g2));
  const double T = 5.0;
  const int n = static_cast<int>(std::ceil(T / sol.max_dt(0.5)));
  for (int i = 0; i < n; ++i) sol.step(s, T / n);
  const Field2D want = carrier_field(m.w, m.k, m.omega, s.t, g2);
  EXPECT_LT(max_abs_diff(sol.fields(s), want), 1e-8);
}
