#include <gtest/gtest.h>

#include <cmath>

#include "kerrwave/eigen/dispersion.hpp"

using namespace kerrwave;

TEST(Richardson, ExactForQuarticDispersion) {
  // Richardson on central differences is exact up to fourth-degree terms in the step.
  auto w = [](double k) { return 0.3 + 0.7 * k - 0.2 * k * k + 0.05 * k * k * k; };
  const Derivatives d = richardson_derivatives(w, 0.5, 0.01);
  EXPECT_NEAR(d.nu0, w(0.5), 1e-15);
  EXPECT_NEAR(d.nu1, 0.7 - 0.4 * 0.5 + 0.15 * 0.25, 1e-10);
  EXPECT_NEAR(d.nu2, -0.4 + 0.3 * 0.5, 1e-7);
}

TEST(Eigen, InterfaceModeOnModerateDomain) {
  ModeSearch s;
  s.d = 60.0;
  s.h = 0.02;
  const auto pairs = eigenpairs_at(0.5, 0.494, decay_profile(), s);
  ASSERT_FALSE(pairs.empty());
  EXPECT_NEAR(pairs.front().omega, 0.494, 5e-3);
  EXPECT_LT(pairs.front().residual, 1e-8);
}

TEST(Eigen, LiftedAndStaggeredAgreeToDiscretizationError) {
  ModeSearch a;
  a.d = 60.0;
  a.h = 0.02;
  ModeSearch b = a;
  b.scheme = Scheme::staggered;
  const double wa = eigenpairs_at(0.5, 0.494, decay_profile(), a).front().omega;
  const double wb = eigenpairs_at(0.5, 0.494, decay_profile(), b).front().omega;
  EXPECT_NEAR(wa, wb, 1e-3);
}

TEST(Eigen, ModeBelowEssentialSpectrum) {
  ModeSearch s;
  s.d = 60.0;
  s.h = 0.02;
  const auto pairs = eigenpairs_at(0.5, 0.494, decay_profile(), s);
  ASSERT_FALSE(pairs.empty());
  EXPECT_LT(pairs.front().omega, essential_threshold(0.5, decay_profile()));
}

TEST(Eigen, DomainDifferencesShrink) {
  const DomainStudy st = domain_study(0.5, 0.494, decay_profile(), 0.05, {15.0, 30.0, 60.0});
  ASSERT_EQ(st.omega.size(), 3u);
  EXPECT_LT(std::abs(st.omega[2] - st.omega[1]), std::abs(st.omega[1] - st.omega[0]));
}
