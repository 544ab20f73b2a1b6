#include <gtest/gtest.h>

#include <cmath>

#include "kerrwave/correctors/correctors.hpp"

using namespace kerrwave;

namespace {

const CorrectorSet& reference_set() {
  static const CorrectorSet cs = compute_correctors(0.5, 0.494, make_grid(60.0, 0.1), decay_profile());
  return cs;
}

double rel_norm(const ModeField& a, const ModeField& b, const Grid1D& g) {
  ModeField d = a;
  d += scaled(b, -1.0);
  return norm(d, g) / norm(b, g);
}

}  // namespace

TEST(Correctors, ModeIsInTheKernelOfT) {
  const CorrectorSet& cs = reference_set();
  const Grid1D& g = cs.m.grid;
  const TOperator t = assemble_T(cs.k0, cs.nu.nu0, g, decay_profile());
  EXPECT_LT(norm(t.apply(cs.m.w), g) / norm(cs.m.w, g), 1e-8);
}

TEST(Correctors, SystemsSolvedToTolerance) {
  const auto& d = reference_set().diag;
  EXPECT_LT(d.dkw_residual, 1e-8);
  EXPECT_LT(d.dk2w_residual, 1e-8);
  EXPECT_LT(d.p_residual, 1e-8);
  EXPECT_LT(d.h_residual, 1e-8);
  EXPECT_LT(d.p_defect, 1e-6);
}

TEST(Correctors, ThirdHarmonicSolutionReproducesRightHandSide) {
  const CorrectorSet& cs = reference_set();
  const Grid1D& g = cs.m.grid;
  const TOperator t3 = assemble_T(3.0 * cs.k0, 3.0 * cs.nu.nu0, g, decay_profile());
  const ModeField rhs = scaled(kerr_harmonic(cs.m.w, cs.coef, g, 3), -3.0 * cs.nu.nu0);
  EXPECT_LT(rel_norm(t3.apply(cs.h), rhs, g), 1e-8);
}

TEST(Correctors, SecondDerivativeOfDispersionMatchesVariationalFormula) {
  const CorrectorSet& cs = reference_set();
  EXPECT_NEAR(cs.nu.nu2, cs.diag.nu2_variational, 1e-6);
}

TEST(Correctors, JumpIdentitiesHold) {
  const auto& d = reference_set().diag;
  EXPECT_LT(d.p_jump_identity, 1e-10);
  EXPECT_LT(d.h_jump_identity, 1e-10);
}

TEST(Correctors, KappaIsLinearInKerrCoefficient) {
  const CorrectorSet& cs = reference_set();
  const SampledProfile c2 = sample_profile(decay_profile(2.0), cs.m.grid);
  EXPECT_NEAR(compute_kappa(cs.m, c2, cs.nu.nu0), 2.0 * cs.kappa, 1e-12 * std::abs(cs.kappa));
  const SampledProfile c0 = sample_profile(decay_profile(0.0), cs.m.grid);
  EXPECT_EQ(compute_kappa(cs.m, c0, cs.nu.nu0), 0.0);
}

TEST(Correctors, KernelComponentIsRejected) {
  const CorrectorSet& cs = reference_set();
  const TOperator t = assemble_T(cs.k0, cs.nu.nu0, cs.m.grid, decay_profile());
  EXPECT_THROW(solve_inhomogeneous(t, cs.m.w, cs.m.w), SolvabilityError);
}

TEST(Correctors, InhomogeneousSolutionIsOrthogonalToKernel) {
  const CorrectorSet& cs = reference_set();
  EXPECT_LT(std::abs(inner(cs.p, cs.m.w, cs.m.grid)), 1e-10 * norm(cs.p, cs.m.grid));
}
