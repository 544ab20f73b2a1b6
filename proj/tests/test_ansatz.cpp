#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kerrwave/ansatz/ansatz.hpp"
#include "kerrwave/core/norms.hpp"

using namespace kerrwave;

namespace {

const CorrectorSet& set() {
  static const CorrectorSet cs = compute_correctors(0.5, 0.494, make_grid(60.0, 0.1), decay_profile());
  return cs;
}

// Whole number of carrier periods near 40 / eps, dx2 <= 0.4.
AnsatzConfig config(double eps, double amp = 1.0, unsigned terms = terms_ext) {
  const CorrectorSet& cs = set();
  const double period = 2.0 * std::numbers::pi / cs.k0;
  const double Lx = std::round(40.0 / (eps * period)) * period;
  int n = 2;
  while (Lx / n > 0.4) n *= 2;
  const Grid2D g2 = make_grid2d(cs.m.grid, -0.5 * Lx, 0.5 * Lx, n);
  const EnvelopeField env = sample_envelope([amp](double X) { return cplx(amp * std::exp(-X * X / 4.0)); },
                                            eps * g2.x2_min, eps * Lx, 512);
  return AnsatzConfig{eps, &cs, env, g2, terms};
}

}  // namespace

TEST(Ansatz, LeadingTermIsLinearInAmplitude) {
  const Field2D a = build_U_ans(config(0.2, 1.0));
  const Field2D b = build_U_ans(config(0.2, 2.0));
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.comp(c).size(); ++i) ASSERT_NEAR(b.comp(c)[i], 2.0 * a.comp(c)[i], 1e-13);
}

TEST(Ansatz, ExtendedAnsatzAddsHigherOrderTerms) {
  const double eps = 0.2;
  const Field2D a = build_U_ans(config(eps));
  const Field2D e = build_U_ext(config(eps));
  const Grid2D g2 = config(eps).grid;
  const double ra = broken_norm(a, g2, 0);
  const double d = broken_norm(difference(e, a), g2, 0);
  EXPECT_GT(d, 0.0);
  EXPECT_LT(d, 2.0 * eps * ra);
}

TEST(Ansatz, MismatchedEnvelopeBoxIsRejected) {
  AnsatzConfig c = config(0.2);
  c.epsilon = 0.19;
  EXPECT_THROW(AnsatzEvaluator{c}, StructuralError);
}

TEST(Ansatz, ResidualOrdersAtInitialTime) {
  // Residual of U_ans is O(eps^1.5) and of U_ext O(eps^3.5) in L2.
  const double e1 = 0.2, e2 = 0.1;
  auto res = [](double eps, unsigned terms) {
    const AnsatzEvaluator ev(config(eps, 1.0, terms));
    return residual_norms(ev, set().coef);
  };
  const ResidualNorms a1 = res(e1, terms_ans), a2 = res(e2, terms_ans);
  const ResidualNorms x1 = res(e1, terms_ext), x2 = res(e2, terms_ext);
  EXPECT_NEAR(std::log2(a1.res_l2 / a2.res_l2), 1.5, 0.15);
  EXPECT_NEAR(std::log2(x1.res_l2 / x2.res_l2), 3.5, 0.3);
  EXPECT_NEAR(std::log2(a1.jump_d1_sup / a2.jump_d1_sup), 3.0, 0.15);
}

TEST(Ansatz, ResidualFieldNormMatchesSummary) {
  const AnsatzEvaluator ev(config(0.2, 1.0, terms_ans));
  const ResidualNorms r = residual_norms(ev, set().coef);
  const Field2D f = residual(ev, set().coef);
  EXPECT_NEAR(broken_norm(f, ev.config().grid, 0), r.res_l2, 1e-10 * r.res_l2);
}
