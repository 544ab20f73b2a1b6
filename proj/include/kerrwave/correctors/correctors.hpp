#pragma once

#include <cmath>
#include <optional>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/core/sampled.hpp"
#include "kerrwave/correctors/operator.hpp"
#include "kerrwave/correctors/solve.hpp"
#include "kerrwave/eigen/dispersion.hpp"
#include "kerrwave/eigen/staggered.hpp"

namespace kerrwave {

// For the real field E = a e^{i theta} + c.c. with components (x, y), the
// e^{i theta} and e^{3 i theta} coefficients of (x^2 + y^2) x.
inline cplx cubic_first(cplx x, cplx y) {
  return 3.0 * std::norm(x) * x + y * y * std::conj(x) + 2.0 * std::norm(y) * x;
}
inline cplx cubic_third(cplx x, cplx y) { return (x * x + y * y) * x; }

// eps3-weighted harmonic of the discrete Kerr law on the staggered grid:
// component 1 pairs w1 with w2 interpolated to broken rows, component 2 pairs
// w2 with w1 averaged to half nodes. harmonic = 1 or 3.
inline ModeField kerr_harmonic(const ModeField& w, const SampledProfile& c, const Grid1D& g, int harmonic) {
  const auto w2b = half_to_broken(w.c2, g);
  const auto w1h = broken_to_half(w.c1, g);
  ModeField out(g);
  for (int r = 0; r < g.n_broken(); ++r)
    out.c1[r] = c.eps3_b[r] * (harmonic == 1 ? cubic_first(w.c1[r], w2b[r]) : cubic_third(w.c1[r], w2b[r]));
  for (int j = 0; j < g.n_half(); ++j)
    out.c2[j] = c.eps3_h[j] * (harmonic == 1 ? cubic_first(w.c2[j], w1h[j]) : cubic_third(w.c2[j], w1h[j]));
  return out;
}

// kappa = -nu0 <N(m), m>; for real m1, m3 and imaginary m2 this is
// -nu0 * integral eps3 (3 m1^4 - 2 m1^2 m2^2 + 3 m2^4).
inline double compute_kappa(const Mode& m, const SampledProfile& c, double nu0) {
  return -nu0 * std::real(inner(kerr_harmonic(m.w, c, m.grid, 1), m.w, m.grid));
}

inline ModeField scaled(ModeField f, cplx s) {
  f *= s;
  return f;
}

inline ModeField combine(const ModeField& a, cplx sa, const ModeField& b, cplx sb) {
  ModeField out = scaled(a, sa);
  out += scaled(b, sb);
  return out;
}

struct CorrectorDiagnostics {
  double dkw_defect = 0.0, dk2w_defect = 0.0, p_defect = 0.0;
  double dkw_residual = 0.0, dk2w_residual = 0.0, p_residual = 0.0, h_residual = 0.0;
  double nu2_variational = 0.0;  // -2 <(dkL + nu1 Lambda) dkw, m>
  double jump_eps1_dkw1 = 0.0;
  double jump_eps1_dk2w1 = 0.0;
  double p_jump_identity = 0.0;  // [eps1 p1] + [N(m)_1]
  double h_jump_identity = 0.0;  // [eps1 h1] + [N3(m)_1]
};

struct CorrectorSet {
  double k0 = 0.0;
  Derivatives nu;
  Mode m;
  ModeField dkw, dk2w, h, p;
  double kappa = 0.0;
  SampledProfile coef;
  CorrectorDiagnostics diag;
};

// Eigenmode of the staggered problem on g nearest to nu0_guess.
inline Mode corrector_mode(double k0, double nu0_guess, const Grid1D& g, const PiecewiseProfile& prof) {
  const StaggeredOperator op = assemble_staggered_operator(k0, g, prof);
  SolveOptions opt;
  opt.n_eigs = 4;
  const auto pairs = solve_staggered(op, nu0_guess, opt);
  if (pairs.empty()) throw ConvergenceError("no eigenvalue near the requested frequency", 0.0);
  return staggered_mode(pairs.front().w3, pairs.front().omega, k0, g, op.coef);
}

inline double weighted_jump(const std::vector<double>& a, const std::vector<cplx>& b, const Grid1D& g) {
  return std::abs(a[g.i0 + 1] * b[g.i0 + 1] - a[g.i0] * b[g.i0]);
}

struct CorrectorOptions {
  double dk = 0.01;
  double derivative_tol = 1e-6;  // solvability of the k-derivative systems (nu from differences)
  double p_tol = 1e-8;
};

// Everything the extended ansatz needs, computed on the staggered grid g so
// that the discrete corrector systems match the discrete Maxwell operator.
inline CorrectorSet compute_correctors(double k0, double nu0_guess, const Grid1D& g, const PiecewiseProfile& prof,
                                       const CorrectorOptions& copt = {}) {
  CorrectorSet cs;
  cs.k0 = k0;
  ModeSearch search;
  search.scheme = Scheme::staggered;
  search.d = g.d;
  search.h = g.h;
  cs.nu = dispersion_derivatives(k0, nu0_guess, prof, search, copt.dk);
  const double nu0 = cs.nu.nu0, nu1 = cs.nu.nu1, nu2 = cs.nu.nu2;
  cs.m = corrector_mode(k0, nu0, g, prof);
  cs.coef = sample_profile(prof, g);
  const ModeField& m = cs.m.w;
  const TOperator t = assemble_T(k0, nu0, g, prof);

  InhomogeneousOptions dopt;
  dopt.solvability_tol = copt.derivative_tol;
  const ModeField lam_m = apply_Lambda(cs.coef, g, m);
  const ModeField rhs1 = combine(apply_dkL(g, m), -1.0, lam_m, -nu1);
  auto s1 = solve_inhomogeneous(t, rhs1, m, dopt);
  cs.dkw = s1.v;
  const ModeField b1 = combine(apply_dkL(g, cs.dkw), 1.0, apply_Lambda(cs.coef, g, cs.dkw), nu1);
  cs.diag.nu2_variational = -2.0 * std::real(inner(b1, m, g));
  ModeField rhs2 = combine(b1, -2.0, lam_m, -nu2);
  auto s2 = solve_inhomogeneous(t, rhs2, m, dopt);
  cs.dk2w = s2.v;

  const ModeField n1 = kerr_harmonic(m, cs.coef, g, 1);
  cs.kappa = compute_kappa(cs.m, cs.coef, nu0);
  InhomogeneousOptions popt;
  popt.solvability_tol = copt.p_tol;
  auto sp = solve_inhomogeneous(t, combine(lam_m, -cs.kappa, n1, -nu0), m, popt);
  cs.p = sp.v;

  const TOperator t3 = assemble_T(3.0 * k0, 3.0 * nu0, g, prof);
  const ModeField n3 = kerr_harmonic(m, cs.coef, g, 3);
  auto sh = solve_inhomogeneous(t3, scaled(n3, -3.0 * nu0));
  cs.h = sh.v;

  cs.diag.dkw_defect = s1.defect;
  cs.diag.dk2w_defect = s2.defect;
  cs.diag.p_defect = sp.defect;
  cs.diag.dkw_residual = s1.residual;
  cs.diag.dk2w_residual = s2.residual;
  cs.diag.p_residual = sp.residual;
  cs.diag.h_residual = sh.residual;
  cs.diag.jump_eps1_dkw1 = weighted_jump(cs.coef.eps1_b, cs.dkw.c1, g);
  cs.diag.jump_eps1_dk2w1 = weighted_jump(cs.coef.eps1_b, cs.dk2w.c1, g);
  cs.diag.p_jump_identity = std::abs(jump_at_interface(combine(apply_Lambda(cs.coef, g, cs.p), 1.0, n1, 1.0).c1, g));
  cs.diag.h_jump_identity = std::abs(jump_at_interface(combine(apply_Lambda(cs.coef, g, cs.h), 1.0, n3, 1.0).c1, g));
  return cs;
}

}  // namespace kerrwave
