#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/norms.hpp"
#include "kerrwave/core/sampled.hpp"
#include "kerrwave/correctors/correctors.hpp"
#include "kerrwave/nls/envelope.hpp"

namespace kerrwave {

// Envelope and the derivatives the ansatz needs, sampled on the x2 grid.
struct EnvelopeJet {
  std::vector<cplx> A, AX, AXX, AXXX, AT, AXT, AXXT;
};

inline EnvelopeJet envelope_jet(const EnvelopeField& env, double nu2, double kappa, double shift, int n_out) {
  EnvelopeJet j;
  j.A = shifted_samples(env, shift, n_out);
  j.AX = shifted_samples(spectral_derivative(env, 1), shift, n_out);
  j.AXX = shifted_samples(spectral_derivative(env, 2), shift, n_out);
  j.AXXX = shifted_samples(spectral_derivative(env, 3), shift, n_out);
  j.AT = shifted_samples(time_derivative(env, nu2, kappa, 0), shift, n_out);
  j.AXT = shifted_samples(time_derivative(env, nu2, kappa, 1), shift, n_out);
  j.AXXT = shifted_samples(time_derivative(env, nu2, kappa, 2), shift, n_out);
  return j;
}

// Terms of the extended wave packet, in order:
//   eps A m F, -eps^2 i A_X dkw F, -eps^3 A_XX dk2w F / 2, eps^3 |A|^2 A p F, eps^3 A^3 h F^3
// with F = exp(i (k0 x2 - nu0 t)), X = eps (x2 - nu1 t), T = eps^2 t.
enum AnsatzTerm : unsigned {
  term_m = 1u,
  term_dkw = 2u,
  term_dk2w = 4u,
  term_p = 8u,
  term_h = 16u,
  terms_ans = term_m,
  terms_ext = 31u,
};

struct AnsatzConfig {
  double epsilon = 0.1;
  const CorrectorSet* correctors = nullptr;
  EnvelopeField envelope;  // at slow time T = envelope.T
  Grid2D grid;
  unsigned terms = terms_ext;
};

inline double physical_time(const AnsatzConfig& cfg) { return cfg.envelope.T / (cfg.epsilon * cfg.epsilon); }

// The envelope box must be the x2 box seen through X = eps x2.
inline void check_envelope_box(const AnsatzConfig& cfg) {
  const double want = cfg.epsilon * cfg.grid.length_x2();
  if (std::abs(cfg.envelope.L - want) > 1e-10 * want)
    throw StructuralError("envelope period must equal eps times the x2 period");
}

// One x2 column of a field and of its t- and x2-derivatives.
struct Column {
  Staggered3<double> u, ut, ux;
};

// A real field sum over c(x1) g(x2, t) + c.c. with per-column scalars.
struct TermSeries {
  struct Term {
    ModeField c;
    std::vector<cplx> g, gt, gx;
  };
  std::vector<Term> terms;

  void column(int col, const Grid1D& g1, Column& out, bool with_derivatives = true) const {
    out.u = Staggered3<double>(g1);
    if (with_derivatives) {
      out.ut = Staggered3<double>(g1);
      out.ux = Staggered3<double>(g1);
    }
    for (const auto& t : terms) {
      const cplx g = t.g[col];
      auto acc = [&](const std::vector<cplx>& c, std::vector<double>& u, std::vector<double>& ut,
                     std::vector<double>& ux) {
        for (std::size_t q = 0; q < c.size(); ++q) {
          u[q] += 2.0 * std::real(c[q] * g);
          if (with_derivatives) {
            ut[q] += 2.0 * std::real(c[q] * t.gt[col]);
            ux[q] += 2.0 * std::real(c[q] * t.gx[col]);
          }
        }
      };
      acc(t.c.c1, out.u.c1, out.ut.c1, out.ux.c1);
      acc(t.c.c2, out.u.c2, out.ut.c2, out.ux.c2);
      acc(t.c.c3, out.u.c3, out.ut.c3, out.ux.c3);
    }
  }

  Field2D field(const Grid2D& g2) const {
    Field2D f(g2);
    Column col;
    for (int c = 0; c < g2.n_x2; ++c) {
      column(c, g2.x1, col, false);
      for (int r = 0; r < f.rows1; ++r) f.row1(r)[c] = col.u.c1[r];
      for (int j = 0; j < f.rows2; ++j) f.row2(j)[c] = col.u.c2[j];
      for (int i = 0; i < f.rows3; ++i) f.row3(i)[c] = col.u.c3[i];
    }
    return f;
  }
};

class AnsatzEvaluator {
 public:
  explicit AnsatzEvaluator(const AnsatzConfig& cfg) : cfg_(cfg) {
    if (!cfg.correctors) throw StructuralError("ansatz needs a corrector set");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw StructuralError("epsilon must lie in (0, 1)");
    check_envelope_box(cfg);
    const CorrectorSet& cs = *cfg.correctors;
    const Grid2D& g2 = cfg.grid;
    const double eps = cfg.epsilon, t = physical_time(cfg);
    const double nu0 = cs.nu.nu0, nu1 = cs.nu.nu1, nu2 = cs.nu.nu2, k0 = cs.k0;
    const int n = g2.n_x2;
    const double shift = eps * g2.x2_min - eps * nu1 * t - cfg.envelope.x0;
    jet_ = envelope_jet(cfg.envelope, nu2, cs.kappa, shift, n);
    const cplx I(0.0, 1.0);
    f1_.resize(n);
    for (int c = 0; c < n; ++c) f1_[c] = std::exp(I * (k0 * g2.x2(c) - nu0 * t));

    auto add = [&](unsigned flag, const ModeField& field, int harmonic, int power,
                   const std::function<cplx(int)>& G, const std::function<cplx(int)>& GX,
                   const std::function<cplx(int)>& GT) {
      if (!(cfg.terms & flag)) return;
      TermSeries::Term term{field, std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
      const double ep = std::pow(eps, power);
      for (int c = 0; c < n; ++c) {
        const cplx F = std::pow(f1_[c], harmonic);
        const cplx g = G(c), gx = GX(c), gt = GT(c);
        term.g[c] = ep * g * F;
        term.gt[c] = ep * (-eps * nu1 * gx + eps * eps * gt - I * double(harmonic) * nu0 * g) * F;
        term.gx[c] = ep * (eps * gx + I * double(harmonic) * k0 * g) * F;
      }
      series_.terms.push_back(std::move(term));
    };
    const EnvelopeJet& j = jet_;
    add(term_m, cs.m.w, 1, 1, [&](int c) { return j.A[c]; }, [&](int c) { return j.AX[c]; },
        [&](int c) { return j.AT[c]; });
    add(term_dkw, cs.dkw, 1, 2, [&](int c) { return -I * j.AX[c]; }, [&](int c) { return -I * j.AXX[c]; },
        [&](int c) { return -I * j.AXT[c]; });
    add(term_dk2w, cs.dk2w, 1, 3, [&](int c) { return -0.5 * j.AXX[c]; }, [&](int c) { return -0.5 * j.AXXX[c]; },
        [&](int c) { return -0.5 * j.AXXT[c]; });
    add(term_p, cs.p, 1, 3, [&](int c) { return std::norm(j.A[c]) * j.A[c]; },
        [&](int c) { return 2.0 * std::norm(j.A[c]) * j.AX[c] + j.A[c] * j.A[c] * std::conj(j.AX[c]); },
        [&](int c) { return 2.0 * std::norm(j.A[c]) * j.AT[c] + j.A[c] * j.A[c] * std::conj(j.AT[c]); });
    add(term_h, cs.h, 3, 3, [&](int c) { return j.A[c] * j.A[c] * j.A[c]; },
        [&](int c) { return 3.0 * j.A[c] * j.A[c] * j.AX[c]; }, [&](int c) { return 3.0 * j.A[c] * j.A[c] * j.AT[c]; });
  }

  const AnsatzConfig& config() const { return cfg_; }
  const EnvelopeJet& jet() const { return jet_; }
  const std::vector<cplx>& carrier() const { return f1_; }
  const TermSeries& series() const { return series_; }
  void column(int c, Column& out) const { series_.column(c, cfg_.grid.x1, out); }
  Field2D field() const { return series_.field(cfg_.grid); }

 private:
  AnsatzConfig cfg_;
  EnvelopeJet jet_;
  std::vector<cplx> f1_;
  TermSeries series_;
};

inline Field2D build_U_ans(AnsatzConfig cfg) {
  cfg.terms = terms_ans;
  return AnsatzEvaluator(cfg).field();
}

inline Field2D build_U_ext(AnsatzConfig cfg) {
  cfg.terms = terms_ext;
  return AnsatzEvaluator(cfg).field();
}

// Discrete Kerr law and its time and x2 derivatives on one column.
struct DisplacementColumn {
  std::vector<double> d1, d2;  // broken rows, half nodes
};

inline DisplacementColumn displacement(const Staggered3<double>& u, const SampledProfile& c, const Grid1D& g) {
  DisplacementColumn d;
  d.d1.resize(g.n_broken());
  d.d2.resize(g.n_half());
  for (int r = 0; r < g.n_broken(); ++r) {
    const Stencil2 s = half_to_broken_stencil(r, g);
    const double o = s.wa * u.c2[s.a] + s.wb * u.c2[s.b];
    d.d1[r] = (c.eps1_b[r] + c.eps3_b[r] * (u.c1[r] * u.c1[r] + o * o)) * u.c1[r];
  }
  for (int j = 0; j < g.n_half(); ++j) {
    const Stencil2 s = broken_to_half_stencil(j, g);
    const double o = s.wa * u.c1[s.a] + s.wb * u.c1[s.b];
    d.d2[j] = (c.eps1_h[j] + c.eps3_h[j] * (u.c2[j] * u.c2[j] + o * o)) * u.c2[j];
  }
  return d;
}

// Directional derivative of the Kerr law at u in direction v.
inline DisplacementColumn displacement_rate(const Staggered3<double>& u, const std::vector<double>& v1,
                                            const std::vector<double>& v2, const SampledProfile& c, const Grid1D& g) {
  DisplacementColumn d;
  d.d1.resize(g.n_broken());
  d.d2.resize(g.n_half());
  for (int r = 0; r < g.n_broken(); ++r) {
    const Stencil2 s = half_to_broken_stencil(r, g);
    const double o = s.wa * u.c2[s.a] + s.wb * u.c2[s.b];
    const double ov = s.wa * v2[s.a] + s.wb * v2[s.b];
    const double e = u.c1[r];
    d.d1[r] = c.eps1_b[r] * v1[r] + c.eps3_b[r] * ((e * e + o * o) * v1[r] + 2.0 * (e * v1[r] + o * ov) * e);
  }
  for (int j = 0; j < g.n_half(); ++j) {
    const Stencil2 s = broken_to_half_stencil(j, g);
    const double o = s.wa * u.c1[s.a] + s.wb * u.c1[s.b];
    const double ov = s.wa * v1[s.a] + s.wb * v1[s.b];
    const double e = u.c2[j];
    d.d2[j] = c.eps1_h[j] * v2[j] + c.eps3_h[j] * ((e * e + o * o) * v2[j] + 2.0 * (e * v2[j] + o * ov) * e);
  }
  return d;
}

// Res = (d_t D1 - d_x2 U3, d_t D2 + d_x1 U3, -d_x2 U1 + d_x1 U2 + mu0 d_t U3) on
// the staggered column; row 3 vanishes at the Dirichlet ends.
inline Staggered3<double> residual_column(const Column& col, const SampledProfile& c, const Grid1D& g) {
  Staggered3<double> res(g);
  const DisplacementColumn dt = displacement_rate(col.u, col.ut.c1, col.ut.c2, c, g);
  for (int r = 0; r < g.n_broken(); ++r) res.c1[r] = dt.d1[r] - col.ux.c3[g.broken_node(r)];
  for (int j = 0; j < g.n_half(); ++j) res.c2[j] = dt.d2[j] + (col.u.c3[j + 1] - col.u.c3[j]) / g.h;
  for (int i = 1; i < g.n; ++i) {
    const Stencil2 s = broken_to_node_stencil(i, g);
    const double ux1 = s.wa * col.ux.c1[s.a] + s.wb * col.ux.c1[s.b];
    res.c3[i] = -ux1 + (col.u.c2[i] - col.u.c2[i - 1]) / g.h + c.mu0 * col.ut.c3[i];
  }
  return res;
}

// Divergence d_x1 D1 + d_x2 D2 at half nodes (one-sided pairs, never across the
// interface) and the jump of D1 across the interface.
struct DivergenceColumn {
  std::vector<double> div;
  double jump_d1 = 0.0;
};

inline DivergenceColumn divergence_column(const Column& col, const SampledProfile& c, const Grid1D& g) {
  const DisplacementColumn d = displacement(col.u, c, g);
  const DisplacementColumn dx = displacement_rate(col.u, col.ux.c1, col.ux.c2, c, g);
  DivergenceColumn out;
  out.div.resize(g.n_half());
  for (int j = 0; j < g.n_half(); ++j) {
    const Stencil2 s = broken_to_half_stencil(j, g);
    out.div[j] = (d.d1[s.b] - d.d1[s.a]) / g.h + dx.d2[j];
  }
  out.jump_d1 = d.d1[g.i0 + 1] - d.d1[g.i0];
  return out;
}

struct ResidualNorms {
  double res_l2 = 0.0;       // broken L2 of the residual
  double res_sup = 0.0;      // max modulus of the residual
  double div_l2 = 0.0;       // L2 of the divergence of D
  double jump_d1_sup = 0.0;  // max over x2 of |[D1]|
  double jump_d1_l2 = 0.0;   // L2 in x2 of [D1]
  double field_l2 = 0.0;     // broken L2 of the field itself
};

inline double sup_abs(const Staggered3<double>& s) {
  double m = 0.0;
  for (double v : s.c1) m = std::max(m, std::abs(v));
  for (double v : s.c2) m = std::max(m, std::abs(v));
  for (double v : s.c3) m = std::max(m, std::abs(v));
  return m;
}

// Residual, divergence and jump measured column by column.
inline ResidualNorms residual_norms(const AnsatzEvaluator& ev, const SampledProfile& c) {
  const Grid2D& g2 = ev.config().grid;
  const Grid1D& g = g2.x1;
  BrokenL2Accumulator res(g2), fld(g2);
  ResidualNorms out;
  double div_sq_m = 0.0, div_sq_p = 0.0, jump_sq = 0.0;
  Column col;
  for (int k = 0; k < g2.n_x2; ++k) {
    ev.column(k, col);
    const Staggered3<double> r = residual_column(col, c, g);
    res.add_column(r);
    fld.add_column(col.u);
    out.res_sup = std::max(out.res_sup, sup_abs(r));
    const DivergenceColumn dv = divergence_column(col, c, g);
    for (int j = 0; j < g.n_half(); ++j) (j < g.i0 ? div_sq_m : div_sq_p) += g.h * g2.dx2() * dv.div[j] * dv.div[j];
    jump_sq += g2.dx2() * dv.jump_d1 * dv.jump_d1;
    out.jump_d1_sup = std::max(out.jump_d1_sup, std::abs(dv.jump_d1));
  }
  out.res_l2 = res.value();
  out.field_l2 = fld.value();
  out.div_l2 = std::sqrt(div_sq_m) + std::sqrt(div_sq_p);
  out.jump_d1_l2 = std::sqrt(jump_sq);
  return out;
}

// Residual field on the whole 2D grid (small grids; tests and snapshots).
inline Field2D residual(const AnsatzEvaluator& ev, const SampledProfile& c) {
  const Grid2D& g2 = ev.config().grid;
  Field2D f(g2);
  Column col;
  for (int k = 0; k < g2.n_x2; ++k) {
    ev.column(k, col);
    const Staggered3<double> r = residual_column(col, c, g2.x1);
    for (int q = 0; q < f.rows1; ++q) f.row1(q)[k] = r.c1[q];
    for (int q = 0; q < f.rows2; ++q) f.row2(q)[k] = r.c2[q];
    for (int q = 0; q < f.rows3; ++q) f.row3(q)[k] = r.c3[q];
  }
  return f;
}

// B c = (dk L + nu1 Lambda) c.
inline ModeField apply_B(const CorrectorSet& cs, const ModeField& c) {
  return combine(apply_dkL(cs.m.grid, c), 1.0, apply_Lambda(cs.coef, cs.m.grid, c), cs.nu.nu1);
}

// Bilinear Kerr products of the mode a with a second field b, on the staggered
// locations (own component paired with the interpolated other one):
//   which = 1: 2 (a . conj b) a + (a . a) conj b
//   which = 2: 2 (conj a . b) a + 2 (a . b) conj a + 2 |a|^2 b
//   which = 3: 2 (a . b) a + (a . a) b
inline ModeField kerr_bilinear(const ModeField& a, const ModeField& b, const SampledProfile& c, const Grid1D& g,
                               int which) {
  auto f = [which](cplx ao, cplx ax, cplx bo, cplx bx) -> cplx {
    switch (which) {
      case 1: return 2.0 * (ao * std::conj(bo) + ax * std::conj(bx)) * ao + (ao * ao + ax * ax) * std::conj(bo);
      case 2:
        return 2.0 * (std::conj(ao) * bo + std::conj(ax) * bx) * ao + 2.0 * (ao * bo + ax * bx) * std::conj(ao) +
               2.0 * (std::norm(ao) + std::norm(ax)) * bo;
      default: return 2.0 * (ao * bo + ax * bx) * ao + (ao * ao + ax * ax) * bo;
    }
  };
  const auto a2 = half_to_broken(a.c2, g), b2 = half_to_broken(b.c2, g);
  const auto a1 = broken_to_half(a.c1, g), b1 = broken_to_half(b.c1, g);
  ModeField out(g);
  for (int r = 0; r < g.n_broken(); ++r) out.c1[r] = c.eps3_b[r] * f(a.c1[r], a2[r], b.c1[r], b2[r]);
  for (int j = 0; j < g.n_half(); ++j) out.c2[j] = c.eps3_h[j] * f(a.c2[j], a1[j], b.c2[j], b1[j]);
  return out;
}

// The eps^4 part of Res(U_ext) in closed form, with A solving the amplitude
// equation. With a = A m and b = -i A_X dkw, the F part is
//   -i A_XT Lambda dkw + A_XXX/2 B dk2w - (|A|^2 A)_X (B p + nu1 N1(m)) - i nu0 N'(a)[b]|_F
// and the F^3 part is -3 A^2 A_X (B h + nu1 N3(m)) - 3 i nu0 N'(a)[b]|_{F^3},
// where B = dk L + nu1 Lambda and N' is the linearized Kerr law.
inline TermSeries residual_order4_oracle(const AnsatzEvaluator& ev) {
  const AnsatzConfig& cfg = ev.config();
  const CorrectorSet& cs = *cfg.correctors;
  const Grid1D& g = cs.m.grid;
  const EnvelopeJet& j = ev.jet();
  const int n = cfg.grid.n_x2;
  const double e4 = std::pow(cfg.epsilon, 4), nu0 = cs.nu.nu0, nu1 = cs.nu.nu1;
  const cplx I(0.0, 1.0);
  TermSeries s;
  auto add = [&](ModeField field, int harmonic, const std::function<cplx(int)>& scalar) {
    TermSeries::Term t{std::move(field), std::vector<cplx>(n), {}, {}};
    for (int c = 0; c < n; ++c) t.g[c] = e4 * scalar(c) * std::pow(ev.carrier()[c], harmonic);
    s.terms.push_back(std::move(t));
  };
  auto cubic_x = [&](int c) { return 2.0 * std::norm(j.A[c]) * j.AX[c] + j.A[c] * j.A[c] * std::conj(j.AX[c]); };
  const ModeField n1 = kerr_harmonic(cs.m.w, cs.coef, g, 1);
  const ModeField n3 = kerr_harmonic(cs.m.w, cs.coef, g, 3);
  add(apply_Lambda(cs.coef, g, cs.dkw), 1, [&](int c) { return -I * j.AXT[c]; });
  add(apply_B(cs, cs.dk2w), 1, [&](int c) { return 0.5 * j.AXXX[c]; });
  add(combine(apply_B(cs, cs.p), 1.0, n1, nu1), 1, [&](int c) { return -cubic_x(c); });
  add(kerr_bilinear(cs.m.w, cs.dkw, cs.coef, g, 1), 1,
      [&](int c) { return nu0 * j.A[c] * j.A[c] * std::conj(j.AX[c]); });
  add(kerr_bilinear(cs.m.w, cs.dkw, cs.coef, g, 2), 1, [&](int c) { return -nu0 * std::norm(j.A[c]) * j.AX[c]; });
  add(combine(apply_B(cs, cs.h), 1.0, n3, nu1), 3, [&](int c) { return -3.0 * j.A[c] * j.A[c] * j.AX[c]; });
  add(kerr_bilinear(cs.m.w, cs.dkw, cs.coef, g, 3), 3,
      [&](int c) { return -3.0 * nu0 * j.A[c] * j.A[c] * j.AX[c]; });
  return s;
}

struct OracleGap {
  double gap_l2 = 0.0;   // || Res(U_ext) - eps^4 R4 ||_L2
  double gap_sup = 0.0;  // same in max norm
  double res_l2 = 0.0;
  double oracle_l2 = 0.0;
};

inline OracleGap oracle_gap(const AnsatzEvaluator& ev, const SampledProfile& c) {
  const Grid2D& g2 = ev.config().grid;
  const Grid1D& g = g2.x1;
  const TermSeries oracle = residual_order4_oracle(ev);
  BrokenL2Accumulator gap(g2), res(g2), orc(g2);
  OracleGap out;
  Column col, oc;
  for (int k = 0; k < g2.n_x2; ++k) {
    ev.column(k, col);
    Staggered3<double> r = residual_column(col, c, g);
    oracle.column(k, g, oc, false);
    res.add_column(r);
    orc.add_column(oc.u);
    for (std::size_t q = 0; q < r.c1.size(); ++q) r.c1[q] -= oc.u.c1[q];
    for (std::size_t q = 0; q < r.c2.size(); ++q) r.c2[q] -= oc.u.c2[q];
    for (std::size_t q = 0; q < r.c3.size(); ++q) r.c3[q] -= oc.u.c3[q];
    gap.add_column(r);
    out.gap_sup = std::max(out.gap_sup, sup_abs(r));
  }
  out.gap_l2 = gap.value();
  out.res_l2 = res.value();
  out.oracle_l2 = orc.value();
  return out;
}

}  // namespace kerrwave
