#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/core/sampled.hpp"
#include "kerrwave/linalg/fft.hpp"
#include "kerrwave/maxwell/constitutive.hpp"

namespace kerrwave {

// Coefficients on the staggered rows plus the positivity margin eta.
struct MaterialState {
  SampledProfile coef;
  double eps1_min = 0.0;
  double eps3_min = 0.0;
  double eta = 0.0;

  // Admissible |E| bound; unbounded unless eps3 takes negative values.
  double omega_radius() const {
    if (eps3_min >= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt((eps1_min - eta) / (-3.0 * eps3_min));
  }
};

inline MaterialState make_material(const PiecewiseProfile& p, const Grid1D& g) {
  MaterialState m;
  m.coef = sample_profile(p, g);
  m.eps1_min = std::min(*std::min_element(m.coef.eps1_b.begin(), m.coef.eps1_b.end()),
                        *std::min_element(m.coef.eps1_h.begin(), m.coef.eps1_h.end()));
  m.eps3_min = std::min(*std::min_element(m.coef.eps3_b.begin(), m.coef.eps3_b.end()),
                        *std::min_element(m.coef.eps3_h.begin(), m.coef.eps3_h.end()));
  if (!(m.eps1_min > 0.0)) throw StructuralError("eps1 must be positive on the grid");
  m.eta = 0.5 * std::min(m.coef.mu0, m.eps1_min);
  return m;
}

// State in flux form: u1 = D1 (broken rows), u2 = D2 (half nodes), u3 = H3 (nodes).
struct FluxState {
  Field2D f;
  double t = 0.0;
};

// Field state: u1 = E1, u2 = E2, u3 = H3, same layout.
using FieldState = Field2D;

// Discrete Kerr law D = (eps1 + eps3 (E1^2 + E2^2)) E, each component with the
// other one interpolated to its location (see half_to_broken / broken_to_half).
inline Field2D displacement_from_field(const Field2D& e, const MaterialState& mat, const Grid2D& g2) {
  const Grid1D& g = g2.x1;
  const auto& c = mat.coef;
  Field2D d = e;
  const int nx = g2.n_x2;
  for (int r = 0; r < g.n_broken(); ++r) {
    const Stencil2 s = half_to_broken_stencil(r, g);
    const double *e1 = e.row1(r), *a = e.row2(s.a), *b = e.row2(s.b);
    double* out = d.row1(r);
    for (int k = 0; k < nx; ++k) {
      const double o = s.wa * a[k] + s.wb * b[k];
      out[k] = (c.eps1_b[r] + c.eps3_b[r] * (e1[k] * e1[k] + o * o)) * e1[k];
    }
  }
  for (int j = 0; j < g.n_half(); ++j) {
    const Stencil2 s = broken_to_half_stencil(j, g);
    const double *e2 = e.row2(j), *a = e.row1(s.a), *b = e.row1(s.b);
    double* out = d.row2(j);
    for (int k = 0; k < nx; ++k) {
      const double o = s.wa * a[k] + s.wb * b[k];
      out[k] = (c.eps1_h[j] + c.eps3_h[j] * (e2[k] * e2[k] + o * o)) * e2[k];
    }
  }
  return d;
}

namespace detail {

// Solves (eps1 + eps3 (x^2 + o^2)) x = d along one row, o = wa oa + wb ob,
// with x holding the guess. Three branch-free Newton steps cover the usual
// case; points whose residual is not at rounding level are redone with the
// safeguarded scalar solver.
inline void solve_law_row(double eps1, double eps3, const double* d, const double* oa, const double* ob, double wa,
                          double wb, double* x, double* tmp, int nx, double& change, double& scale) {
  if (eps3 == 0.0) {
    double ch = change, sc = scale;
    for (int k = 0; k < nx; ++k) {
      const double xn = d[k] / eps1;
      ch = std::max(ch, std::abs(xn - x[k]));
      sc = std::max(sc, std::abs(xn));
      x[k] = xn;
    }
    change = ch;
    scale = sc;
    return;
  }
  int bad = 0;
  for (int k = 0; k < nx; ++k) {
    const double o = wa * oa[k] + wb * ob[k];
    const double a = eps1 + eps3 * o * o;
    double xk = x[k];
    for (int it = 0; it < 3; ++it) xk -= ((a + eps3 * xk * xk) * xk - d[k]) / (a + 3.0 * eps3 * xk * xk);
    const double res = (a + eps3 * xk * xk) * xk - d[k];
    bad += static_cast<int>(std::abs(res) > 1e-13 * std::abs(d[k])) | static_cast<int>(a + 3.0 * eps3 * xk * xk <= 0.0);
    tmp[k] = xk;
  }
  if (bad) {
    for (int k = 0; k < nx; ++k) {
      const double o = wa * oa[k] + wb * ob[k];
      const double a = eps1 + eps3 * o * o;
      const double res = (a + eps3 * tmp[k] * tmp[k]) * tmp[k] - d[k];
      if (!(std::abs(res) <= 1e-13 * std::abs(d[k]) && a + 3.0 * eps3 * tmp[k] * tmp[k] > 0.0))
        tmp[k] = solve_monotone_cubic(a, eps3, d[k], x[k]);
    }
  }
  double ch = change, sc = scale;
  for (int k = 0; k < nx; ++k) {
    ch = std::max(ch, std::abs(tmp[k] - x[k]));
    sc = std::max(sc, std::abs(tmp[k]));
    x[k] = tmp[k];
  }
  change = ch;
  scale = sc;
}

}  // namespace detail

// Inverts the discrete law by Gauss-Seidel sweeps over the two components,
// each a pointwise monotone cubic with the other component frozen. `e` holds
// the initial guess and receives the result (H3 is copied through).
inline int field_from_displacement(const Field2D& d, const MaterialState& mat, const Grid2D& g2, Field2D& e,
                                   double tol = 1e-14, int max_sweeps = 60) {
  const Grid1D& g = g2.x1;
  const auto& c = mat.coef;
  const int nx = g2.n_x2;
  if (e.n_x2 != nx) e = Field2D(g2);
  e.u3 = d.u3;
  bool linear = true;
  for (double v : c.eps3_b) linear = linear && v == 0.0;
  for (double v : c.eps3_h) linear = linear && v == 0.0;
  std::vector<double> tmp(nx);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0, scale = 0.0;
    for (int r = 0; r < g.n_broken(); ++r) {
      const Stencil2 s = half_to_broken_stencil(r, g);
      detail::solve_law_row(c.eps1_b[r], c.eps3_b[r], d.row1(r), e.row2(s.a), e.row2(s.b), s.wa, s.wb, e.row1(r),
                            tmp.data(), nx, change, scale);
    }
    for (int j = 0; j < g.n_half(); ++j) {
      const Stencil2 s = broken_to_half_stencil(j, g);
      detail::solve_law_row(c.eps1_h[j], c.eps3_h[j], d.row2(j), e.row1(s.a), e.row1(s.b), s.wa, s.wb, e.row2(j),
                            tmp.data(), nx, change, scale);
    }
    if (linear || change <= tol * std::max(scale, 1e-300)) return sweep;
  }
  throw ConvergenceError("constitutive inversion did not converge", 0.0);
}

// Smallest positivity margin of the quasilinear symbol over the grid.
inline double omega_margin(const Field2D& e, const MaterialState& mat, const Grid2D& g2) {
  const Grid1D& g = g2.x1;
  const auto& c = mat.coef;
  double m = std::numeric_limits<double>::infinity();
  for (int r = 0; r < g.n_broken(); ++r) {
    const Stencil2 s = half_to_broken_stencil(r, g);
    const double *e1 = e.row1(r), *a = e.row2(s.a), *b = e.row2(s.b);
    for (int k = 0; k < g2.n_x2; ++k) {
      const double o = s.wa * a[k] + s.wb * b[k];
      m = std::min(m, symbol_margin(c.eps1_b[r], c.eps3_b[r], e1[k] * e1[k] + o * o, c.mu0, mat.eta));
    }
  }
  return m;
}

struct StepOptions {
  double cfl = 0.5;
  bool check_margin = false;
};

// Semi-discrete system on the staggered grid, x2 derivatives spectral:
//   d_t D1 = d_x2 H3,  d_t D2 = -D+ H3,  mu0 d_t H3 = d_x2 <E1> - D- E2,
// H3 = 0 at x1 = -d, d. D1 and the divergence at half nodes evolve exactly
// as the continuum identities say: d_t [D1] = 0 and d_t div D = 0.
class MaxwellSolver {
 public:
  MaxwellSolver(const Grid2D& g2, const PiecewiseProfile& prof)
      : g2_(g2), mat_(make_material(prof, g2.x1)), spec_(std::make_unique<RealSpectral>(g2.n_x2, g2.length_x2())) {
    e_ = Field2D(g2);
  }

  const Grid2D& grid() const { return g2_; }
  const MaterialState& material() const { return mat_; }

  double max_dt(double cfl = 0.5) const {
    const double hmin = std::min(g2_.x1.h, g2_.dx2());
    return cfl * hmin * std::sqrt(mat_.coef.mu0 * mat_.eps1_min);
  }

  FluxState from_fields(const Field2D& e, double t = 0.0) const {
    FluxState s{displacement_from_field(e, mat_, g2_), t};
    return s;
  }

  // E (and H3) for a flux state; reuses the previous result as initial guess.
  const Field2D& fields(const FluxState& s) {
    field_from_displacement(s.f, mat_, g2_, e_);
    return e_;
  }

  Field2D rhs(const Field2D& y) {
    Field2D k(g2_);
    rhs(y, k);
    return k;
  }

  // k = time derivative of the flux state y (k must match the grid).
  void rhs(const Field2D& y, Field2D& k) {
    const Grid1D& g = g2_.x1;
    const int nx = g2_.n_x2;
    field_from_displacement(y, mat_, g2_, e_);
    dh_.assign(static_cast<std::size_t>(g.n_nodes()) * nx, 0.0);
    avg_.resize(nx);
    davg_.resize(nx);
    for (int i = 1; i < g.n; ++i) spec_->derivative(y.row3(i), dh_.data() + static_cast<std::size_t>(i) * nx, 1);
    for (int r = 0; r < g.n_broken(); ++r) {
      const double* src = dh_.data() + static_cast<std::size_t>(g.broken_node(r)) * nx;
      std::copy(src, src + nx, k.row1(r));
    }
    for (int j = 0; j < g.n_half(); ++j) {
      const double *a = y.row3(j + 1), *b = y.row3(j);
      double* out = k.row2(j);
      for (int c = 0; c < nx; ++c) out[c] = -(a[c] - b[c]) / g.h;
    }
    const double inv_mu = 1.0 / mat_.coef.mu0;
    std::fill(k.row3(0), k.row3(0) + nx, 0.0);
    std::fill(k.row3(g.n), k.row3(g.n) + nx, 0.0);
    for (int i = 1; i < g.n; ++i) {
      const Stencil2 s = broken_to_node_stencil(i, g);
      const double *a = e_.row1(s.a), *b = e_.row1(s.b);
      for (int c = 0; c < nx; ++c) avg_[c] = s.wa * a[c] + s.wb * b[c];
      spec_->derivative(avg_.data(), davg_.data(), 1);
      const double *e2r = e_.row2(i), *e2l = e_.row2(i - 1);
      double* out = k.row3(i);
      for (int c = 0; c < nx; ++c) out[c] = inv_mu * (davg_[c] - (e2r[c] - e2l[c]) / g.h);
    }
  }

  // One classical RK4 step.
  void step(FluxState& s, double dt, const StepOptions& opt = {}) {
    if (!(dt > 0.0) || dt > max_dt(opt.cfl) * (1.0 + 1e-12)) throw StabilityError("time step violates the CFL bound");
    if (k_[0].n_x2 != g2_.n_x2)
      for (auto& f : k_) f = Field2D(g2_);
    auto stage = [&](double a, const Field2D& k) {
      for (int c = 0; c < 3; ++c) {
        const auto& base = s.f.comp(c);
        const auto& kv = k.comp(c);
        auto& y = k_[4].comp(c);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = base[i] + a * kv[i];
      }
    };
    rhs(s.f, k_[0]);
    stage(0.5 * dt, k_[0]);
    rhs(k_[4], k_[1]);
    stage(0.5 * dt, k_[1]);
    rhs(k_[4], k_[2]);
    stage(dt, k_[2]);
    rhs(k_[4], k_[3]);
    for (int c = 0; c < 3; ++c) {
      auto& y = s.f.comp(c);
      const auto &a = k_[0].comp(c), &b = k_[1].comp(c), &q = k_[2].comp(c), &d = k_[3].comp(c);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += dt / 6.0 * (a[i] + 2.0 * (b[i] + q[i]) + d[i]);
    }
    s.t += dt;
    s.f.time_stamp = s.t;
    if (!s.f.finite()) throw StabilityError("non-finite field values");
    if (opt.check_margin && omega_margin(fields(s), mat_, g2_) <= 0.0)
      throw FieldExitError("field left the region where the symbol is positive");
  }

 private:
  Grid2D g2_;
  MaterialState mat_;
  std::unique_ptr<RealSpectral> spec_;
  Field2D e_;
  Field2D k_[5];  // four stages and the stage argument
  std::vector<double> dh_, avg_, davg_;
};

// 2 Re(a w(x1) exp(i (k x2 - omega t))) on the 2D grid.
inline Field2D carrier_field(const ModeField& w, double k, double omega, double t, const Grid2D& g2, cplx a = 1.0) {
  Field2D f(g2);
  std::vector<cplx> ph(g2.n_x2);
  for (int c = 0; c < g2.n_x2; ++c) ph[c] = 2.0 * a * std::exp(cplx(0.0, k * g2.x2(c) - omega * t));
  auto fill = [&](const std::vector<cplx>& col, int rows, std::vector<double>& out) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < g2.n_x2; ++c) out[static_cast<std::size_t>(r) * g2.n_x2 + c] = std::real(col[r] * ph[c]);
  };
  fill(w.c1, f.rows1, f.u1);
  fill(w.c2, f.rows2, f.u2);
  fill(w.c3, f.rows3, f.u3);
  f.time_stamp = t;
  return f;
}

// Discrete divergence of D at half nodes and the jump of D1, measured in L2
// (broken, x2 trapezoid) and sup over x2.
struct FluxDiagnostics {
  double div_l2 = 0.0;
  double jump_l2 = 0.0;
  double jump_sup = 0.0;
};

inline Field2D divergence_field(const Field2D& d, const Grid2D& g2) {
  const Grid1D& g = g2.x1;
  const int nx = g2.n_x2;
  RealSpectral spec(nx, g2.length_x2());
  Field2D out(g2);
  std::vector<double> dx(nx);
  for (int j = 0; j < g.n_half(); ++j) {
    const Stencil2 s = broken_to_half_stencil(j, g);
    spec.derivative(d.row2(j), dx.data(), 1);
    const double *a = d.row1(s.a), *b = d.row1(s.b);
    double* o = out.row2(j);
    for (int c = 0; c < nx; ++c) o[c] = (b[c] - a[c]) / g.h + dx[c];
  }
  return out;
}

inline FluxDiagnostics flux_diagnostics(const Field2D& d, const Grid2D& g2) {
  const Grid1D& g = g2.x1;
  const Field2D div = divergence_field(d, g2);
  FluxDiagnostics out;
  double sm = 0.0, sp = 0.0;
  for (int j = 0; j < g.n_half(); ++j) {
    const double* row = div.row2(j);
    double s = 0.0;
    for (int c = 0; c < g2.n_x2; ++c) s += row[c] * row[c];
    (j < g.i0 ? sm : sp) += s * g.h * g2.dx2();
  }
  out.div_l2 = std::sqrt(sm) + std::sqrt(sp);
  const auto jump = jump_at_interface(d, g);
  double sj = 0.0;
  for (double v : jump) sj += v * v, out.jump_sup = std::max(out.jump_sup, std::abs(v));
  out.jump_l2 = std::sqrt(sj * g2.dx2());
  return out;
}

// Discrete field energy 1/2 sum (E . D + mu0 H3^2) with the trapezoid weights;
// conserved by the semi-discrete linear scheme.
inline double linear_energy(const Field2D& e, const Field2D& d, const Grid2D& g2, double mu0) {
  const Grid1D& g = g2.x1;
  double s = 0.0;
  for (int r = 0; r < g.n_broken(); ++r) {
    const double *a = e.row1(r), *b = d.row1(r);
    double t = 0.0;
    for (int c = 0; c < g2.n_x2; ++c) t += a[c] * b[c];
    s += g.broken_weight(r) * t;
  }
  for (int j = 0; j < g.n_half(); ++j) {
    const double *a = e.row2(j), *b = d.row2(j);
    double t = 0.0;
    for (int c = 0; c < g2.n_x2; ++c) t += a[c] * b[c];
    s += g.half_weight(j) * t;
  }
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double* a = d.row3(i);
    double t = 0.0;
    for (int c = 0; c < g2.n_x2; ++c) t += a[c] * a[c];
    s += g.node_weight(i) * mu0 * t;
  }
  return 0.5 * s * g2.dx2();
}

}  // namespace kerrwave
