#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/norms.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/eigen/krylov.hpp"
#include "kerrwave/linalg/banded.hpp"

namespace kerrwave {

// Second-order form for w3 on the nodes, with the kink at the interface carried
// by a lift: w3 = u + c * s, s = u'(0) from a one-sided stencil on the right,
// c = -sgn(jump) * (1 for x < 0, exp(-|jump| x) for x >= 0), jump the relative
// jump of eps1. Unknowns are u at the interior nodes 1..n-1.
//
//   A = band + a ell^T,   B = diag(e) (I + c ell^T)
struct ReducedOperator {
  Grid1D grid;
  double k = 0.0;
  double rel_jump = 0.0;
  BandMatrix<double> band;  // tridiagonal part
  RealVec a;                 // rank-one column of A
  RealVec ell;               // stencil for u'(0) (three non-zeros)
  RealVec e;                 // eps1 * mu0
  RealVec c;                 // lift shape at interior nodes
  double c_left = 0.0, c_right = 0.0;  // lift shape at -d and d

  int size() const { return grid.n - 1; }

  double ell_dot(const RealVec& u) const {
    double s = 0.0;
    for (std::size_t q = 0; q < u.size(); ++q) s += ell[q] * u[q];
    return s;
  }

  RealVec apply_a(const RealVec& u) const {
    RealVec y = band.multiply(u);
    const double s = ell_dot(u);
    for (std::size_t q = 0; q < y.size(); ++q) y[q] += a[q] * s;
    return y;
  }

  RealVec apply_b(const RealVec& u) const {
    const double s = ell_dot(u);
    RealVec y(u.size());
    for (std::size_t q = 0; q < y.size(); ++q) y[q] = e[q] * (u[q] + c[q] * s);
    return y;
  }

  // Full w3 on all nodes (zero at both ends by construction).
  RealVec w3_from_u(const RealVec& u) const {
    const double s = ell_dot(u);
    RealVec w(grid.n_nodes(), 0.0);
    for (int q = 0; q < size(); ++q) w[q + 1] = u[q] + c[q] * s;
    return w;
  }

  std::vector<std::vector<double>> to_dense_a() const {
    const int m = size();
    std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i)
      for (int j = std::max(0, i - 1); j <= std::min(m - 1, i + 1); ++j) d[i][j] = band.get(i, j);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) d[i][j] += a[i] * ell[j];
    return d;
  }

  std::vector<std::vector<double>> to_dense_b() const {
    const int m = size();
    std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i) {
      d[i][i] += e[i];
      for (int j = 0; j < m; ++j) d[i][j] += e[i] * c[i] * ell[j];
    }
    return d;
  }

  GeneralizedProblem problem() const {
    GeneralizedProblem p;
    p.n = size();
    p.apply_a = [this](const RealVec& u) { return apply_a(u); };
    p.apply_b = [this](const RealVec& u) { return apply_b(u); };
    p.shifted_solver = [this](double s) -> LinearMap {
      BandMatrix<double> m = band;
      RealVec col(size());
      for (int q = 0; q < size(); ++q) {
        m.add(q, q, -s * e[q]);
        col[q] = a[q] - s * e[q] * c[q];
      }
      auto solver = std::make_shared<LowRankUpdatedSolver<double>>(BandLU<double>(std::move(m)),
                                                                   std::vector<RealVec>{col}, std::vector<RealVec>{ell});
      return [solver](const RealVec& b) { return solver->solve(b); };
    };
    return p;
  }
};

inline ReducedOperator assemble_reduced_operator(double k, const Grid1D& g, const PiecewiseProfile& prof) {
  if (!(g.h > 0.0)) throw StructuralError("non-positive grid spacing");
  if (g.n_plus() < 3) throw StructuralError("right block too short for the one-sided stencil");
  ReducedOperator op;
  op.grid = g;
  op.k = k;
  const double jump = prof.relative_jump();
  op.rel_jump = jump;
  const double sg = jump > 0.0 ? 1.0 : (jump < 0.0 ? -1.0 : 0.0);
  const double aj = std::abs(jump);
  auto lift = [&](double x) { return x < 0.0 ? -sg : -sg * std::exp(-aj * x); };
  const int m = g.n - 1;
  const double h = g.h, h2 = h * h, mu0 = prof.mu0;
  op.band = BandMatrix<double>(m, 1, 1);
  op.a.assign(m, 0.0);
  op.ell.assign(m, 0.0);
  op.e.assign(m, 0.0);
  op.c.assign(m, 0.0);
  op.c_left = lift(-g.d);
  op.c_right = lift(g.d);

  for (int i = 1; i < g.n; ++i) {
    const int q = i - 1;
    const double x = g.node_x(i);
    double pcoef, lc, ecoef;
    if (i < g.i0) {
      pcoef = prof.deps1(Side::minus, x) / prof.eps1(Side::minus, x);
      lc = k * k * lift(x);
      ecoef = prof.eps1(Side::minus, x) * mu0;
    } else if (i > g.i0) {
      pcoef = prof.deps1(Side::plus, x) / prof.eps1(Side::plus, x);
      lc = (-jump * jump - pcoef * aj + k * k) * lift(x);
      ecoef = prof.eps1(Side::plus, x) * mu0;
    } else {
      // Average of the two one-sided equations at the interface node.
      const double pm = prof.deps1(Side::minus, 0.0) / prof.eps1(Side::minus, 0.0);
      const double pp = prof.deps1(Side::plus, 0.0) / prof.eps1(Side::plus, 0.0);
      pcoef = 0.5 * (pm + pp);
      lc = 0.5 * (k * k * (-sg) + (-jump * jump - pp * aj + k * k) * (-sg));
      ecoef = 0.5 * (prof.eps1(Side::minus, 0.0) + prof.eps1(Side::plus, 0.0)) * mu0;
    }
    const double lower = -1.0 / h2 - pcoef / (2.0 * h);
    const double upper = -1.0 / h2 + pcoef / (2.0 * h);
    op.band.set(q, q, 2.0 / h2 + k * k);
    if (q > 0) op.band.set(q, q - 1, lower);
    if (q < m - 1) op.band.set(q, q + 1, upper);
    op.a[q] = lc;
    // Ghost values keep w3 = 0 at the ends: u(-d) = -c(-d) s, u(d) = -c(d) s.
    if (i == 1) op.a[q] += lower * (-op.c_left);
    if (i == g.n - 1) op.a[q] += upper * (-op.c_right);
    op.e[q] = ecoef;
    op.c[q] = lift(x);
  }
  const int q0 = g.i0 - 1;
  op.ell[q0] = -3.0 / (2.0 * h);
  op.ell[q0 + 1] = 4.0 / (2.0 * h);
  op.ell[q0 + 2] = -1.0 / (2.0 * h);
  return op;
}

// Mode sampled on the collocated layout: w1 and w2 on broken rows, w3 on nodes.
struct CollocatedMode {
  Grid1D grid;
  double k = 0.0, omega = 0.0;
  std::vector<cplx> w1, w2, w3;
};

// Fraction of the unit-normalized w3 mass on the outer margins.
inline double margin_norm(const RealVec& w3_nodes, const Grid1D& g, int margin_nodes = 100) {
  double tot = 0.0, mar = 0.0;
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double v = g.node_weight(i) * w3_nodes[i] * w3_nodes[i];
    tot += v;
    if (i <= margin_nodes || i >= g.n - margin_nodes) mar += v;
  }
  if (tot == 0.0) return 0.0;
  return std::sqrt(mar / tot);
}

inline bool is_localized(const RealVec& w3_nodes, const Grid1D& g, int margin_nodes = 100,
                         double threshold = 1e-6) {
  return margin_norm(w3_nodes, g, margin_nodes) < threshold;
}

struct LiftedPair {
  double omega = 0.0;
  double residual = 0.0;
  RealVec w3;  // on all nodes
};

inline std::vector<LiftedPair> solve_lifted(const ReducedOperator& op, double target, const SolveOptions& opt) {
  const GeneralizedProblem p = op.problem();
  std::vector<LiftedPair> out;
  for (auto& e : solve_near(p, target, opt)) out.push_back({e.omega, e.residual, op.w3_from_u(e.vec)});
  return out;
}

inline std::vector<LiftedPair> filter_localized(const std::vector<LiftedPair>& pairs, const Grid1D& g,
                                                int margin_nodes = 100, double threshold = 1e-6) {
  std::vector<LiftedPair> out;
  for (const auto& p : pairs)
    if (is_localized(p.w3, g, margin_nodes, threshold)) out.push_back(p);
  return out;
}

// w1 = -k w3 / (eps1 omega), w2 = -i w3' / (eps1 omega); derivative one-sided at
// the interface and the ends, then normalized so that int w^T Lambda conj(w) = 1.
inline CollocatedMode reconstruct_mode(const RealVec& w3, double omega, double k, const Grid1D& g,
                                       const PiecewiseProfile& prof) {
  if (omega == 0.0) throw DivisionError("omega = 0 in mode reconstruction");
  CollocatedMode m;
  m.grid = g;
  m.k = k;
  m.omega = omega;
  m.w1.assign(g.n_broken(), 0.0);
  m.w2.assign(g.n_broken(), 0.0);
  m.w3.assign(g.n_nodes(), 0.0);
  double peak = 0.0;
  int ipk = 0;
  for (int i = 0; i < g.n_nodes(); ++i)
    if (std::abs(w3[i]) > peak) peak = std::abs(w3[i]), ipk = i;
  const double sign = w3[ipk] < 0.0 ? -1.0 : 1.0;
  std::vector<double> wm(w3.begin(), w3.begin() + g.i0 + 1), wp(w3.begin() + g.i0, w3.end());
  std::vector<double> dm(wm.size()), dp(wp.size());
  block_derivative(wm.data(), static_cast<int>(wm.size()), g.h, dm.data());
  block_derivative(wp.data(), static_cast<int>(wp.size()), g.h, dp.data());
  for (int r = 0; r < g.n_broken(); ++r) {
    const int i = g.broken_node(r);
    const Side s = g.broken_side(r);
    const double e1 = prof.eps1(s, g.node_x(i));
    const double dw = r <= g.i0 ? dm[r] : dp[r - g.i0 - 1];
    m.w1[r] = sign * (-k * w3[i] / (e1 * omega));
    m.w2[r] = sign * cplx(0.0, -dw / (e1 * omega));
  }
  for (int i = 0; i < g.n_nodes(); ++i) m.w3[i] = sign * w3[i];
  double nrm = 0.0;
  for (int r = 0; r < g.n_broken(); ++r) {
    const double e1 = prof.eps1(g.broken_side(r), g.broken_x(r));
    nrm += g.broken_weight(r) * e1 * (std::norm(m.w1[r]) + std::norm(m.w2[r]));
  }
  for (int i = 0; i < g.n_nodes(); ++i) nrm += g.node_weight(i) * prof.mu0 * std::norm(m.w3[i]);
  if (!(nrm > 0.0)) throw StructuralError("degenerate mode: normalization integral is not positive");
  const double s = 1.0 / std::sqrt(nrm);
  for (auto& v : m.w1) v *= s;
  for (auto& v : m.w2) v *= s;
  for (auto& v : m.w3) v *= s;
  return m;
}

}  // namespace kerrwave
