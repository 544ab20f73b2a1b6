#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/core/sampled.hpp"
#include "kerrwave/eigen/krylov.hpp"
#include "kerrwave/linalg/banded.hpp"

namespace kerrwave {

// Eigenmode on the staggered grid: w1 on broken rows, w2 on half nodes, w3 on nodes.
struct Mode {
  Grid1D grid;
  double k = 0.0;
  double omega = 0.0;
  ModeField w;
};

// Eliminating w1, w2 from the staggered first-order system leaves
//   -D^-( (1/eps1) D^+ w3 ) + k^2 <1/eps1> w3 = omega^2 mu0 w3
// on the interior nodes, a symmetric tridiagonal problem.
struct StaggeredOperator {
  Grid1D grid;
  double k = 0.0;
  SampledProfile coef;
  BandMatrix<double> band;

  int size() const { return grid.n - 1; }

  GeneralizedProblem problem() const {
    GeneralizedProblem p;
    p.n = size();
    p.apply_a = [this](const RealVec& u) { return band.multiply(u); };
    const double mu0 = coef.mu0;
    p.apply_b = [mu0](const RealVec& u) {
      RealVec y(u);
      for (auto& v : y) v *= mu0;
      return y;
    };
    p.shifted_solver = [this, mu0](double s) -> LinearMap {
      BandMatrix<double> m = band;
      for (int q = 0; q < size(); ++q) m.add(q, q, -s * mu0);
      auto lu = std::make_shared<BandLU<double>>(std::move(m));
      return [lu](const RealVec& b) { return lu->solve(b); };
    };
    return p;
  }
};

inline StaggeredOperator assemble_staggered_operator(double k, const Grid1D& g, const PiecewiseProfile& prof) {
  StaggeredOperator op;
  op.grid = g;
  op.k = k;
  op.coef = sample_profile(prof, g);
  const int m = g.n - 1;
  const double h2 = g.h * g.h;
  op.band = BandMatrix<double>(m, 1, 1);
  for (int i = 1; i < g.n; ++i) {
    const int q = i - 1;
    const double left = 1.0 / op.coef.eps1_h[i - 1];
    const double right = 1.0 / op.coef.eps1_h[i];
    op.band.set(q, q, (left + right) / h2 + k * k * op.coef.inv_eps1_n[i]);
    if (q > 0) op.band.set(q, q - 1, -left / h2);
    if (q < m - 1) op.band.set(q, q + 1, -right / h2);
  }
  return op;
}

// Lambda-weighted energy <Lambda w, w>.
inline double lambda_energy(const ModeField& w, const Grid1D& g, const SampledProfile& c) {
  double s = 0.0;
  for (int r = 0; r < g.n_broken(); ++r) s += g.broken_weight(r) * c.eps1_b[r] * std::norm(w.c1[r]);
  for (int j = 0; j < g.n_half(); ++j) s += g.half_weight(j) * c.eps1_h[j] * std::norm(w.c2[j]);
  for (int i = 0; i < g.n_nodes(); ++i) s += g.node_weight(i) * c.mu0 * std::norm(w.c3[i]);
  return s;
}

// w1 = -k w3/(eps1 omega), w2 = -i D^+ w3/(eps1 omega); w3 peak made positive,
// then <Lambda w, w> = 1.
inline Mode staggered_mode(const RealVec& interior_w3, double omega, double k, const Grid1D& g,
                           const SampledProfile& c) {
  if (omega == 0.0) throw DivisionError("omega = 0 in mode reconstruction");
  Mode m;
  m.grid = g;
  m.k = k;
  m.omega = omega;
  m.w = ModeField(g);
  double peak = 0.0, sign = 1.0;
  for (double v : interior_w3)
    if (std::abs(v) > peak) peak = std::abs(v), sign = v < 0.0 ? -1.0 : 1.0;
  for (int i = 1; i < g.n; ++i) m.w.c3[i] = sign * interior_w3[i - 1];
  for (int r = 0; r < g.n_broken(); ++r)
    m.w.c1[r] = -k * m.w.c3[g.broken_node(r)] / (c.eps1_b[r] * omega);
  for (int j = 0; j < g.n_half(); ++j)
    m.w.c2[j] = cplx(0.0, -1.0) * (m.w.c3[j + 1] - m.w.c3[j]) / (g.h * c.eps1_h[j] * omega);
  const double e = lambda_energy(m.w, g, c);
  if (!(e > 0.0)) throw StructuralError("degenerate mode: normalization integral is not positive");
  m.w *= cplx(1.0 / std::sqrt(e));
  return m;
}

struct StaggeredPair {
  double omega = 0.0;
  double residual = 0.0;
  RealVec w3;  // interior nodes
};

inline std::vector<StaggeredPair> solve_staggered(const StaggeredOperator& op, double target,
                                                  const SolveOptions& opt) {
  std::vector<StaggeredPair> out;
  for (auto& e : solve_near(op.problem(), target, opt)) out.push_back({e.omega, e.residual, std::move(e.vec)});
  return out;
}

// Discrete w3 on all nodes (zero at the ends).
inline RealVec with_ends(const RealVec& interior) {
  RealVec w(interior.size() + 2, 0.0);
  for (std::size_t q = 0; q < interior.size(); ++q) w[q + 1] = interior[q];
  return w;
}

}  // namespace kerrwave
