#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/correctors/operator.hpp"
#include "kerrwave/linalg/banded.hpp"

namespace kerrwave {

struct InhomogeneousOptions {
  double solvability_tol = 1e-8;  // |<f, m>| / (|f| |m|)
  double residual_tol = 1e-8;     // |T v - f| / |f| after projection
  int refinement_steps = 2;
};

struct InhomogeneousSolution {
  ModeField v;
  double defect = 0.0;    // relative orthogonality defect of f against the kernel
  double residual = 0.0;  // relative residual of the projected system
};

namespace detail {

inline cplx winner(const std::vector<cplx>& a, const std::vector<cplx>& b, const std::vector<double>& w) {
  cplx s = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) s += w[q] * a[q] * std::conj(b[q]);
  return s;
}

inline double wnorm(const std::vector<cplx>& a, const std::vector<double>& w) {
  return std::sqrt(std::abs(winner(a, a, w)));
}

}  // namespace detail

// Solves T v = f. With a kernel vector m (T self-adjoint, T m = 0) the part of f
// along m is removed first, then the nonsingular problem (T + m <., m>) v = f is
// solved: a banded regularization T + a e_j e_j^T plus a rank-two correction.
// The result satisfies T v = f - c m and <v, m> = 0.
inline InhomogeneousSolution solve_inhomogeneous(const TOperator& t, const ModeField& f,
                                                 const std::optional<ModeField>& kernel = std::nullopt,
                                                 const InhomogeneousOptions& opt = {}) {
  const auto& l = t.layout;
  const auto& w = t.weights;
  std::vector<cplx> b = pack(f, l);
  InhomogeneousSolution sol;
  std::vector<cplx> m;
  double mm = 0.0;
  if (kernel) {
    m = pack(*kernel, l);
    mm = std::real(detail::winner(m, m, w));
    if (!(mm > 0.0)) throw StructuralError("zero kernel vector");
    const double fn = detail::wnorm(b, w);
    const cplx c = detail::winner(b, m, w) / mm;
    sol.defect = fn > 0.0 ? std::abs(c) * std::sqrt(mm) / fn : 0.0;
    if (sol.defect > opt.solvability_tol)
      throw SolvabilityError("right-hand side is not orthogonal to the kernel", sol.defect);
    for (std::size_t q = 0; q < b.size(); ++q) b[q] -= c * m[q];
  }
  const double bn = detail::wnorm(b, w);
  if (bn == 0.0) {
    sol.v = ModeField(t.grid);
    return sol;
  }

  std::optional<LowRankUpdatedSolver<cplx>> lr;
  std::optional<BandLU<cplx>> plain;
  if (kernel) {
    int jbest = -1;
    double best = -1.0;
    for (int i = 0; i < t.grid.n_nodes(); ++i) {
      const int q = l.idx3[i];
      if (q < 0) continue;
      const double s = std::abs(m[q]) * std::sqrt(w[q]);
      if (s > best) best = s, jbest = q;
    }
    const double alpha = 1.0 / t.grid.h;
    BandMatrix<cplx> reg = t.band;
    reg.add(jbest, jbest, alpha);
    std::vector<cplx> u1 = m, u2(l.size, 0.0), v1(l.size), v2(l.size, 0.0);
    u2[jbest] = -alpha;
    v2[jbest] = 1.0;
    for (int q = 0; q < l.size; ++q) v1[q] = w[q] * std::conj(m[q]);
    lr.emplace(BandLU<cplx>(std::move(reg)), std::vector<std::vector<cplx>>{u1, u2},
               std::vector<std::vector<cplx>>{v1, v2});
  } else {
    plain.emplace(BandMatrix<cplx>(t.band));
    if (plain->pivot_ratio() < 1e-14) throw ConditioningError("operator is numerically singular");
  }
  auto solve = [&](const std::vector<cplx>& rhs) { return lr ? lr->solve(rhs) : plain->solve(rhs); };
  auto residual = [&](const std::vector<cplx>& v) {
    std::vector<cplx> r = t.band.multiply(v);
    for (std::size_t q = 0; q < r.size(); ++q) r[q] = b[q] - r[q];
    return r;
  };
  auto project = [&](std::vector<cplx>& v) {
    if (!kernel) return;
    const cplx c = detail::winner(v, m, w) / mm;
    for (std::size_t q = 0; q < v.size(); ++q) v[q] -= c * m[q];
  };

  std::vector<cplx> x = solve(b);
  project(x);
  for (int s = 0; s < opt.refinement_steps; ++s) {
    std::vector<cplx> dx = solve(residual(x));
    for (std::size_t q = 0; q < x.size(); ++q) x[q] += dx[q];
    project(x);
  }
  sol.residual = detail::wnorm(residual(x), w) / bn;
  if (!std::isfinite(sol.residual) || sol.residual > opt.residual_tol)
    throw ConditioningError("inhomogeneous solve lost accuracy (relative residual " +
                            std::to_string(sol.residual) + ")");
  sol.v = unpack(x, l, t.grid);
  return sol;
}

}  // namespace kerrwave
