#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/norms.hpp"
#include "kerrwave/core/sampled.hpp"
#include "kerrwave/linalg/fft.hpp"

namespace kerrwave {

// All three components on the broken rows (one-sided values at the interface):
// E2 by cubic interpolation from half nodes of the same side, H3 copied from its node.
struct CollocatedField {
  int rows = 0, n_x2 = 0;
  std::array<std::vector<double>, 3> c;

  CollocatedField() = default;
  explicit CollocatedField(const Grid2D& g)
      : rows(g.x1.n_broken()), n_x2(g.n_x2) {
    for (auto& v : c) v.assign(static_cast<std::size_t>(rows) * n_x2, 0.0);
  }
  double& at(int comp, int r, int k) { return c[comp][static_cast<std::size_t>(r) * n_x2 + k]; }
  double at(int comp, int r, int k) const { return c[comp][static_cast<std::size_t>(r) * n_x2 + k]; }
};

namespace detail {

// Weights of the derivative of given order at x of the Lagrange interpolant
// through nodes xs (Fornberg's recursion).
inline std::vector<double> fd_weights(const std::vector<double>& xs, double x, int deriv) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(deriv + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - x;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, deriv);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][deriv];
  return w;
}

// Fourth-order first derivative along a block of m rows (row stride nx), one-sided near the edges.
inline void block_derivative4(const double* v, int m, double h, int nx, double* out) {
  if (m < 5) throw StructuralError("block too short for the compatibility stencils");
  for (int k = 0; k < m; ++k) {
    const int s = std::clamp(k - 2, 0, m - 5);
    std::vector<double> xs(5);
    for (int q = 0; q < 5; ++q) xs[q] = (s + q - k) * h;
    const auto w = fd_weights(xs, 0.0, 1);
    double* o = out + static_cast<std::size_t>(k) * nx;
    std::fill(o, o + nx, 0.0);
    for (int q = 0; q < 5; ++q) {
      const double* src = v + static_cast<std::size_t>(s + q) * nx;
      for (int c = 0; c < nx; ++c) o[c] += w[q] * src[c];
    }
  }
}

}  // namespace detail

inline CollocatedField to_collocated(const Field2D& u, const Grid2D& g2) {
  const Grid1D& g = g2.x1;
  CollocatedField out(g2);
  for (int r = 0; r < g.n_broken(); ++r) {
    const int node = g.broken_node(r);
    const bool minus = r <= g.i0;
    const int lo = minus ? 0 : g.i0, hi = minus ? g.i0 - 1 : g.n - 1;  // same-side half nodes
    if (hi - lo < 3) throw StructuralError("side too short for cubic interpolation");
    const int s = std::clamp(node - 2, lo, hi - 3);
    std::vector<double> xs(4);
    for (int q = 0; q < 4; ++q) xs[q] = (s + q + 0.5 - node) * g.h;
    const auto w = detail::fd_weights(xs, 0.0, 0);
    for (int k = 0; k < g2.n_x2; ++k) {
      out.at(0, r, k) = u.row1(r)[k];
      double e2 = 0.0;
      for (int q = 0; q < 4; ++q) e2 += w[q] * u.row2(s + q)[k];
      out.at(1, r, k) = e2;
      out.at(2, r, k) = u.row3(node)[k];
    }
  }
  return out;
}

namespace detail {

// A1 d_x1 U + A2 d_x2 U = (-d_x2 U3, d_x1 U3, d_x1 U2 - d_x2 U1), one-sided in x1 on each block.
inline CollocatedField apply_A(const CollocatedField& u, const Grid2D& g2) {
  const Grid1D& g = g2.x1;
  const int nx = g2.n_x2;
  RealSpectral spec(nx, g2.length_x2());
  CollocatedField dx1(g2), out(g2);
  const Block bm{0, g.i0 + 1, false}, bp{g.i0 + 1, g.n - g.i0 + 1, false};
  for (int comp : {1, 2})
    for (const Block& b : {bm, bp})
      block_derivative4(u.c[comp].data() + static_cast<std::size_t>(b.first) * nx, b.count, g.h, nx,
                        dx1.c[comp].data() + static_cast<std::size_t>(b.first) * nx);
  std::vector<double> d1(nx), d3(nx);
  for (int r = 0; r < g.n_broken(); ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * nx;
    spec.derivative(u.c[0].data() + off, d1.data(), 1);
    spec.derivative(u.c[2].data() + off, d3.data(), 1);
    for (int k = 0; k < nx; ++k) {
      out.c[0][off + k] = -d3[k];
      out.c[1][off + k] = dx1.c[2][off + k];
      out.c[2][off + k] = dx1.c[1][off + k] - d1[k];
    }
  }
  return out;
}

// theta'(v; a) b, the directional derivative of theta(v) = [[3v1^2+v2^2, 2v1v2], [2v1v2, v1^2+3v2^2]]
// along a, applied to b (third component is zero).
inline std::array<double, 2> dtheta(double v1, double v2, double a1, double a2, double b1, double b2) {
  const double m11 = 6.0 * v1 * a1 + 2.0 * v2 * a2;
  const double m12 = 2.0 * (a1 * v2 + v1 * a2);
  const double m22 = 2.0 * v1 * a1 + 6.0 * v2 * a2;
  return {m11 * b1 + m12 * b2, m12 * b1 + m22 * b2};
}

// out = -S(U)^{-1} f pointwise; S = Lambda + eps3 theta(U).
inline CollocatedField solve_S(const CollocatedField& u, CollocatedField f, const SampledProfile& coef,
                               const Grid2D& g2) {
  const int nx = g2.n_x2;
  for (int r = 0; r < u.rows; ++r) {
    const double e1 = coef.eps1_b[r], e3 = coef.eps3_b[r];
    for (int k = 0; k < nx; ++k) {
      const double v1 = u.at(0, r, k), v2 = u.at(1, r, k);
      const double s11 = e1 + e3 * (3.0 * v1 * v1 + v2 * v2), s12 = e3 * 2.0 * v1 * v2,
                   s22 = e1 + e3 * (v1 * v1 + 3.0 * v2 * v2);
      const double det = s11 * s22 - s12 * s12;
      if (!(s11 > 0.0 && det > 0.0)) throw FieldExitError("S(U) is not positive definite");
      const double f1 = f.at(0, r, k), f2 = f.at(1, r, k);
      f.at(0, r, k) = -(s22 * f1 - s12 * f2) / det;
      f.at(1, r, k) = -(s11 * f2 - s12 * f1) / det;
      f.at(2, r, k) = -f.at(2, r, k) / coef.mu0;
    }
  }
  return f;
}

}  // namespace detail

// V^(0) = U and the time derivatives V^(1..3) the system forces on smooth
// solutions, computed from U alone.
inline std::vector<CollocatedField> compatibility_operators(const Field2D& u0, const SampledProfile& coef,
                                                            const Grid2D& g2, int order) {
  if (order < 1 || order > 3) throw UnsupportedOrderError("compatibility orders are 1..3");
  std::vector<CollocatedField> v;
  v.reserve(3);
  v.push_back(to_collocated(u0, g2));
  const int nx = g2.n_x2;
  auto add_terms = [&](CollocatedField f, const auto& term) {
    for (int r = 0; r < f.rows; ++r)
      for (int k = 0; k < nx; ++k) {
        const auto t = term(r, k);
        f.at(0, r, k) += coef.eps3_b[r] * t[0];
        f.at(1, r, k) += coef.eps3_b[r] * t[1];
      }
    return f;
  };
  const CollocatedField& u = v[0];
  if (order >= 2) v.push_back(detail::solve_S(u, detail::apply_A(u, g2), coef, g2));
  if (order >= 3) {
    const CollocatedField& v1 = v[1];
    v.push_back(detail::solve_S(u,
                                add_terms(detail::apply_A(v1, g2),
                                          [&](int r, int k) {
                                            return detail::dtheta(u.at(0, r, k), u.at(1, r, k), v1.at(0, r, k),
                                                                  v1.at(1, r, k), v1.at(0, r, k), v1.at(1, r, k));
                                          }),
                                coef, g2));
  }
  return v;
}

struct CompatibilityDefect {
  int order = 0;  // j in V^(j)
  double jump2_sup = 0.0, jump2_l2 = 0.0;
  double jump3_sup = 0.0, jump3_l2 = 0.0;
};

// Interface jumps of components 2 and 3 of V^(j), j = 0..order-1.
inline std::vector<CompatibilityDefect> compatibility_check(const Field2D& u0, const SampledProfile& coef,
                                                            const Grid2D& g2, int order) {
  const auto v = compatibility_operators(u0, coef, g2, order);
  const int i0 = g2.x1.i0;
  std::vector<CompatibilityDefect> out;
  for (int j = 0; j < order; ++j) {
    CompatibilityDefect d;
    d.order = j;
    double s2 = 0.0, s3 = 0.0;
    for (int k = 0; k < g2.n_x2; ++k) {
      const double j2 = v[j].at(1, i0 + 1, k) - v[j].at(1, i0, k);
      const double j3 = v[j].at(2, i0 + 1, k) - v[j].at(2, i0, k);
      d.jump2_sup = std::max(d.jump2_sup, std::abs(j2));
      d.jump3_sup = std::max(d.jump3_sup, std::abs(j3));
      s2 += j2 * j2;
      s3 += j3 * j3;
    }
    d.jump2_l2 = std::sqrt(s2 * g2.dx2());
    d.jump3_l2 = std::sqrt(s3 * g2.dx2());
    out.push_back(d);
  }
  return out;
}

}  // namespace kerrwave
