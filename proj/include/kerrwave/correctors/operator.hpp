#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/core/sampled.hpp"
#include "kerrwave/linalg/banded.hpp"

namespace kerrwave {

// Position of every unknown of a staggered field in one vector, interleaved in
// x1 so that T stays banded: at node i come the broken rows of node i, then w3(i)
// (interior nodes only), then w2 at the half node to its right.
struct UnknownLayout {
  std::vector<int> idx1, idx2, idx3;  // idx3 = -1 at the Dirichlet ends
  int size = 0;
};

inline UnknownLayout interleaved_layout(const Grid1D& g) {
  UnknownLayout l;
  l.idx1.assign(g.n_broken(), -1);
  l.idx2.assign(g.n_half(), -1);
  l.idx3.assign(g.n_nodes(), -1);
  int q = 0;
  for (int i = 0; i <= g.n; ++i) {
    if (i < g.i0) l.idx1[i] = q++;
    else if (i == g.i0) l.idx1[i] = q++, l.idx1[i + 1] = q++;
    else l.idx1[i + 1] = q++;
    if (i > 0 && i < g.n) l.idx3[i] = q++;
    if (i < g.n) l.idx2[i] = q++;
  }
  l.size = q;
  return l;
}

inline std::vector<cplx> pack(const ModeField& f, const UnknownLayout& l) {
  std::vector<cplx> v(l.size);
  for (std::size_t r = 0; r < l.idx1.size(); ++r) v[l.idx1[r]] = f.c1[r];
  for (std::size_t j = 0; j < l.idx2.size(); ++j) v[l.idx2[j]] = f.c2[j];
  for (std::size_t i = 0; i < l.idx3.size(); ++i)
    if (l.idx3[i] >= 0) v[l.idx3[i]] = f.c3[i];
  return v;
}

inline ModeField unpack(const std::vector<cplx>& v, const UnknownLayout& l, const Grid1D& g) {
  ModeField f(g);
  for (std::size_t r = 0; r < l.idx1.size(); ++r) f.c1[r] = v[l.idx1[r]];
  for (std::size_t j = 0; j < l.idx2.size(); ++j) f.c2[j] = v[l.idx2[j]];
  for (std::size_t i = 0; i < l.idx3.size(); ++i)
    if (l.idx3[i] >= 0) f.c3[i] = v[l.idx3[i]];
  return f;
}

// Quadrature weight of every packed unknown.
inline std::vector<double> layout_weights(const UnknownLayout& l, const Grid1D& g) {
  std::vector<double> w(l.size);
  for (int r = 0; r < g.n_broken(); ++r) w[l.idx1[r]] = g.broken_weight(r);
  for (int j = 0; j < g.n_half(); ++j) w[l.idx2[j]] = g.half_weight(j);
  for (int i = 0; i < g.n_nodes(); ++i)
    if (l.idx3[i] >= 0) w[l.idx3[i]] = g.node_weight(i);
  return w;
}

// T = L(k) + omega Lambda on the staggered grid, applied directly:
//   row 1 (broken r): k w3 + omega eps1 w1
//   row 2 (half j):   i D+ w3 + omega eps1 w2
//   row 3 (node i):   k <w1> + i D- w2 + omega mu0 w3,  <w1> the interface average
// w3 vanishes at both ends, where row 3 is absent. T is self-adjoint in the
// weighted inner product.
inline ModeField apply_T(double k, double omega, const SampledProfile& c, const Grid1D& g, const ModeField& w) {
  const cplx I(0.0, 1.0);
  const double h = g.h;
  ModeField out(g);
  for (int r = 0; r < g.n_broken(); ++r) out.c1[r] = k * w.c3[g.broken_node(r)] + omega * c.eps1_b[r] * w.c1[r];
  for (int j = 0; j < g.n_half(); ++j)
    out.c2[j] = I * (w.c3[j + 1] - w.c3[j]) / h + omega * c.eps1_h[j] * w.c2[j];
  const std::vector<cplx> w1n = broken_to_node(w.c1, g);
  for (int i = 1; i < g.n; ++i) out.c3[i] = k * w1n[i] + I * (w.c2[i] - w.c2[i - 1]) / h + omega * c.mu0 * w.c3[i];
  return out;
}

// Partial k-derivative of L applied to w: (w3, 0, <w1>).
inline ModeField apply_dkL(const Grid1D& g, const ModeField& w) {
  ModeField out(g);
  for (int r = 0; r < g.n_broken(); ++r) out.c1[r] = w.c3[g.broken_node(r)];
  const std::vector<cplx> w1n = broken_to_node(w.c1, g);
  for (int i = 1; i < g.n; ++i) out.c3[i] = w1n[i];
  return out;
}

inline ModeField apply_Lambda(const SampledProfile& c, const Grid1D& g, const ModeField& w) {
  ModeField out(g);
  for (int r = 0; r < g.n_broken(); ++r) out.c1[r] = c.eps1_b[r] * w.c1[r];
  for (int j = 0; j < g.n_half(); ++j) out.c2[j] = c.eps1_h[j] * w.c2[j];
  for (int i = 1; i < g.n; ++i) out.c3[i] = c.mu0 * w.c3[i];
  return out;
}

struct TOperator {
  Grid1D grid;
  double k = 0.0;
  double omega = 0.0;
  SampledProfile coef;
  UnknownLayout layout;
  std::vector<double> weights;
  BandMatrix<cplx> band;

  ModeField apply(const ModeField& w) const { return apply_T(k, omega, coef, grid, w); }
};

inline TOperator assemble_T(double k, double omega, const Grid1D& g, const PiecewiseProfile& prof) {
  TOperator t;
  t.grid = g;
  t.k = k;
  t.omega = omega;
  t.coef = sample_profile(prof, g);
  for (double e : t.coef.eps1_b)
    if (e * omega == 0.0) throw DivisionError("eps1 omega vanishes on the grid");
  for (double e : t.coef.eps1_h)
    if (e * omega == 0.0) throw DivisionError("eps1 omega vanishes on the grid");
  t.layout = interleaved_layout(g);
  t.weights = layout_weights(t.layout, g);
  const UnknownLayout& l = t.layout;
  const cplx I(0.0, 1.0);
  const double h = g.h;
  std::vector<std::tuple<int, int, cplx>> e;
  for (int r = 0; r < g.n_broken(); ++r) {
    const int row = l.idx1[r], i = g.broken_node(r);
    e.emplace_back(row, row, omega * t.coef.eps1_b[r]);
    if (l.idx3[i] >= 0) e.emplace_back(row, l.idx3[i], k);
  }
  for (int j = 0; j < g.n_half(); ++j) {
    const int row = l.idx2[j];
    e.emplace_back(row, row, omega * t.coef.eps1_h[j]);
    if (l.idx3[j + 1] >= 0) e.emplace_back(row, l.idx3[j + 1], I / h);
    if (l.idx3[j] >= 0) e.emplace_back(row, l.idx3[j], -I / h);
  }
  for (int i = 1; i < g.n; ++i) {
    const int row = l.idx3[i];
    e.emplace_back(row, row, omega * t.coef.mu0);
    if (i == g.i0) {
      e.emplace_back(row, l.idx1[g.i0], 0.5 * k);
      e.emplace_back(row, l.idx1[g.i0 + 1], 0.5 * k);
    } else {
      e.emplace_back(row, l.idx1[i < g.i0 ? i : i + 1], k);
    }
    e.emplace_back(row, l.idx2[i], I / h);
    e.emplace_back(row, l.idx2[i - 1], -I / h);
  }
  int kl = 0, ku = 0;
  for (const auto& [r, c, v] : e) kl = std::max(kl, r - c), ku = std::max(ku, c - r);
  t.band = BandMatrix<cplx>(l.size, kl, ku);
  for (const auto& [r, c, v] : e) t.band.add(r, c, v);
  return t;
}

}  // namespace kerrwave
