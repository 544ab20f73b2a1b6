#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/grid.hpp"

namespace kerrwave {

using cplx = std::complex<double>;

// Three-component profile in x1: c1 on broken rows, c2 on half nodes, c3 on nodes.
template <typename T>
struct Staggered3 {
  std::vector<T> c1, c2, c3;

  Staggered3() = default;
  explicit Staggered3(const Grid1D& g)
      : c1(g.n_broken(), T{}), c2(g.n_half(), T{}), c3(g.n_nodes(), T{}) {}

  Staggered3& operator+=(const Staggered3& o) {
    for (std::size_t i = 0; i < c1.size(); ++i) c1[i] += o.c1[i];
    for (std::size_t i = 0; i < c2.size(); ++i) c2[i] += o.c2[i];
    for (std::size_t i = 0; i < c3.size(); ++i) c3[i] += o.c3[i];
    return *this;
  }
  Staggered3& operator*=(T s) {
    for (auto& v : c1) v *= s;
    for (auto& v : c2) v *= s;
    for (auto& v : c3) v *= s;
    return *this;
  }
};

using ModeField = Staggered3<cplx>;

// Weighted L2 inner product <a, b> = sum w a conj(b) over all three components.
inline cplx inner(const ModeField& a, const ModeField& b, const Grid1D& g) {
  cplx s = 0.0;
  for (int r = 0; r < g.n_broken(); ++r) s += g.broken_weight(r) * a.c1[r] * std::conj(b.c1[r]);
  for (int j = 0; j < g.n_half(); ++j) s += g.half_weight(j) * a.c2[j] * std::conj(b.c2[j]);
  for (int i = 0; i < g.n_nodes(); ++i) s += g.node_weight(i) * a.c3[i] * std::conj(b.c3[i]);
  return s;
}

inline double norm(const ModeField& a, const Grid1D& g) { return std::sqrt(std::abs(inner(a, a, g))); }

// Two-point interpolation stencil: value = wa * v[a] + wb * v[b].
struct Stencil2 {
  int a = 0, b = 0;
  double wa = 0.0, wb = 0.0;
};

// Half-node values to broken row r. Interior rows average the two neighbouring
// half nodes; at the interface and at the ends the value is extrapolated
// linearly from the same side.
inline Stencil2 half_to_broken_stencil(int r, const Grid1D& g) {
  const int n = g.n, i0 = g.i0, i = g.broken_node(r);
  if (i == 0) return {0, 1, 1.5, -0.5};
  if (i == n) return {n - 1, n - 2, 1.5, -0.5};
  if (i == i0) return r == i0 ? Stencil2{i0 - 1, i0 - 2, 1.5, -0.5} : Stencil2{i0, i0 + 1, 1.5, -0.5};
  return {i - 1, i, 0.5, 0.5};
}

// Broken rows to half node j, which sits between nodes j and j+1 on one side.
inline Stencil2 broken_to_half_stencil(int j, const Grid1D& g) {
  const int r = j < g.i0 ? j : j + 1;
  return {r, r + 1, 0.5, 0.5};
}

// Broken rows to node i; the interface node takes the mean of both sides.
inline Stencil2 broken_to_node_stencil(int i, const Grid1D& g) {
  if (i < g.i0) return {i, i, 1.0, 0.0};
  if (i > g.i0) return {i + 1, i + 1, 1.0, 0.0};
  return {g.i0, g.i0 + 1, 0.5, 0.5};
}

template <typename T>
std::vector<T> half_to_broken(const std::vector<T>& v, const Grid1D& g) {
  std::vector<T> out(g.n_broken());
  for (int r = 0; r < g.n_broken(); ++r) {
    const Stencil2 s = half_to_broken_stencil(r, g);
    out[r] = s.wa * v[s.a] + s.wb * v[s.b];
  }
  return out;
}

template <typename T>
std::vector<T> broken_to_half(const std::vector<T>& v, const Grid1D& g) {
  std::vector<T> out(g.n_half());
  for (int j = 0; j < g.n_half(); ++j) {
    const Stencil2 s = broken_to_half_stencil(j, g);
    out[j] = s.wa * v[s.a] + s.wb * v[s.b];
  }
  return out;
}

template <typename T>
std::vector<T> broken_to_node(const std::vector<T>& v, const Grid1D& g) {
  std::vector<T> out(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) {
    const Stencil2 s = broken_to_node_stencil(i, g);
    out[i] = s.wa * v[s.a] + s.wb * v[s.b];
  }
  return out;
}

// Real state (U1, U2, U3) on the 2D grid, row-major with x2 contiguous.
struct Field2D {
  int n_x2 = 0;
  int rows1 = 0, rows2 = 0, rows3 = 0;
  std::vector<double> u1, u2, u3;
  double time_stamp = 0.0;

  Field2D() = default;
  explicit Field2D(const Grid2D& g)
      : n_x2(g.n_x2),
        rows1(g.x1.n_broken()),
        rows2(g.x1.n_half()),
        rows3(g.x1.n_nodes()),
        u1(static_cast<std::size_t>(rows1) * n_x2, 0.0),
        u2(static_cast<std::size_t>(rows2) * n_x2, 0.0),
        u3(static_cast<std::size_t>(rows3) * n_x2, 0.0) {}

  double* row1(int r) { return u1.data() + static_cast<std::size_t>(r) * n_x2; }
  double* row2(int j) { return u2.data() + static_cast<std::size_t>(j) * n_x2; }
  double* row3(int i) { return u3.data() + static_cast<std::size_t>(i) * n_x2; }
  const double* row1(int r) const { return u1.data() + static_cast<std::size_t>(r) * n_x2; }
  const double* row2(int j) const { return u2.data() + static_cast<std::size_t>(j) * n_x2; }
  const double* row3(int i) const { return u3.data() + static_cast<std::size_t>(i) * n_x2; }

  std::vector<double>& comp(int c) { return c == 0 ? u1 : (c == 1 ? u2 : u3); }
  const std::vector<double>& comp(int c) const { return c == 0 ? u1 : (c == 1 ? u2 : u3); }

  bool finite() const {
    for (int c = 0; c < 3; ++c)
      for (double v : comp(c))
        if (!std::isfinite(v)) return false;
    return true;
  }

  void axpy(double a, const Field2D& x) {
    for (int c = 0; c < 3; ++c) {
      auto& y = comp(c);
      const auto& xv = x.comp(c);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * xv[i];
    }
  }
};

inline Field2D difference(const Field2D& a, const Field2D& b) {
  Field2D out = a;
  out.axpy(-1.0, b);
  return out;
}

// Right limit minus left limit at the interface for a broken-row quantity.
template <typename T>
T jump_at_interface(const std::vector<T>& broken, const Grid1D& g) {
  if (static_cast<int>(broken.size()) != g.n_broken())
    throw StructuralError("jump needs a field with both one-sided interface values");
  return broken[g.i0 + 1] - broken[g.i0];
}

// Per-x2 jump of the first component of a 2D field.
inline std::vector<double> jump_at_interface(const Field2D& f, const Grid1D& g) {
  if (f.rows1 != g.n_broken()) throw StructuralError("field does not match the grid");
  std::vector<double> out(f.n_x2);
  const double* a = f.row1(g.i0);
  const double* b = f.row1(g.i0 + 1);
  for (int c = 0; c < f.n_x2; ++c) out[c] = b[c] - a[c];
  return out;
}

}  // namespace kerrwave
