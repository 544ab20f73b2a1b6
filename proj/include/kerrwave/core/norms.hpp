#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/linalg/fft.hpp"

namespace kerrwave {

enum class Layout { broken, half, node };

struct Block {
  int first = 0;
  int count = 0;
  bool cell_centred = false;
};

// The two one-sided blocks of a field; the node layout shares the interface node.
inline std::pair<Block, Block> blocks(Layout l, const Grid1D& g) {
  switch (l) {
    case Layout::broken: return {{0, g.i0 + 1, false}, {g.i0 + 1, g.n - g.i0 + 1, false}};
    case Layout::half: return {{0, g.i0, true}, {g.i0, g.n - g.i0, true}};
    case Layout::node: return {{0, g.i0 + 1, false}, {g.i0, g.n - g.i0 + 1, false}};
  }
  return {};
}

inline double block_weight(const Block& b, int k, double h) {
  if (b.cell_centred) return h;
  return (k == 0 || k == b.count - 1) ? 0.5 * h : h;
}

// Second-order first derivative on a uniform block, one-sided at both ends.
template <typename T>
void block_derivative(const T* v, int m, double h, T* out, std::ptrdiff_t stride = 1) {
  if (m < 3) throw StructuralError("block too short for one-sided differences");
  auto at = [&](int k) { return v[k * stride]; };
  out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  for (int k = 1; k < m - 1; ++k) out[k * stride] = (at(k + 1) - at(k - 1)) / (2.0 * h);
  out[(m - 1) * stride] = (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) / (2.0 * h);
}

// Broken H^m norm of a 1D sampled field: ||u^-|| + ||u^+||.
template <typename T>
double broken_norm(const std::vector<T>& v, Layout layout, const Grid1D& g, int order) {
  if (order < 0 || order > 3) throw UnsupportedOrderError("broken_norm supports orders 0..3");
  double total = 0.0;
  auto [bm, bp] = blocks(layout, g);
  for (const Block& b : {bm, bp}) {
    std::vector<T> cur(v.begin() + b.first, v.begin() + b.first + b.count), next(b.count);
    double sq = 0.0;
    for (int a = 0; a <= order; ++a) {
      if (a > 0) {
        block_derivative(cur.data(), b.count, g.h, next.data());
        cur.swap(next);
      }
      for (int k = 0; k < b.count; ++k) sq += block_weight(b, k, g.h) * std::norm(cur[k]);
    }
    total += std::sqrt(sq);
  }
  return total;
}

// Broken H^m norm of one component of a 2D field (x2 derivatives spectral).
inline double broken_norm_component(const std::vector<double>& u, Layout layout, const Grid2D& g,
                                    int order) {
  if (order < 0 || order > 3) throw UnsupportedOrderError("broken_norm supports orders 0..3");
  const int nx2 = g.n_x2;
  const double dx2 = g.dx2();
  RealSpectral spec(nx2, g.length_x2());
  double total = 0.0;
  auto [bm, bp] = blocks(layout, g.x1);
  for (const Block& b : {bm, bp}) {
    double sq = 0.0;
    const std::size_t sz = static_cast<std::size_t>(b.count) * nx2;
    std::vector<double> d2(sz), cur(sz), next(sz);
    for (int bx2 = 0; bx2 <= order; ++bx2) {
      for (int k = 0; k < b.count; ++k)
        spec.derivative(u.data() + static_cast<std::size_t>(b.first + k) * nx2,
                        d2.data() + static_cast<std::size_t>(k) * nx2, bx2);
      cur = d2;
      for (int a = 0; a + bx2 <= order; ++a) {
        if (a > 0) {
          for (int c = 0; c < nx2; ++c) block_derivative(cur.data() + c, b.count, g.x1.h, next.data() + c, nx2);
          cur.swap(next);
        }
        for (int k = 0; k < b.count; ++k) {
          const double w = block_weight(b, k, g.x1.h) * dx2;
          const double* row = cur.data() + static_cast<std::size_t>(k) * nx2;
          double s = 0.0;
          for (int c = 0; c < nx2; ++c) s += row[c] * row[c];
          sq += w * s;
        }
      }
    }
    total += std::sqrt(sq);
  }
  return total;
}

// Vector norm: Euclidean combination of the three component broken norms.
inline double broken_norm(const Field2D& f, const Grid2D& g, int order) {
  const double a = broken_norm_component(f.u1, Layout::broken, g, order);
  const double b = broken_norm_component(f.u2, Layout::half, g, order);
  const double c = broken_norm_component(f.u3, Layout::node, g, order);
  return std::sqrt(a * a + b * b + c * c);
}

// Accumulates the order-0 broken norm of a 2D field one x2 column at a time,
// giving the same value as broken_norm(Field2D, g, 0) without storing the field.
class BrokenL2Accumulator {
 public:
  explicit BrokenL2Accumulator(const Grid2D& g) : g_(g) {}

  void add_column(const Staggered3<double>& col) {
    const Grid1D& x1 = g_.x1;
    const double dx2 = g_.dx2();
    for (int r = 0; r < x1.n_broken(); ++r) sq_[0][r <= x1.i0 ? 0 : 1] += dx2 * x1.broken_weight(r) * col.c1[r] * col.c1[r];
    for (int j = 0; j < x1.n_half(); ++j) sq_[1][j < x1.i0 ? 0 : 1] += dx2 * x1.h * col.c2[j] * col.c2[j];
    for (int i = 0; i < x1.n_nodes(); ++i) {
      const double v = col.c3[i] * col.c3[i] * dx2;
      if (i == x1.i0) {
        sq_[2][0] += 0.5 * x1.h * v;
        sq_[2][1] += 0.5 * x1.h * v;
      } else {
        sq_[2][i < x1.i0 ? 0 : 1] += x1.node_weight(i) * v;
      }
    }
  }

  double component(int c) const { return std::sqrt(sq_[c][0]) + std::sqrt(sq_[c][1]); }
  double value() const {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += component(c) * component(c);
    return std::sqrt(s);
  }

 private:
  Grid2D g_;
  double sq_[3][2] = {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
};

}  // namespace kerrwave
