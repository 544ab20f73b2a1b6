#pragma once

#include <cmath>
#include <string>

#include "kerrwave/core/errors.hpp"

namespace kerrwave {

enum class Side { minus, plus };

// Staggered grid on [-d, d] with the interface x1 = 0 on a node.
//
//   nodes   x_i = -d + i h, i = 0..n          H3-type fields, zero at both ends
//   broken  nodes with the interface stored twice, rows r = 0..n+1;
//           rows 0..i0 form the minus block, rows i0+1..n+1 the plus block
//   half    x_{j+1/2}, j = 0..n-1             E2-type fields; j < i0 is minus
struct Grid1D {
  double d = 0.0;
  double h = 0.0;
  int n = 0;
  int i0 = 0;

  int n_minus() const { return i0; }
  int n_plus() const { return n - i0; }
  int interface_index() const { return i0; }

  int n_nodes() const { return n + 1; }
  int n_broken() const { return n + 2; }
  int n_half() const { return n; }

  double node_x(int i) const { return -d + i * h; }
  double half_x(int j) const { return -d + (j + 0.5) * h; }
  int broken_node(int r) const { return r <= i0 ? r : r - 1; }
  Side broken_side(int r) const { return r <= i0 ? Side::minus : Side::plus; }
  double broken_x(int r) const { return node_x(broken_node(r)); }
  Side half_side(int j) const { return j < i0 ? Side::minus : Side::plus; }
  Side node_side(int i) const { return i < i0 ? Side::minus : Side::plus; }

  // Trapezoid weights per half-domain; cell-centred values use the midpoint rule.
  double node_weight(int i) const { return (i == 0 || i == n) ? 0.5 * h : h; }
  double broken_weight(int r) const {
    return (r == 0 || r == i0 || r == i0 + 1 || r == n + 1) ? 0.5 * h : h;
  }
  double half_weight(int) const { return h; }
};

inline Grid1D make_grid(double d, double h) {
  if (!(h > 0.0) || !(d > 0.0)) throw StructuralError("grid needs d > 0 and h > 0");
  const double ratio = d / h;
  const long half_n = std::lround(ratio);
  if (half_n < 3 || std::abs(ratio - static_cast<double>(half_n)) > 1e-6 * ratio)
    throw StructuralError("d must be an integer multiple of h (at least 3h)");
  Grid1D g;
  g.h = h;
  g.i0 = static_cast<int>(half_n);
  g.n = 2 * g.i0;
  g.d = g.i0 * h;
  return g;
}

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Periodic in x2.
struct Grid2D {
  Grid1D x1;
  double x2_min = 0.0;
  double x2_max = 0.0;
  int n_x2 = 0;

  double length_x2() const { return x2_max - x2_min; }
  double dx2() const { return length_x2() / n_x2; }
  double x2(int c) const { return x2_min + c * dx2(); }
};

inline Grid2D make_grid2d(const Grid1D& g1, double x2_min, double x2_max, int n_x2) {
  if (!is_power_of_two(n_x2)) throw StructuralError("n_x2 must be a power of two");
  if (!(x2_max > x2_min)) throw StructuralError("empty x2 range");
  return Grid2D{g1, x2_min, x2_max, n_x2};
}

}  // namespace kerrwave
