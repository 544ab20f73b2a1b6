#pragma once

#include <vector>

#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/profile.hpp"

namespace kerrwave {

// Coefficients evaluated once on the staggered locations.
struct SampledProfile {
  std::vector<double> eps1_b, eps3_b;  // broken rows (one-sided at the interface)
  std::vector<double> eps1_h, eps3_h;  // half nodes
  std::vector<double> inv_eps1_n;      // 1/eps1 at nodes, interface: mean of both sides
  double mu0 = 1.0;
};

inline SampledProfile sample_profile(const PiecewiseProfile& p, const Grid1D& g) {
  SampledProfile s;
  s.mu0 = p.mu0;
  s.eps1_b.resize(g.n_broken());
  s.eps3_b.resize(g.n_broken());
  for (int r = 0; r < g.n_broken(); ++r) {
    s.eps1_b[r] = p.eps1(g.broken_side(r), g.broken_x(r));
    s.eps3_b[r] = p.eps3(g.broken_side(r), g.broken_x(r));
  }
  s.eps1_h.resize(g.n_half());
  s.eps3_h.resize(g.n_half());
  for (int j = 0; j < g.n_half(); ++j) {
    s.eps1_h[j] = p.eps1(g.half_side(j), g.half_x(j));
    s.eps3_h[j] = p.eps3(g.half_side(j), g.half_x(j));
  }
  s.inv_eps1_n.resize(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) {
    if (i == g.i0)
      s.inv_eps1_n[i] = 0.5 * (1.0 / s.eps1_b[g.i0] + 1.0 / s.eps1_b[g.i0 + 1]);
    else
      s.inv_eps1_n[i] = 1.0 / p.eps1(g.node_side(i), g.node_x(i));
  }
  return s;
}

}  // namespace kerrwave
