#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/grid.hpp"

namespace kerrwave {

struct SideProfile {
  std::function<double(double)> eps1;
  std::function<double(double)> deps1;
  std::function<double(double)> eps3;
  double eps1_inf = 1.0;
  double eps3_inf = 0.0;
};

// Coefficients eps1, eps3 given separately on x1 < 0 and x1 > 0 so that the
// one-sided limits at the interface are well defined.
struct PiecewiseProfile {
  SideProfile minus;
  SideProfile plus;
  double mu0 = 1.0;
  std::string name;

  const SideProfile& side(Side s) const { return s == Side::minus ? minus : plus; }
  double eps1(Side s, double x) const { return side(s).eps1(x); }
  double deps1(Side s, double x) const { return side(s).deps1(x); }
  double eps3(Side s, double x) const { return side(s).eps3(x); }
  double eps1(double x) const { return eps1(x < 0.0 ? Side::minus : Side::plus, x); }
  double eps3(double x) const { return eps3(x < 0.0 ? Side::minus : Side::plus, x); }

  // Relative jump of eps1 at the interface, used by the lift.
  double relative_jump() const {
    const double em = minus.eps1(0.0);
    if (em == 0.0) throw DivisionError("eps1 vanishes at the interface from the left");
    return (plus.eps1(0.0) - em) / em;
  }
};

inline SideProfile constant_side(double eps1, double eps3) {
  return SideProfile{[eps1](double) { return eps1; }, [](double) { return 0.0; },
                     [eps3](double) { return eps3; }, eps1, eps3};
}

inline PiecewiseProfile constant_profile(double eps1_minus, double eps1_plus, double eps3 = 0.0,
                                         double mu0 = 1.0) {
  return PiecewiseProfile{constant_side(eps1_minus, eps3), constant_side(eps1_plus, eps3), mu0,
                          "constant"};
}

// eps1 = 1 on x1 < 0 and 1 + exp(-x1) on x1 > 0, mu0 = 1, constant eps3.
inline PiecewiseProfile decay_profile(double eps3 = 1.0) {
  PiecewiseProfile p;
  p.minus = constant_side(1.0, eps3);
  p.plus = SideProfile{[](double x) { return 1.0 + std::exp(-x); },
                       [](double x) { return -std::exp(-x); },
                       [eps3](double) { return eps3; }, 1.0, eps3};
  p.mu0 = 1.0;
  p.name = "decay_profile";
  return p;
}

inline PiecewiseProfile with_eps3(PiecewiseProfile p, std::function<double(Side, double)> f) {
  p.minus.eps3 = [f](double x) { return f(Side::minus, x); };
  p.plus.eps3 = [f](double x) { return f(Side::plus, x); };
  p.minus.eps3_inf = f(Side::minus, -1e6);
  p.plus.eps3_inf = f(Side::plus, 1e6);
  return p;
}

inline PiecewiseProfile with_constant_eps3(PiecewiseProfile p, double c) {
  return with_eps3(std::move(p), [c](Side, double) { return c; });
}

// Samples (x, value) on one side. Values between samples use local cubic
// Lagrange interpolation; derivatives come from fourth-order differences at the
// samples (one-sided near the table ends). Outside the table the end value is held.
class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> x, std::vector<double> v) : x_(std::move(x)), v_(std::move(v)) {
    if (x_.size() != v_.size() || x_.size() < 5)
      throw StructuralError("tabulated profile needs at least 5 samples");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw StructuralError("tabulated x must be increasing");
    const double h = x_[1] - x_[0];
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (std::abs(x_[i] - x_[i - 1] - h) > 1e-8 * std::max(1.0, h))
        throw StructuralError("tabulated x must be uniformly spaced");
    const std::size_t n = x_.size();
    dv_.resize(n);
    static const double c_fwd[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    static const double c_fwd1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      if (i >= 2 && i + 2 < n) {
        s = v_[i - 2] - 8.0 * v_[i - 1] + 8.0 * v_[i + 1] - v_[i + 2];
      } else if (i == 0) {
        for (int k = 0; k < 5; ++k) s += c_fwd[k] * v_[k];
      } else if (i == 1) {
        for (int k = 0; k < 5; ++k) s += c_fwd1[k] * v_[k];
      } else if (i == n - 1) {
        for (int k = 0; k < 5; ++k) s -= c_fwd[k] * v_[n - 1 - k];
      } else {
        for (int k = 0; k < 5; ++k) s -= c_fwd1[k] * v_[n - 1 - k];
      }
      dv_[i] = s / (12.0 * h);
    }
  }

  double value(double x) const { return interp(v_, x); }
  double derivative(double x) const {
    if (x <= x_.front() || x >= x_.back()) return 0.0;
    return interp(dv_, x);
  }
  double front() const { return v_.front(); }
  double back() const { return v_.back(); }

 private:
  double interp(const std::vector<double>& f, double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return f.front();
    if (x >= x_.back()) return f.back();
    const double h = x_[1] - x_[0];
    long i = static_cast<long>(std::floor((x - x_.front()) / h)) - 1;
    i = std::clamp<long>(i, 0, static_cast<long>(n) - 4);
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) l *= (x - x_[i + b]) / (x_[i + a] - x_[i + b]);
      s += l * f[i + a];
    }
    return s;
  }

  std::vector<double> x_, v_, dv_;
};

// Two-column CSV (x1, value); a non-numeric first line is treated as a header.
inline TabulatedFunction read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open profile table " + path);
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, v;
    if (!(ss >> x >> v)) {
      if (xs.empty()) continue;
      throw StructuralError("malformed row in " + path + ": " + line);
    }
    xs.push_back(x);
    vs.push_back(v);
  }
  return TabulatedFunction(std::move(xs), std::move(vs));
}

// Sides tabulated separately; the minus table should cover x1 <= 0 and the plus
// table x1 >= 0. eps3 is constant until overridden.
inline PiecewiseProfile tabulated_profile(const std::string& minus_csv, const std::string& plus_csv,
                                          double eps3 = 0.0, double mu0 = 1.0) {
  auto tm = std::make_shared<TabulatedFunction>(read_table_csv(minus_csv));
  auto tp = std::make_shared<TabulatedFunction>(read_table_csv(plus_csv));
  PiecewiseProfile p;
  p.minus = SideProfile{[tm](double x) { return tm->value(x); },
                        [tm](double x) { return tm->derivative(x); },
                        [eps3](double) { return eps3; }, tm->front(), eps3};
  p.plus = SideProfile{[tp](double x) { return tp->value(x); },
                       [tp](double x) { return tp->derivative(x); },
                       [eps3](double) { return eps3; }, tp->back(), eps3};
  p.mu0 = mu0;
  p.name = "tabulated";
  return p;
}

// Smallest sampled eps1 on each side; throws if eps1 is not positive somewhere.
inline double validate_profile(const PiecewiseProfile& p, const Grid1D& g) {
  double lo = 1e300;
  for (int r = 0; r < g.n_broken(); ++r) lo = std::min(lo, p.eps1(g.broken_side(r), g.broken_x(r)));
  for (int j = 0; j < g.n_half(); ++j) lo = std::min(lo, p.eps1(g.half_side(j), g.half_x(j)));
  if (!(lo > 0.0)) throw StructuralError("eps1 must be bounded below by a positive constant");
  if (!(p.mu0 > 0.0)) throw StructuralError("mu0 must be positive");
  return lo;
}

// |eps1 - eps1_inf| is non-increasing on the samples beyond the given radius.
inline bool approaches_limits(const PiecewiseProfile& p, const Grid1D& g, double radius) {
  double prev = 1e300;
  for (int i = g.i0; i >= 0; --i) {
    const double x = g.node_x(i);
    if (-x < radius) continue;
    const double dev = std::abs(p.minus.eps1(x) - p.minus.eps1_inf);
    if (dev > prev + 1e-15) return false;
    prev = dev;
  }
  prev = 1e300;
  for (int i = g.i0; i <= g.n; ++i) {
    const double x = g.node_x(i);
    if (x < radius) continue;
    const double dev = std::abs(p.plus.eps1(x) - p.plus.eps1_inf);
    if (dev > prev + 1e-15) return false;
    prev = dev;
  }
  return true;
}

}  // namespace kerrwave
