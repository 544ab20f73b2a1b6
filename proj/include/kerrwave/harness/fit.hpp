#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kerrwave/core/errors.hpp"

namespace kerrwave {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS deviation of log(value) from the line
};

// Least-squares line through (log x, log y).
inline SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) throw StructuralError("slope fit needs at least two pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(pairs.size());
  for (const auto& [x, y] : pairs) {
    if (!(x > 0.0) || !(y > 0.0)) throw DivisionError("slope fit needs positive values");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw DivisionError("slope fit needs distinct abscissae");
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double r = 0.0;
  for (const auto& [x, y] : pairs) {
    const double d = std::log(y) - (f.intercept + f.slope * std::log(x));
    r += d * d;
  }
  f.residual = std::sqrt(r / n);
  return f;
}

// Either |slope - reference| <= tolerance or slope >= reference - tolerance.
enum class SlopeRule { within, at_least };

struct ScalingResult {
  std::string name;
  std::vector<std::pair<double, double>> pairs;
  SlopeFit fit;
  double reference = 0.0;
  double tolerance = 0.0;
  SlopeRule rule = SlopeRule::within;
  bool pass = false;
};

inline ScalingResult make_scaling(std::string name, std::vector<std::pair<double, double>> pairs, double reference,
                                  double tolerance, SlopeRule rule = SlopeRule::within) {
  ScalingResult r{std::move(name), std::move(pairs), {}, reference, tolerance, rule, false};
  r.fit = fit_slope(r.pairs);
  r.pass = rule == SlopeRule::within ? std::abs(r.fit.slope - reference) <= tolerance
                                     : r.fit.slope >= reference - tolerance;
  return r;
}

}  // namespace kerrwave
