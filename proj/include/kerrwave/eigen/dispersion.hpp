#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/eigen/lifted.hpp"
#include "kerrwave/eigen/staggered.hpp"

namespace kerrwave {

enum class Scheme { lifted, staggered };

struct ModeSearch {
  Scheme scheme = Scheme::lifted;
  double d = 200.0;
  double h = 0.01;
  int n_eigs = 10;
  double tol = 1e-10;
  int margin_nodes = 100;
  double margin_threshold = 1e-6;
};

struct PairInfo {
  double omega = 0.0;
  double residual = 0.0;
  bool localized = false;
  RealVec w3;  // on all nodes
};

inline std::vector<PairInfo> eigenpairs_at(double k, double target, const PiecewiseProfile& prof,
                                           const ModeSearch& cfg) {
  const Grid1D g = make_grid(cfg.d, cfg.h);
  SolveOptions opt;
  opt.n_eigs = cfg.n_eigs;
  opt.tol = cfg.tol;
  std::vector<PairInfo> out;
  if (cfg.scheme == Scheme::lifted) {
    const ReducedOperator op = assemble_reduced_operator(k, g, prof);
    for (auto& p : solve_lifted(op, target, opt))
      out.push_back({p.omega, p.residual, is_localized(p.w3, g, cfg.margin_nodes, cfg.margin_threshold), p.w3});
  } else {
    const StaggeredOperator op = assemble_staggered_operator(k, g, prof);
    for (auto& p : solve_staggered(op, target, opt)) {
      RealVec w = with_ends(p.w3);
      const bool loc = is_localized(w, g, cfg.margin_nodes, cfg.margin_threshold);
      out.push_back({p.omega, p.residual, loc, std::move(w)});
    }
  }
  return out;
}

inline double gap_to_others(const std::vector<PairInfo>& pairs, double omega) {
  double gap = 1e300;
  for (const auto& p : pairs)
    if (p.omega != omega) gap = std::min(gap, std::abs(p.omega - omega));
  return gap;
}

// Threshold of the essential spectrum of the unbounded problem in omega.
inline double essential_threshold(double k, const PiecewiseProfile& prof) {
  const double e = std::max(prof.minus.eps1_inf, prof.plus.eps1_inf);
  return std::abs(k) / std::sqrt(prof.mu0 * e);
}

// Localized eigenvalue nearest to target. The discretized continuum above the
// threshold can crowd out bound states, so if the first solve returns no
// localized pair the shift is moved down through the gap below the threshold.
inline std::optional<PairInfo> nearest_localized(double k, double target, const PiecewiseProfile& prof,
                                                 const ModeSearch& cfg) {
  std::vector<PairInfo> found;
  auto collect = [&](double shift) {
    for (auto& p : eigenpairs_at(k, shift, prof, cfg))
      if (p.localized) found.push_back(std::move(p));
  };
  collect(target);
  const double top = std::min(std::abs(target), essential_threshold(k, prof));
  for (int j = 1; found.empty() && j < 34; ++j) collect((target < 0 ? -1.0 : 1.0) * top * (1.0 - 0.03 * j));
  if (found.empty()) return std::nullopt;
  auto best = std::min_element(found.begin(), found.end(), [&](const PairInfo& a, const PairInfo& b) {
    return std::abs(a.omega - target) < std::abs(b.omega - target);
  });
  return *best;
}

struct DispersionPoint {
  double k = 0.0;
  double omega = 0.0;
  double residual = 0.0;
  double gap = 0.0;
};

struct ScanResult {
  std::vector<DispersionPoint> curve;
  bool truncated = false;
  double lost_at_k = 0.0;
};

// Continuation in k: each solve is shifted to the prediction from the previous
// points and takes the localized pair closest to it.
inline ScanResult dispersion_scan(const std::vector<double>& ks, const PiecewiseProfile& prof, double seed_omega,
                                  const ModeSearch& cfg) {
  ScanResult res;
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (!(ks[i] > ks[i - 1])) throw StructuralError("k values must be increasing");
  double prev = seed_omega, slope = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double target = i == 0 ? seed_omega : prev + slope * (ks[i] - ks[i - 1]);
    const auto pairs = eigenpairs_at(ks[i], target, prof, cfg);
    const PairInfo* best = nullptr;
    for (const auto& p : pairs)
      if (p.localized && (!best || std::abs(p.omega - target) < std::abs(best->omega - target))) best = &p;
    if (!best) {
      res.truncated = true;
      res.lost_at_k = ks[i];
      break;
    }
    if (i > 0) slope = (best->omega - prev) / (ks[i] - ks[i - 1]);
    prev = best->omega;
    res.curve.push_back({ks[i], best->omega, best->residual, gap_to_others(pairs, best->omega)});
  }
  return res;
}

struct Derivatives {
  double nu0 = 0.0, nu1 = 0.0, nu2 = 0.0;
  double nu1_err = 0.0, nu2_err = 0.0;
};

// Central differences at steps dk and dk/2, combined by Richardson extrapolation;
// the error estimates are the extrapolation defects.
inline Derivatives richardson_derivatives(const std::function<double(double)>& omega, double k0, double dk) {
  const double w0 = omega(k0);
  const double wp = omega(k0 + dk), wm = omega(k0 - dk);
  const double wp2 = omega(k0 + 0.5 * dk), wm2 = omega(k0 - 0.5 * dk);
  const double d1a = (wp - wm) / (2.0 * dk), d1b = (wp2 - wm2) / dk;
  const double d2a = (wp - 2.0 * w0 + wm) / (dk * dk), d2b = (wp2 - 2.0 * w0 + wm2) / (0.25 * dk * dk);
  Derivatives d;
  d.nu0 = w0;
  d.nu1 = (4.0 * d1b - d1a) / 3.0;
  d.nu2 = (4.0 * d2b - d2a) / 3.0;
  d.nu1_err = std::abs(d.nu1 - d1b);
  d.nu2_err = std::abs(d.nu2 - d2b);
  return d;
}

// Tracks the branch through omega(k0) = nu0_guess without the localization
// filter (the truncated problem is used as is); throws if another eigenvalue
// comes close enough to make the branch ambiguous.
inline Derivatives dispersion_derivatives(double k0, double nu0_guess, const PiecewiseProfile& prof,
                                          const ModeSearch& cfg, double dk = 0.01) {
  double nu0 = 0.0, slope = 0.0;
  auto track = [&](double k, double target) {
    const auto pairs = eigenpairs_at(k, target, prof, cfg);
    if (pairs.empty()) throw ConvergenceError("no eigenvalue near the tracked branch", 0.0);
    const double w = pairs.front().omega;
    const double miss = std::abs(w - target);
    const double gap = gap_to_others(pairs, w);
    if (gap < 3.0 * miss + 1e-12) throw ConvergenceError("eigenvalue crossing inside the difference stencil", gap);
    return w;
  };
  nu0 = track(k0, nu0_guess);
  const double probe = 0.02 * dk;
  slope = (track(k0 + probe, nu0) - track(k0 - probe, nu0)) / (2.0 * probe);
  return richardson_derivatives([&](double k) { return track(k, nu0 + slope * (k - k0)); }, k0, dk);
}

struct AuditReport {
  bool gap_ok = false, below_continuum = false, nonresonant = false;
  double gap = 0.0;
  double continuum_margin_minus = 0.0, continuum_margin_plus = 0.0;
  double third_harmonic_margin = 0.0;
  bool have_3k0 = false;
};

struct DispersionData {
  double k0 = 0.0;
  Derivatives nu;
  std::vector<DispersionPoint> curve;
  double gap = 0.0;
  std::optional<double> omega_3k0;
  AuditReport audit;
};

inline AuditReport audit_assumptions(const DispersionData& dd, const PiecewiseProfile& prof,
                                     double gap_margin = 1e-8, double resonance_margin = 1e-3) {
  AuditReport a;
  const double k0 = dd.k0, nu0 = dd.nu.nu0;
  a.gap = dd.gap;
  a.gap_ok = dd.gap > gap_margin;
  a.continuum_margin_minus = k0 * k0 - nu0 * nu0 * prof.mu0 * prof.minus.eps1_inf;
  a.continuum_margin_plus = k0 * k0 - nu0 * nu0 * prof.mu0 * prof.plus.eps1_inf;
  a.have_3k0 = dd.omega_3k0.has_value();
  const bool w3_nonzero = a.have_3k0 && *dd.omega_3k0 != 0.0;
  a.below_continuum = nu0 != 0.0 && w3_nonzero && a.continuum_margin_minus > 0.0 && a.continuum_margin_plus > 0.0;
  // Without a localized eigenvalue at 3 k0 there is nothing to resonate with.
  a.third_harmonic_margin = a.have_3k0 ? std::abs(3.0 * nu0 - *dd.omega_3k0) : 1e300;
  a.nonresonant = a.third_harmonic_margin > resonance_margin;
  return a;
}

// omega nearest target on [-d, d] for each d (no filter), and an Aitken
// extrapolation of the last three values.
struct DomainStudy {
  std::vector<double> d, omega;
  double extrapolated = 0.0;
};

inline DomainStudy domain_study(double k, double target, const PiecewiseProfile& prof, double h,
                                const std::vector<double>& ds, Scheme scheme = Scheme::lifted) {
  DomainStudy s;
  for (double d : ds) {
    ModeSearch cfg;
    cfg.scheme = scheme;
    cfg.d = d;
    cfg.h = h;
    const auto pairs = eigenpairs_at(k, target, prof, cfg);
    if (pairs.empty()) throw ConvergenceError("no eigenvalue near the target", 0.0);
    s.d.push_back(d);
    s.omega.push_back(pairs.front().omega);
  }
  const std::size_t n = s.omega.size();
  s.extrapolated = s.omega.back();
  if (n >= 3) {
    const double a = s.omega[n - 3], b = s.omega[n - 2], c = s.omega[n - 1];
    const double den = (c - b) - (b - a);
    if (std::abs(den) > 1e-14 * std::abs(c) && std::abs(c - b) < std::abs(b - a))
      s.extrapolated = c - (c - b) * (c - b) / den;
  }
  return s;
}

// Full dispersion record at k0 with the 3 k0 solve and the audit.
inline DispersionData dispersion_data(double k0, double nu0_guess, const PiecewiseProfile& prof,
                                      const ModeSearch& cfg, double dk = 0.01) {
  DispersionData dd;
  dd.k0 = k0;
  dd.nu = dispersion_derivatives(k0, nu0_guess, prof, cfg, dk);
  const auto pairs = eigenpairs_at(k0, dd.nu.nu0, prof, cfg);
  dd.gap = gap_to_others(pairs, pairs.front().omega);
  dd.curve.push_back({k0, dd.nu.nu0, pairs.front().residual, dd.gap});
  ModeSearch c3 = cfg;
  if (auto p = nearest_localized(3.0 * k0, 3.0 * dd.nu.nu0, prof, c3)) dd.omega_3k0 = p->omega;
  dd.audit = audit_assumptions(dd, prof);
  return dd;
}

}  // namespace kerrwave
