#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kerrwave/ansatz/ansatz.hpp"
#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/norms.hpp"
#include "kerrwave/core/profile.hpp"
#include "kerrwave/correctors/correctors.hpp"
#include "kerrwave/eigen/dispersion.hpp"
#include "kerrwave/harness/config.hpp"
#include "kerrwave/harness/fit.hpp"
#include "kerrwave/harness/report.hpp"
#include "kerrwave/maxwell/compat.hpp"
#include "kerrwave/maxwell/maxwell.hpp"
#include "kerrwave/nls/envelope.hpp"

namespace kerrwave {

struct ExperimentConfig {
  std::string experiment = "dispersion";
  std::string profile = "decay_profile";  // or "tabulated"
  std::string eps1_minus_csv, eps1_plus_csv;
  double eps3 = 1.0;
  double mu0 = 1.0;
  double k0 = 0.5;
  double nu0_guess = 0.494;

  // eigenvalue reproduction
  double eig_h = 0.01;
  double eig_d = 200.0;
  std::vector<double> extrapolation_d{100.0, 200.0, 400.0};
  std::vector<double> doubling_d{25.0, 50.0, 100.0, 200.0};

  // staggered grid shared by correctors, ansatz and Maxwell
  double d = 60.0;
  double h = 0.1;

  // envelope A(X, 0) = amplitude exp(-X^2 / (2 width^2)) on a box of length envelope_length
  double amplitude = 1.0;
  double width = std::numbers::sqrt2;
  double envelope_length = 40.0;
  int envelope_n = 512;

  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
  // Maxwell runs are costlier; their sweep is kept separate.
  std::vector<double> evolve_eps{0.1, 0.07, 0.05};
  double residual_max_dx2 = 0.4;
  double evolve_max_dx2 = 0.8;
  double T0 = 0.25;
  double dt_cfl = 1.0;
  double snapshot_every = 1.0;
  bool write_snapshots = false;

  std::string out = "out";
  unsigned seed = 20240501u;
};

inline void validate(const ExperimentConfig& c) {
  for (const auto* list : {&c.eps_list, &c.evolve_eps}) {
    if (list->empty()) throw StructuralError("eps list is empty");
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (!((*list)[i] > 0.0 && (*list)[i] < 1.0)) throw StructuralError("each eps must lie in (0, 1)");
      if (i > 0 && !((*list)[i] < (*list)[i - 1])) throw StructuralError("eps list must be strictly decreasing");
    }
  }
  if (!(c.T0 > 0.0)) throw StructuralError("T0 must be positive");
  if (!(c.d > 0.0 && c.h > 0.0)) throw StructuralError("grid d and h must be positive");
}

// Reads the keys documented in the README; unknown keys are ignored.
inline ExperimentConfig experiment_config(const ConfigFile& f, ExperimentConfig c = {}) {
  c.experiment = f.get_string("experiment", c.experiment);
  c.profile = f.get_string("profile", c.profile);
  c.eps1_minus_csv = f.get_string("profile_minus_csv", c.eps1_minus_csv);
  c.eps1_plus_csv = f.get_string("profile_plus_csv", c.eps1_plus_csv);
  c.eps3 = f.get_double("eps3", c.eps3);
  c.mu0 = f.get_double("mu0", c.mu0);
  c.k0 = f.get_double("k0", c.k0);
  c.nu0_guess = f.get_double("nu0_guess", c.nu0_guess);
  c.eig_h = f.get_double("eigen.h", c.eig_h);
  c.eig_d = f.get_double("eigen.d", c.eig_d);
  c.extrapolation_d = f.get_list("eigen.extrapolation_d", c.extrapolation_d);
  c.doubling_d = f.get_list("eigen.doubling_d", c.doubling_d);
  c.d = f.get_double("grid.d", c.d);
  c.h = f.get_double("grid.h", c.h);
  c.residual_max_dx2 = f.get_double("grid.residual_max_dx2", c.residual_max_dx2);
  c.evolve_max_dx2 = f.get_double("grid.max_dx2", c.evolve_max_dx2);
  c.envelope_length = f.get_double("grid.x2_extent", c.envelope_length);
  c.amplitude = f.get_double("envelope.amplitude", c.amplitude);
  c.width = f.get_double("envelope.width", c.width);
  c.envelope_n = f.get_int("envelope.n", c.envelope_n);
  c.eps_list = f.get_list("eps", c.eps_list);
  c.evolve_eps = f.get_list("evolve_eps", c.evolve_eps);
  c.T0 = f.get_double("T0", c.T0);
  c.dt_cfl = f.get_double("dt_cfl", c.dt_cfl);
  c.snapshot_every = f.get_double("snapshot_every", c.snapshot_every);
  c.write_snapshots = f.get_int("write_snapshots", c.write_snapshots ? 1 : 0) != 0;
  c.out = f.get_string("out", c.out);
  c.seed = static_cast<unsigned>(f.get_int("seed", static_cast<int>(c.seed)));
  validate(c);
  return c;
}

inline PiecewiseProfile make_profile(const ExperimentConfig& c) {
  PiecewiseProfile p;
  if (c.profile == "decay_profile") {
    p = decay_profile(c.eps3);
  } else if (c.profile == "tabulated") {
    p = tabulated_profile(c.eps1_minus_csv, c.eps1_plus_csv, c.eps3, c.mu0);
  } else {
    throw StructuralError("unknown profile " + c.profile);
  }
  p.mu0 = c.mu0;
  return p;
}

// Periodic x2 box centred at 0: a whole number of carrier periods close to
// envelope_length / eps, n_x2 the smallest power of two with dx2 <= max_dx2.
inline Grid2D packet_grid(const Grid1D& g, double eps, double k0, double envelope_length, double max_dx2) {
  const double period = 2.0 * std::numbers::pi / k0;
  const int periods = std::max(1, static_cast<int>(std::lround(envelope_length / (eps * period))));
  const double L = periods * period;
  int n = 2;
  while (L / n > max_dx2) n *= 2;
  return make_grid2d(g, -0.5 * L, 0.5 * L, n);
}

inline EnvelopeField initial_envelope(const ExperimentConfig& c, const Grid2D& g2, double eps) {
  const double a = c.amplitude, w = c.width;
  return sample_envelope([a, w](double X) { return cplx(a * std::exp(-X * X / (2.0 * w * w))); }, eps * g2.x2_min,
                         eps * g2.length_x2(), c.envelope_n, 0.0);
}

inline CorrectorSet default_correctors(const ExperimentConfig& c) {
  return compute_correctors(c.k0, c.nu0_guess, make_grid(c.d, c.h), make_profile(c));
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline Check check(int criterion, std::string name, double value, std::string tol, bool pass) {
  return Check{criterion, std::move(name), value, std::move(tol), pass};
}

inline std::vector<std::pair<double, double>> zip(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.emplace_back(x[i], y[i]);
  return out;
}

// max over the sweep of value / eps^p is at most `slack` times its value at the largest eps.
inline Check bounded_ratio(int criterion, const std::string& name, const std::vector<double>& eps,
                           const std::vector<double>& v, double p, double slack = 1.25) {
  double first = v.front() / std::pow(eps.front(), p), worst = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) worst = std::max(worst, v[i] / std::pow(eps[i], p) / first);
  return check(criterion, name + " (max ratio relative to largest eps)", worst,
               "<= " + format_number(slack) + ", no growth as eps decreases", worst <= slack);
}

}  // namespace detail

// Eigenvalue reproduction, 3 k0 non-resonance, domain convergence.
inline ExperimentResult run_dispersion(const ExperimentConfig& c) {
  ExperimentResult r;
  r.experiment = "dispersion";
  const PiecewiseProfile prof = make_profile(c);

  const DomainStudy ext = domain_study(c.k0, c.nu0_guess, prof, c.eig_h, c.extrapolation_d);
  Table dt{"domain_extrapolation", {"d", "omega"}, {}, {{"aitken_limit", ext.extrapolated}}};
  for (std::size_t i = 0; i < ext.d.size(); ++i) dt.rows.push_back({ext.d[i], ext.omega[i]});
  r.tables.push_back(dt);
  r.checks.push_back(detail::check(1, "nu0 after d-extrapolation", ext.extrapolated, "|nu0 - 0.494| <= 5e-3",
                                   std::abs(ext.extrapolated - 0.494) <= 5e-3));

  ModeSearch search;
  search.d = c.eig_d;
  search.h = c.eig_h;
  const DispersionData dd = dispersion_data(c.k0, c.nu0_guess, prof, search);
  const double w3 = dd.omega_3k0.value_or(std::nan(""));
  r.checks.push_back(detail::check(2, "omega(3 k0) nearest 3 nu0", w3, "|omega - 1.404| <= 1e-2",
                                   dd.omega_3k0 && std::abs(w3 - 1.404) <= 1e-2));
  r.checks.push_back(detail::check(2, "non-resonance margin |3 nu0 - omega(3 k0)|", dd.audit.third_harmonic_margin,
                                   "~0.077 (within 1e-2), above 1e-3",
                                   dd.audit.nonresonant && std::abs(dd.audit.third_harmonic_margin - 0.077) <= 1e-2));
  r.checks.push_back(detail::check(0, "spectral gap at k0", dd.gap, "> 0", dd.audit.gap_ok));
  r.checks.push_back(detail::check(0, "margin below the continuum, min over sides",
                                   std::min(dd.audit.continuum_margin_minus, dd.audit.continuum_margin_plus), "> 0",
                                   dd.audit.below_continuum));
  Table nu{"dispersion_derivatives", {"k0", "nu0", "nu1", "nu2", "gap", "omega_3k0"}, {}, {}};
  nu.rows.push_back({c.k0, dd.nu.nu0, dd.nu.nu1, dd.nu.nu2, dd.gap, w3});
  r.tables.push_back(nu);

  const DomainStudy dbl = domain_study(c.k0, c.nu0_guess, prof, c.eig_h, c.doubling_d);
  Table db{"domain_doubling", {"d", "omega", "diff_to_next"}, {}, {}};
  bool decreasing = true;
  double prev = 1e300, last = 0.0;
  for (std::size_t i = 0; i < dbl.d.size(); ++i) {
    const double diff = i + 1 < dbl.d.size() ? std::abs(dbl.omega[i + 1] - dbl.omega[i]) : std::nan("");
    db.rows.push_back({dbl.d[i], dbl.omega[i], diff});
    if (i + 1 < dbl.d.size()) {
      decreasing = decreasing && diff < prev;
      prev = diff;
      last = diff;
    }
  }
  r.tables.push_back(db);
  r.checks.push_back(detail::check(3, "|omega(d) - omega(2d)| over three doublings (last difference)", last,
                                   "strictly decreasing", decreasing && dbl.d.size() >= 4));

  std::vector<double> ks;
  for (int i = -4; i <= 6; ++i) ks.push_back(c.k0 + 0.05 * i);
  const double seed = eigenpairs_at(ks.front(), c.nu0_guess - 0.2 * 0.964, prof, search).front().omega;
  const ScanResult scan = dispersion_scan(ks, prof, seed, search);
  Table curve{"dispersion_curve", {"k", "omega", "residual", "gap"}, {}, {}};
  for (const auto& p : scan.curve) curve.rows.push_back({p.k, p.omega, p.residual, p.gap});
  r.tables.push_back(curve);
  return r;
}

// Corrector systems on the staggered grid.
inline ExperimentResult run_correctors(const ExperimentConfig& c, const CorrectorSet& cs) {
  ExperimentResult r;
  r.experiment = "correctors";
  const auto& dg = cs.diag;
  const double worst = std::max({dg.dkw_residual, dg.dk2w_residual, dg.p_residual, dg.h_residual});
  r.checks.push_back(detail::check(4, "max relative residual of the four corrector systems", worst, "<= 1e-8",
                                   worst <= 1e-8));
  r.checks.push_back(detail::check(4, "|<RHS_p, m>| with kappa from compute_kappa", dg.p_defect, "<= 1e-6",
                                   dg.p_defect <= 1e-6));
  const double jumps = std::max(dg.p_jump_identity, dg.h_jump_identity);
  r.checks.push_back(detail::check(4, "jump identities [eps1 p1 + N1], [eps1 h1 + N3]", jumps, "<= 1e-4",
                                   jumps <= 1e-4));
  r.checks.push_back(detail::check(0, "nu2 finite difference vs variational", std::abs(cs.nu.nu2 - dg.nu2_variational),
                                   "<= 1e-6", std::abs(cs.nu.nu2 - dg.nu2_variational) <= 1e-6));
  Table t{"correctors",
          {"k0", "nu0", "nu1", "nu2", "kappa", "nu2_variational", "dkw_defect", "dk2w_defect", "p_defect",
           "max_residual", "p_jump_identity", "h_jump_identity"},
          {},
          {}};
  t.rows.push_back({c.k0, cs.nu.nu0, cs.nu.nu1, cs.nu.nu2, cs.kappa, dg.nu2_variational, dg.dkw_defect,
                    dg.dk2w_defect, dg.p_defect, worst, dg.p_jump_identity, dg.h_jump_identity});
  r.tables.push_back(t);
  return r;
}

// Residual of U_ans and U_ext at t = 0 over the eps sweep, the order-four
// oracle gap, and the divergence and jump scalings.
inline ExperimentResult run_residual_scaling(const ExperimentConfig& c, const CorrectorSet& cs) {
  ExperimentResult r;
  r.experiment = "residual_scaling";
  const Grid1D g = cs.m.grid;
  std::vector<double> eps, res_ans, res_ext, gap_l2, gap_sup, div_ans, jump_ans, jump_ext;
  Table t{"res",
          {"eps", "res_l2_uans", "res_l2_uext", "oracle_gap_l2_over_eps4", "oracle_gap_sup_over_eps4", "div_l2_uans",
           "jump_d1_sup_uans", "jump_d1_sup_uext", "n_x2"},
          {},
          {}};
  for (double e : c.eps_list) {
    const Grid2D g2 = packet_grid(g, e, cs.k0, c.envelope_length, c.residual_max_dx2);
    AnsatzConfig cfg{e, &cs, initial_envelope(c, g2, e), g2, terms_ans};
    const AnsatzEvaluator ea(cfg);
    const ResidualNorms ra = residual_norms(ea, cs.coef);
    cfg.terms = terms_ext;
    const AnsatzEvaluator ee(cfg);
    const ResidualNorms re = residual_norms(ee, cs.coef);
    const OracleGap og = oracle_gap(ee, cs.coef);
    const double e4 = std::pow(e, 4);
    eps.push_back(e);
    res_ans.push_back(ra.res_l2);
    res_ext.push_back(re.res_l2);
    gap_l2.push_back(og.gap_l2 / e4);
    gap_sup.push_back(og.gap_sup / e4);
    div_ans.push_back(ra.div_l2);
    jump_ans.push_back(ra.jump_d1_sup);
    jump_ext.push_back(re.jump_d1_sup);
    t.rows.push_back({e, ra.res_l2, re.res_l2, og.gap_l2 / e4, og.gap_sup / e4, ra.div_l2, ra.jump_d1_sup,
                      re.jump_d1_sup, static_cast<double>(g2.n_x2)});
  }
  const bool enough = eps.size() >= 2;
  if (!enough) throw StructuralError("residual scaling needs at least two eps values");
  const ScalingResult s_ext = make_scaling("res_l2_uext", detail::zip(eps, res_ext), 3.5, 0.15);
  const ScalingResult s_ans = make_scaling("res_l2_uans", detail::zip(eps, res_ans), 1.5, 0.15);
  const ScalingResult s_gap = make_scaling("oracle_gap_l2", detail::zip(eps, gap_l2), 0.8, 0.0, SlopeRule::at_least);
  const ScalingResult s_sup = make_scaling("oracle_gap_sup", detail::zip(eps, gap_sup), 0.8, 0.0, SlopeRule::at_least);
  t.footer = {{"slope_res_l2_uans", s_ans.fit.slope},
              {"slope_res_l2_uext", s_ext.fit.slope},
              {"slope_oracle_gap_l2_over_eps4", s_gap.fit.slope},
              {"slope_oracle_gap_sup_over_eps4", s_sup.fit.slope},
              {"slope_div_l2_uans", fit_slope(detail::zip(eps, div_ans)).slope},
              {"slope_jump_d1_sup_uans", fit_slope(detail::zip(eps, jump_ans)).slope},
              {"slope_jump_d1_sup_uext", fit_slope(detail::zip(eps, jump_ext)).slope}};
  r.tables.push_back(t);
  r.checks.push_back(detail::check(5, "slope of ||Res(U_ext)(0)||_L2", s_ext.fit.slope, "3.5 +- 0.15", s_ext.pass));
  r.checks.push_back(detail::check(5, "slope of ||Res(U_ans)(0)||_L2", s_ans.fit.slope, "1.5 +- 0.15", s_ans.pass));
  r.checks.push_back(detail::check(6, "slope of ||Res(U_ext) - eps^4 R4||_L2 / eps^4", s_gap.fit.slope, ">= 0.8",
                                   s_gap.pass));
  r.checks.push_back(detail::check(0, "slope of the same gap in max norm (diagnostic)", s_sup.fit.slope, ">= 0.8",
                                   s_sup.pass));
  r.checks.push_back(detail::bounded_ratio(10, "||div D(U_ans)||_L2 / eps^1.5", eps, div_ans, 1.5));
  r.checks.push_back(detail::bounded_ratio(10, "sup |[D1(U_ans)]| / eps^3", eps, jump_ans, 3.0));
  r.checks.push_back(detail::bounded_ratio(10, "sup |[D1(U_ext)]| / eps^4", eps, jump_ext, 4.0));
  return r;
}

// Split-step solver against exact solutions.
inline ExperimentResult run_nls_test(const ExperimentConfig&) {
  ExperimentResult r;
  r.experiment = "nls_test";
  const double nu2 = -0.3, kappa = 0.8, eta = 1.0, L = 40.0;
  const int n = 256;
  auto sol_at = [&](double T) {
    return sample_envelope([&](double X) { return soliton(X, T, eta, nu2, kappa); }, -0.5 * L, L, n, T);
  };
  auto modulus_error = [&](double dT) {
    const int steps = static_cast<int>(std::lround(1.0 / dT));
    EnvelopeField a = sol_at(0.0);
    double err = 0.0;
    for (int s = 0; s < steps; ++s) {
      a = evolve(a, nu2, kappa, dT, 1);
      const EnvelopeField ex = sol_at(a.T);
      for (int j = 0; j < n; ++j) err = std::max(err, std::abs(std::abs(a.values[j]) - std::abs(ex.values[j])));
    }
    return err;
  };
  const EnvelopeField gauss = sample_envelope([](double X) { return cplx(std::exp(-X * X / 4.0), 0.0); }, -0.5 * L, L, n);

  const EnvelopeField a1k = evolve(gauss, nu2, kappa, 0.001, 1000);
  const double drift = std::abs(mass(a1k) - mass(gauss)) / mass(gauss);
  r.checks.push_back(detail::check(7, "relative mass drift over 1e3 steps", drift, "<= 1e-10", drift <= 1e-10));

  const EnvelopeField lin = evolve(gauss, nu2, 0.0, 0.01, 100);
  const EnvelopeField exact = linear_propagator(gauss, nu2, 1.0);
  double lerr = 0.0;
  for (int j = 0; j < n; ++j) lerr = std::max(lerr, std::abs(lin.values[j] - exact.values[j]));
  r.checks.push_back(detail::check(7, "kappa = 0 run vs analytic propagator (max)", lerr, "<= 1e-8", lerr <= 1e-8));

  const double e_fine = modulus_error(0.001);
  r.checks.push_back(
      detail::check(7, "soliton modulus error over T = 1 (dT = 1e-3)", e_fine, "<= 1e-6", e_fine <= 1e-6));

  std::vector<double> dts{0.02, 0.01, 0.005};
  std::vector<double> errs;
  for (double dT : dts) errs.push_back(modulus_error(dT));
  const ScalingResult s = make_scaling("strang_order", detail::zip(dts, errs), 2.0, 0.1);
  r.checks.push_back(detail::check(7, "Strang splitting order in dT", s.fit.slope, "2 +- 0.1", s.pass));
  Table t{"nls_order", {"dT", "soliton_modulus_error"}, {}, {{"slope", s.fit.slope}}};
  for (std::size_t i = 0; i < dts.size(); ++i) t.rows.push_back({dts[i], errs[i]});
  r.tables.push_back(t);
  return r;
}

// Staggered mode computed on a finer grid (same d, ratio even) sampled onto g.
inline ModeField sample_mode(const Mode& fine, const Grid1D& g) {
  const Grid1D& gf = fine.grid;
  const int q = static_cast<int>(std::lround(g.h / gf.h));
  if (q < 2 || q % 2 != 0 || std::abs(q * gf.h - g.h) > 1e-12 * g.h || std::abs(gf.d - g.d) > 1e-12 * g.d)
    throw StructuralError("reference grid must refine the coarse grid by an even factor");
  ModeField w(g);
  for (int r = 0; r < g.n_broken(); ++r) {
    const int node = g.broken_node(r) * q;
    w.c1[r] = fine.w.c1[r <= g.i0 ? node : node + 1];
  }
  for (int j = 0; j < g.n_half(); ++j) {
    const int a = j * q + q / 2;
    w.c2[j] = 0.5 * (fine.w.c2[a - 1] + fine.w.c2[a]);
  }
  for (int i = 0; i < g.n_nodes(); ++i) w.c3[i] = fine.w.c3[i * q];
  return w;
}

struct LinearRun {
  double h = 0.0;
  double err_l2 = 0.0;
  double err_broken1 = 0.0;
  double div_drift = 0.0;
  double jump_drift = 0.0;
  double energy_drift = 0.0;
};

// eps3 = 0, carrier data from the reference mode, compared with the
// phase-advanced reference carrier after time t_end.
inline LinearRun linear_carrier_run(const PiecewiseProfile& lin, const Mode& ref, double h, double t_end, double cfl) {
  const Grid1D g = make_grid(ref.grid.d, h);
  const ModeField w = sample_mode(ref, g);
  const Grid2D g2 = make_grid2d(g, 0.0, 2.0 * std::numbers::pi / ref.k, 16);
  MaxwellSolver sol(g2, lin);
  FluxState s = sol.from_fields(carrier_field(w, ref.k, ref.omega, 0.0, g2));
  const Field2D div0 = divergence_field(s.f, g2);
  const auto jump0 = jump_at_interface(s.f, g);
  const double e0 = linear_energy(sol.fields(s), s.f, g2, lin.mu0);
  const int steps = static_cast<int>(std::ceil(t_end / sol.max_dt(cfl)));
  const double dt = t_end / steps;
  for (int i = 0; i < steps; ++i) sol.step(s, dt, StepOptions{cfl, false});
  LinearRun out;
  out.h = h;
  const Field2D diff = difference(sol.fields(s), carrier_field(w, ref.k, ref.omega, s.t, g2));
  out.err_l2 = broken_norm(diff, g2, 0);
  out.err_broken1 = broken_norm(diff, g2, 1);
  out.div_drift = broken_norm_component(difference(divergence_field(s.f, g2), div0).u2, Layout::half, g2, 0);
  const auto jump1 = jump_at_interface(s.f, g);
  for (std::size_t k = 0; k < jump1.size(); ++k) out.jump_drift = std::max(out.jump_drift, std::abs(jump1[k] - jump0[k]));
  out.energy_drift = std::abs(linear_energy(sol.fields(s), s.f, g2, lin.mu0) - e0) / e0;
  return out;
}

inline ExperimentResult run_linear_maxwell(const ExperimentConfig& c) {
  ExperimentResult r;
  r.experiment = "linear_maxwell";
  const PiecewiseProfile lin = with_constant_eps3(make_profile(c), 0.0);
  const double h_ref = c.h / 8.0;
  const Mode ref = corrector_mode(c.k0, c.nu0_guess, make_grid(c.d, h_ref), lin);
  const double t_end = 5.0;
  const LinearRun a = linear_carrier_run(lin, ref, c.h, t_end, 0.5);
  const LinearRun b = linear_carrier_run(lin, ref, 0.5 * c.h, t_end, 0.5);
  const double order = std::log2(a.err_l2 / b.err_l2);
  const double order1 = std::log2(a.err_broken1 / b.err_broken1);
  Table t{"linear_maxwell", {"h", "err_l2", "err_broken1", "div_drift", "jump_drift", "energy_drift"}, {}, {}};
  for (const auto& x : {a, b}) t.rows.push_back({x.h, x.err_l2, x.err_broken1, x.div_drift, x.jump_drift, x.energy_drift});
  t.footer = {{"order_l2", order}, {"order_broken1", order1}, {"reference_h", h_ref}};
  r.tables.push_back(t);
  r.checks.push_back(detail::check(8, "order in h of the L2 error vs the exact carrier", order, ">= 2", order >= 2.0));
  const double cons = std::max({a.div_drift, b.div_drift, a.jump_drift, b.jump_drift});
  r.checks.push_back(
      detail::check(8, "drift of div D and [D1] (exact in the scheme)", cons, "<= 1e-12", cons <= 1e-12));
  return r;
}

struct EvolveSummary {
  double eps = 0.0;
  double sup_err_broken1 = 0.0;
  double min_margin = 0.0;
  double max_div_drift = 0.0;
  double max_jump_drift = 0.0;
  double seconds = 0.0;
  int steps = 0;
  Table series;
};

// Maxwell from U_ext(., 0) up to T0 / eps^2, compared with U_ans at
// snapshot times; the envelope advances with the same dT = eps^2 dt.
inline EvolveSummary evolve_against_ansatz(const ExperimentConfig& c, const CorrectorSet& cs, double eps,
                                           const std::filesystem::path& snap_dir = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid1D g = cs.m.grid;
  const PiecewiseProfile prof = make_profile(c);
  const Grid2D g2 = packet_grid(g, eps, cs.k0, c.envelope_length, c.evolve_max_dx2);
  const double t_final = c.T0 / (eps * eps);
  // The packet centre must stay ten envelope widths away from the x2 seam.
  const double travel = std::abs(cs.nu.nu1) * t_final;
  if (0.5 * g2.length_x2() - travel < 10.0 * c.width / eps)
    throw SeamError("x2 box too short: the packet would come within ten widths of the seam");
  AnsatzConfig cfg{eps, &cs, initial_envelope(c, g2, eps), g2, terms_ext};
  MaxwellSolver sol(g2, prof);
  FluxState s = sol.from_fields(build_U_ext(cfg));
  const Field2D div0 = divergence_field(s.f, g2);
  const auto jump0 = jump_at_interface(s.f, g);

  const int steps = static_cast<int>(std::ceil(t_final / sol.max_dt(c.dt_cfl)));
  const double dt = t_final / steps;
  const int every = std::max(1, static_cast<int>(std::lround(c.snapshot_every / dt)));
  EvolveSummary out;
  out.eps = eps;
  out.steps = steps;
  out.min_margin = 1e300;
  out.series = Table{"evolve_eps_" + format_number(eps),
                     {"t", "err_l2", "err_broken1", "div_drift", "jump_D1", "omega_margin"},
                     {},
                     {}};
  EnvelopeField env = cfg.envelope;
  int env_step = 0;
  for (int i = 0; i <= steps; ++i) {
    if (i % every == 0 || i == steps) {
      env = evolve(env, cs.nu.nu2, cs.kappa, dt * eps * eps, i - env_step);
      env_step = i;
      AnsatzConfig ac = cfg;
      ac.envelope = env;
      ac.terms = terms_ans;
      const Field2D& e = sol.fields(s);
      const Field2D diff = difference(e, build_U_ans(ac));
      const double el2 = broken_norm(diff, g2, 0), e1 = broken_norm(diff, g2, 1);
      const double dd = broken_norm_component(difference(divergence_field(s.f, g2), div0).u2, Layout::half, g2, 0);
      const auto jump = jump_at_interface(s.f, g);
      double jd = 0.0;
      for (std::size_t k = 0; k < jump.size(); ++k) jd = std::max(jd, std::abs(jump[k] - jump0[k]));
      const double margin = omega_margin(e, sol.material(), g2);
      if (!(margin > 0.0)) throw FieldExitError("field left the region where the symbol is positive");
      out.series.rows.push_back({s.t, el2, e1, dd, jd, margin});
      out.sup_err_broken1 = std::max(out.sup_err_broken1, e1);
      out.min_margin = std::min(out.min_margin, margin);
      out.max_div_drift = std::max(out.max_div_drift, dd);
      out.max_jump_drift = std::max(out.max_jump_drift, jd);
      if (!snap_dir.empty()) {
        std::filesystem::create_directories(snap_dir);
        write_snapshot(e, s.t, snap_dir / ("eps_" + format_number(eps) + "_t_" + format_number(s.t) + ".bin"));
      }
    }
    if (i == steps) break;
    sol.step(s, dt, StepOptions{c.dt_cfl, false});
  }
  out.seconds = detail::seconds_since(t0);
  out.series.footer = {{"sup_err_broken1", out.sup_err_broken1}, {"steps", static_cast<double>(steps)},
                       {"seconds", out.seconds}};
  return out;
}

inline ExperimentResult run_evolve(const ExperimentConfig& c, const CorrectorSet& cs) {
  ExperimentResult r;
  r.experiment = "evolve";
  const double eps = c.evolve_eps.front();
  const EvolveSummary s =
      evolve_against_ansatz(c, cs, eps, c.write_snapshots ? std::filesystem::path(c.out) / "snapshots" : "");
  r.tables.push_back(s.series);
  r.checks.push_back(detail::check(0, "minimum Omega margin over the run", s.min_margin, "> 0", s.min_margin > 0.0));
  r.checks.push_back(detail::check(0, "sup broken H1 error / eps^1.3", s.sup_err_broken1 / std::pow(eps, 1.3),
                                   "<= 1 (declared rho)", s.sup_err_broken1 <= std::pow(eps, 1.3)));
  r.checks.push_back(detail::check(0, "drift of div D and [D1]", std::max(s.max_div_drift, s.max_jump_drift),
                                   "<= 1e-12", std::max(s.max_div_drift, s.max_jump_drift) <= 1e-12));
  return r;
}

inline ExperimentResult run_convergence(const ExperimentConfig& c, const CorrectorSet& cs) {
  ExperimentResult r;
  r.experiment = "convergence";
  std::vector<double> eps, errs;
  Table t{"convergence", {"eps", "sup_err_broken1", "min_omega_margin", "max_div_drift", "max_jump_drift", "steps",
                          "seconds"},
          {},
          {}};
  for (double e : c.evolve_eps) {
    const EvolveSummary s =
        evolve_against_ansatz(c, cs, e, c.write_snapshots ? std::filesystem::path(c.out) / "snapshots" : "");
    r.tables.push_back(s.series);
    eps.push_back(e);
    errs.push_back(s.sup_err_broken1);
    t.rows.push_back({e, s.sup_err_broken1, s.min_margin, s.max_div_drift, s.max_jump_drift,
                      static_cast<double>(s.steps), s.seconds});
  }
  const ScalingResult sr = make_scaling("sup_err_broken1", detail::zip(eps, errs), 1.3, 0.0, SlopeRule::at_least);
  t.footer = {{"slope_sup_err_broken1", sr.fit.slope}, {"fit_residual", sr.fit.residual}};
  r.tables.insert(r.tables.begin(), t);
  r.checks.push_back(detail::check(9, "slope of sup_t ||U - U_ans||_(broken L2 + first derivatives)", sr.fit.slope,
                                   ">= 1.3", sr.pass));
  return r;
}

inline ExperimentResult run_compat_audit(const ExperimentConfig& c, const CorrectorSet& cs) {
  ExperimentResult r;
  r.experiment = "compat_audit";
  const int order = 3;
  Table t{"compat",
          {"case", "eps_or_h", "order", "jump2_sup", "jump2_l2", "jump3_sup", "jump3_l2"},
          {},
          {}};
  auto record = [&](double kind, double param, const std::vector<CompatibilityDefect>& ds) {
    for (const auto& d : ds) t.rows.push_back({kind, param, double(d.order), d.jump2_sup, d.jump2_l2, d.jump3_sup, d.jump3_l2});
  };

  const Grid1D g = cs.m.grid;
  const Grid2D gz = make_grid2d(g, 0.0, 2.0 * std::numbers::pi / c.k0, 16);
  double zero = 0.0;
  for (const auto& d : compatibility_check(Field2D(gz), cs.coef, gz, order))
    zero = std::max({zero, d.jump2_sup, d.jump3_sup});
  record(0, 0.0, compatibility_check(Field2D(gz), cs.coef, gz, order));
  r.checks.push_back(detail::check(11, "zero field defects", zero, "== 0", zero == 0.0));

  const PiecewiseProfile lin = with_constant_eps3(make_profile(c), 0.0);
  std::vector<std::vector<CompatibilityDefect>> carrier;
  for (double h : {c.h, 0.5 * c.h}) {
    const Grid1D gh = make_grid(c.d, h);
    const Mode m = corrector_mode(c.k0, c.nu0_guess, gh, lin);
    const Grid2D g2 = make_grid2d(gh, 0.0, 2.0 * std::numbers::pi / c.k0, 16);
    carrier.push_back(compatibility_check(carrier_field(m.w, c.k0, m.omega, 0.0, g2), sample_profile(lin, gh), g2, order));
    record(1, h, carrier.back());
  }
  // Defects must shrink at least like h^1.58 (factor 3 per halving) unless at rounding level.
  double worst_factor = 1e300;
  for (int j = 0; j < order; ++j)
    for (auto [a, b] : {std::pair{carrier[0][j].jump2_sup, carrier[1][j].jump2_sup},
                        std::pair{carrier[0][j].jump3_sup, carrier[1][j].jump3_sup}})
      if (a > 1e-13) worst_factor = std::min(worst_factor, a / std::max(b, 1e-300));
  r.checks.push_back(detail::check(11, "carrier defects: smallest reduction factor when h halves", worst_factor,
                                   ">= 3 (discretization level)", worst_factor >= 3.0));

  bool monotone = true;
  std::vector<CompatibilityDefect> prev;
  double first = 0.0;
  for (double e : c.eps_list) {
    if (e < 0.02) continue;  // the coarser sweep suffices for a monotonicity check
    const Grid2D g2 = packet_grid(g, e, cs.k0, c.envelope_length, c.residual_max_dx2);
    AnsatzConfig cfg{e, &cs, initial_envelope(c, g2, e), g2, terms_ext};
    const auto ds = compatibility_check(build_U_ext(cfg), cs.coef, g2, order);
    record(2, e, ds);
    if (prev.empty()) first = ds[1].jump3_l2;
    for (std::size_t j = 0; j < ds.size() && !prev.empty(); ++j)
      monotone = monotone && ds[j].jump2_l2 <= prev[j].jump2_l2 && ds[j].jump3_l2 <= prev[j].jump3_l2;
    prev = ds;
  }
  r.checks.push_back(detail::check(11, "U_ext(0) defects non-increasing as eps decreases (order-1 jump3 at largest eps)",
                                   first, "monotone in eps", monotone));
  r.tables.push_back(t);
  return r;
}

// Dispatch by experiment name; correctors are built only when needed.
inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  const std::string& e = c.experiment;
  if (e == "dispersion") return run_dispersion(c);
  if (e == "nls_test" || e == "nls-test") return run_nls_test(c);
  if (e == "linear_maxwell") return run_linear_maxwell(c);
  const CorrectorSet cs = default_correctors(c);
  if (e == "correctors") return run_correctors(c, cs);
  if (e == "residual_scaling" || e == "residual-scaling") return run_residual_scaling(c, cs);
  if (e == "evolve") return run_evolve(c, cs);
  if (e == "convergence") return run_convergence(c, cs);
  if (e == "compat_audit" || e == "compat-audit") return run_compat_audit(c, cs);
  throw StructuralError("unknown experiment " + e);
}

}  // namespace kerrwave
