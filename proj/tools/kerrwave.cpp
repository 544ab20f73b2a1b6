#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "kerrwave/harness/experiments.hpp"

using namespace kerrwave;

namespace {

struct Common {
  std::string config;
  std::string profile;
  std::string minus_csv, plus_csv;
  double k0 = 0.0;
  std::vector<double> eps;
  std::string out;
  bool snapshots = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key = value configuration file");
  sub->add_option("--profile", c.profile, "decay_profile or tabulated");
  sub->add_option("--profile-minus", c.minus_csv, "x1,eps1 table for the x1 < 0 side");
  sub->add_option("--profile-plus", c.plus_csv, "x1,eps1 table for the x1 > 0 side");
  sub->add_option("--k0", c.k0, "carrier wavenumber");
  sub->add_option("--eps", c.eps, "eps values, strictly decreasing")->delimiter(',');
  sub->add_option("--out", c.out, "output directory");
  sub->add_flag("--snapshots", c.snapshots, "write binary field snapshots");
}

ExperimentConfig resolve(const std::string& experiment, const Common& c) {
  ExperimentConfig cfg;
  if (!c.config.empty()) cfg = experiment_config(ConfigFile::load(c.config));
  cfg.experiment = experiment;
  if (!c.profile.empty()) cfg.profile = c.profile;
  if (!c.minus_csv.empty()) cfg.eps1_minus_csv = c.minus_csv;
  if (!c.plus_csv.empty()) cfg.eps1_plus_csv = c.plus_csv;
  if (c.k0 > 0.0) cfg.k0 = c.k0;
  if (!c.eps.empty()) cfg.eps_list = cfg.evolve_eps = c.eps;
  if (!c.out.empty()) cfg.out = c.out;
  if (c.snapshots) cfg.write_snapshots = true;
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interface wave packets in Kerr media: eigenmodes, correctors, envelope and Maxwell runs"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> subs{
      {"dispersion", "eigenvalues, 3 k0 non-resonance and domain convergence"},
      {"correctors", "corrector systems and solvability"},
      {"nls-test", "split-step envelope solver against exact solutions"},
      {"residual-scaling", "residual of the ansatz at t = 0 over the eps sweep"},
      {"linear-maxwell", "linear Maxwell solver against the exact carrier"},
      {"evolve", "one Maxwell run against the ansatz (first eps)"},
      {"convergence", "Maxwell runs over the eps sweep"},
      {"compat-audit", "compatibility defects of initial data"}};
  Common common;
  for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help), common);
  CLI11_PARSE(app, argc, argv);

  try {
    std::string name = app.get_subcommands().front()->get_name();
    for (auto& ch : name)
      if (ch == '-') ch = '_';
    const ExperimentConfig cfg = resolve(name, common);
    const ExperimentResult r = run_experiment(cfg);
    emit_report(r, cfg.out);
    for (const auto& c : r.checks) std::cout << format_check(c) << "\n";
    std::cout << "results in " << cfg.out << "\n";
    return r.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
