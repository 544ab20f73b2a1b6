// Runs every experiment at its default settings and prints one line per
// acceptance criterion. Exit status is zero only if all criteria pass.
#include <chrono>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "kerrwave/harness/experiments.hpp"

using namespace kerrwave;

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  const ExperimentConfig cfg;
  std::map<int, std::vector<Check>> by_criterion;
  std::map<int, std::string> errors;

  auto run = [&](const std::string& name, std::initializer_list<int> criteria, const auto& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const ExperimentResult r = fn();
      emit_report(r, out / name);
      for (const auto& c : r.checks) {
        std::cout << "  [" << name << "] " << format_check(c) << "\n";
        if (c.criterion > 0) by_criterion[c.criterion].push_back(c);
      }
    } catch (const std::exception& e) {
      for (int c : criteria) errors[c] = name + ": " + e.what();
    }
    std::cout << "  [" << name << "] " << detail::seconds_since(t0) << " s" << std::endl;
  };

  run("dispersion", {1, 2, 3}, [&] { return run_dispersion(cfg); });
  run("nls_test", {7}, [&] { return run_nls_test(cfg); });
  run("linear_maxwell", {8}, [&] { return run_linear_maxwell(cfg); });
  std::optional<CorrectorSet> cs;
  try {
    cs = default_correctors(cfg);
  } catch (const std::exception& e) {
    for (int c : {4, 5, 6, 9, 10, 11}) errors[c] = std::string("correctors: ") + e.what();
  }
  if (cs) {
    run("correctors", {4}, [&] { return run_correctors(cfg, *cs); });
    run("residual_scaling", {5, 6, 10}, [&] { return run_residual_scaling(cfg, *cs); });
    run("compat_audit", {11}, [&] { return run_compat_audit(cfg, *cs); });
    run("convergence", {9}, [&] { return run_convergence(cfg, *cs); });
  }

  std::cout << "\n";
  bool all = true;
  for (int k = 1; k <= 11; ++k) {
    bool pass = false;
    std::string detail;
    if (errors.count(k)) {
      detail = "error: " + errors[k];
    } else if (by_criterion.count(k)) {
      pass = true;
      for (const auto& c : by_criterion[k]) {
        pass = pass && c.pass;
        if (!detail.empty()) detail += "; ";
        detail += c.name + " = " + format_number(c.value) + " (" + c.tolerance + ")";
      }
    } else {
      detail = "no measurement";
    }
    all = all && pass;
    std::cout << "criterion " << k << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << "\n";
  }
  return all ? 0 : 1;
}
