#pragma once

#include <stdexcept>
#include <string>

namespace kerrwave {

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual(best_residual) {}
  double best_residual;
};
struct SolvabilityError : std::runtime_error {
  SolvabilityError(const std::string& what, double defect)
      : std::runtime_error(what), defect(defect) {}
  double defect;
};
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SeamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The field left the region where the constitutive law is invertible.
struct FieldExitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kerrwave
