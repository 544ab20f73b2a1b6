#include <gtest/gtest.h>

#include <cmath>

#include "kerrwave/nls/envelope.hpp"

using namespace kerrwave;
using cplx = std::complex<double>;

namespace {

constexpr double nu2 = -0.3, kappa = 0.8, L = 40.0;

EnvelopeField gaussian(int n = 256) {
  return sample_envelope([](double X) { return cplx(std::exp(-X * X / 4.0), 0.0); }, -0.5 * L, L, n);
}

}  // namespace

TEST(Nls, MassIsConservedBySplitting) {
  const EnvelopeField a = gaussian();
  const EnvelopeField b = evolve(a, nu2, kappa, 0.01, 200);
  EXPECT_NEAR(mass(b), mass(a), 1e-12 * mass(a));
  EXPECT_NEAR(b.T, 2.0, 1e-12);
}

TEST(Nls, LinearRunMatchesPropagator) {
  const EnvelopeField a = gaussian();
  const EnvelopeField b = evolve(a, nu2, 0.0, 0.05, 20);
  const EnvelopeField c = linear_propagator(a, nu2, 1.0);
  for (int j = 0; j < a.n(); ++j) EXPECT_NEAR(std::abs(b.values[j] - c.values[j]), 0.0, 1e-12);
}

TEST(Nls, FreeSchrodingerGaussianHasClosedForm) {
  // exp(-X^2/4) under i A_T + (nu2/2) A_XX = 0 is s^(-1/2) exp(-X^2 / (4 s)), s = 1 + i nu2 T / 2.
  const EnvelopeField a = gaussian(512);
  const double T = 1.5;
  const EnvelopeField b = linear_propagator(a, nu2, T);
  const cplx s(1.0, 0.5 * nu2 * T);
  for (int j = 0; j < a.n(); j += 17) {
    const double X = a.x0 + j * a.dX();
    EXPECT_NEAR(std::abs(b.values[j] - std::exp(-X * X / (4.0 * s)) / std::sqrt(s)), 0.0, 1e-10);
  }
}

TEST(Nls, SolitonModulusIsStationary) {
  auto sol = [](double T) {
    return sample_envelope([T](double X) { return soliton(X, T, 1.0, nu2, kappa); }, -0.5 * L, L, 256, T);
  };
  const EnvelopeField b = evolve(sol(0.0), nu2, kappa, 0.001, 500);
  const EnvelopeField ex = sol(b.T);
  for (int j = 0; j < b.n(); ++j) EXPECT_NEAR(std::abs(b.values[j]), std::abs(ex.values[j]), 1e-6);
}

TEST(Nls, HamiltonianIsNearlyConserved) {
  const EnvelopeField a = gaussian();
  const Invariants i0 = invariants(a, nu2, kappa);
  const Invariants i1 = invariants(evolve(a, nu2, kappa, 0.001, 1000), nu2, kappa);
  EXPECT_NEAR(i1.hamiltonian, i0.hamiltonian, 1e-5 * std::abs(i0.hamiltonian));
}

TEST(Nls, PacketAtTheSeamIsRejected) {
  const EnvelopeField a = sample_envelope([](double X) { return cplx(std::exp(-(X - 19.0) * (X - 19.0))); }, -0.5 * L, L, 256);
  EXPECT_THROW(evolve(a, nu2, kappa, 0.01, 1), SeamError);
}

TEST(Nls, SampleCountMustBePowerOfTwo) {
  EXPECT_THROW(sample_envelope([](double) { return cplx(1.0); }, 0.0, 1.0, 100), StructuralError);
}
