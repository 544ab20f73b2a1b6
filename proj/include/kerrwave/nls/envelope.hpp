#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/grid.hpp"
#include "kerrwave/linalg/fft.hpp"

namespace kerrwave {

// Envelope A on the periodic grid X_j = x0 + j L / n at slow time T.
struct EnvelopeField {
  std::vector<std::complex<double>> values;
  double L = 0.0;
  double x0 = 0.0;
  double T = 0.0;

  int n() const { return static_cast<int>(values.size()); }
  double dX() const { return L / n(); }
  double X(int j) const { return x0 + j * dX(); }
};

template <typename F>
EnvelopeField sample_envelope(F&& f, double x0, double L, int n, double T = 0.0) {
  if (!is_power_of_two(n)) throw StructuralError("envelope sample count must be a power of two");
  if (!(L > 0.0)) throw StructuralError("envelope domain length must be positive");
  EnvelopeField a;
  a.L = L;
  a.x0 = x0;
  a.T = T;
  a.values.resize(n);
  for (int j = 0; j < n; ++j) a.values[j] = f(x0 + j * L / n);
  return a;
}

inline bool finite(const EnvelopeField& a) {
  for (const auto& v : a.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

// |A| on the outer sixteenth at each end of the periodic box, relative to max |A|.
inline double seam_ratio(const EnvelopeField& a) {
  double peak = 0.0, edge = 0.0;
  const int n = a.n(), w = std::max(1, n / 16);
  for (int j = 0; j < n; ++j) {
    const double v = std::abs(a.values[j]);
    peak = std::max(peak, v);
    if (j < w || j >= n - w) edge = std::max(edge, v);
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

// The envelope must have decayed by six e-foldings before the seam.
inline void check_seam(const EnvelopeField& a, double max_ratio = std::exp(-6.0)) {
  if (seam_ratio(a) > max_ratio) throw SeamError("envelope reaches the periodic seam");
}

inline double mass(const EnvelopeField& a) {
  double s = 0.0;
  for (const auto& v : a.values) s += std::norm(v);
  return s * a.dX();
}

// Spectral X-derivative of any order (the public operation allows 1..3).
inline EnvelopeField spectral_derivative(const EnvelopeField& a, int order) {
  EnvelopeField out = a;
  if (order == 0) return out;
  ComplexSpectral fft(a.n(), a.L);
  fft.derivative(a.values.data(), out.values.data(), order);
  return out;
}

inline std::vector<EnvelopeField> derivatives(const EnvelopeField& a, int order) {
  if (order < 1 || order > 3) throw UnsupportedOrderError("envelope derivatives are available for orders 1..3");
  std::vector<EnvelopeField> out;
  for (int k = 1; k <= order; ++k) out.push_back(spectral_derivative(a, k));
  return out;
}

// The amplitude equation is
//   i dA/dT = -1/2 nu2 A'' + kappa |A|^2 A,
// so a Fourier mode e^{i xi X} evolves as exp(-i nu2 xi^2 T / 2), and the
// conserved Hamiltonian is H = int 1/2 nu2 |A'|^2 + 1/2 kappa |A|^4.
inline EnvelopeField nls_rhs(const EnvelopeField& a, double nu2, double kappa) {
  const EnvelopeField a2 = spectral_derivative(a, 2);
  const std::complex<double> I(0.0, 1.0);
  EnvelopeField out = a;
  for (int j = 0; j < a.n(); ++j)
    out.values[j] = I * 0.5 * nu2 * a2.values[j] - I * kappa * std::norm(a.values[j]) * a.values[j];
  return out;
}

// d_T d_X^order A, by differentiating the right-hand side of the equation.
inline EnvelopeField time_derivative(const EnvelopeField& a, double nu2, double kappa, int order = 0) {
  if (order < 0 || order > 3) throw UnsupportedOrderError("mixed derivatives are available for X-orders 0..3");
  return spectral_derivative(nls_rhs(a, nu2, kappa), order);
}

struct Invariants {
  double mass = 0.0;
  double hamiltonian = 0.0;
};

inline Invariants invariants(const EnvelopeField& a, double nu2, double kappa) {
  const EnvelopeField d = spectral_derivative(a, 1);
  double h = 0.0;
  for (int j = 0; j < a.n(); ++j)
    h += 0.5 * nu2 * std::norm(d.values[j]) + 0.5 * kappa * std::norm(a.values[j]) * std::norm(a.values[j]);
  return {mass(a), h * a.dX()};
}

struct EvolveOptions {
  double stability_bound = std::numbers::pi;  // max phase increment per step
  bool check_seam = true;
};

// Strang splitting: half nonlinear rotation, exact linear step in Fourier
// space, half nonlinear rotation. Both sub-steps are exact flows, so mass is
// conserved up to rounding.
inline EnvelopeField evolve(const EnvelopeField& a0, double nu2, double kappa, double dT, int n_steps,
                            const EvolveOptions& opt = {}) {
  if (n_steps < 0) throw StructuralError("negative step count");
  if (!is_power_of_two(a0.n())) throw StructuralError("envelope sample count must be a power of two");
  const double kmax = std::numbers::pi * a0.n() / a0.L;
  double amax = 0.0;
  for (const auto& v : a0.values) amax = std::max(amax, std::norm(v));
  const double phase = std::abs(dT) * std::max(0.5 * std::abs(nu2) * kmax * kmax, std::abs(kappa) * amax);
  if (phase > opt.stability_bound) throw StabilityError("step too large for the envelope resolution");
  if (opt.check_seam) check_seam(a0);

  EnvelopeField a = a0;
  ComplexSpectral fft(a.n(), a.L);
  const std::complex<double> I(0.0, 1.0);
  std::vector<std::complex<double>> lin(a.n());
  for (int j = 0; j < a.n(); ++j) {
    const double xi = fft.wavenumber(j);
    lin[j] = std::exp(-I * 0.5 * nu2 * xi * xi * dT);
  }
  auto half_nonlinear = [&]() {
    for (auto& v : a.values) v *= std::exp(-I * kappa * std::norm(v) * 0.5 * dT);
  };
  for (int s = 0; s < n_steps; ++s) {
    half_nonlinear();
    fft.apply(a.values.data(), a.values.data(), [&](int j, double) { return lin[j]; });
    half_nonlinear();
    if (!finite(a)) throw StabilityError("non-finite envelope values");
  }
  a.T = a0.T + n_steps * dT;
  return a;
}

// Exact solution of the linear equation (kappa = 0).
inline EnvelopeField linear_propagator(const EnvelopeField& a0, double nu2, double T) {
  EnvelopeField a = a0;
  ComplexSpectral fft(a.n(), a.L);
  const std::complex<double> I(0.0, 1.0);
  fft.apply(a0.values.data(), a.values.data(), [&](int, double xi) { return std::exp(-I * 0.5 * nu2 * xi * xi * T); });
  a.T = a0.T + T;
  return a;
}

// Bright soliton for nu2 kappa < 0:
//   A = eta sech(b (X - c)) exp(i nu2 b^2 T / 2),  b = eta sqrt(|kappa / nu2|).
inline std::complex<double> soliton(double X, double T, double eta, double nu2, double kappa, double centre = 0.0) {
  if (!(nu2 * kappa < 0.0)) throw StructuralError("bright soliton needs nu2 and kappa of opposite sign");
  const double b = eta * std::sqrt(std::abs(kappa / nu2));
  return eta / std::cosh(b * (X - centre)) * std::exp(std::complex<double>(0.0, 0.5 * nu2 * b * b * T));
}

// A(X_j + shift) by band-limited (Fourier) interpolation, resampled onto
// n_out points over the same period. The Nyquist mode has no unique shifted
// continuation and is dropped; it is negligible for resolved envelopes.
inline std::vector<std::complex<double>> shifted_samples(const EnvelopeField& a, double shift, int n_out) {
  const int n = a.n();
  if (!is_power_of_two(n_out)) throw StructuralError("output sample count must be a power of two");
  ComplexSpectral in(n, a.L);
  std::vector<std::complex<double>> hat(n);
  in.forward(a.values.data(), hat.data());
  std::vector<std::complex<double>> big(n_out, 0.0);
  const int keep = std::min(n, n_out) / 2;
  const std::complex<double> I(0.0, 1.0);
  for (int m = -keep + 1; m < keep; ++m) {
    const double xi = 2.0 * std::numbers::pi * m / a.L;
    big[(m + n_out) % n_out] = hat[(m + n) % n] * std::exp(I * xi * shift) * (static_cast<double>(n_out) / n);
  }
  ComplexSpectral out(n_out, a.L);
  std::vector<std::complex<double>> res(n_out);
  out.backward(big.data(), res.data());
  return res;
}

}  // namespace kerrwave
