#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <vector>

#include "kerrwave/core/errors.hpp"

namespace kerrwave {

// FFTW plans are created with FFTW_ESTIMATE so repeated runs pick the same
// algorithm and produce identical output.
class ComplexSpectral {
 public:
  ComplexSpectral(int n, double length) : n_(n), length_(length) {
    if (n < 2) throw StructuralError("spectral grid needs n >= 2");
    a_ = fftw_alloc_complex(n);
    b_ = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(n, a_, b_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, b_, a_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ComplexSpectral(const ComplexSpectral&) = delete;
  ComplexSpectral& operator=(const ComplexSpectral&) = delete;
  ~ComplexSpectral() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(a_);
    fftw_free(b_);
  }

  int size() const { return n_; }
  double length() const { return length_; }
  double wavenumber(int j) const {
    const int m = j <= n_ / 2 ? j : j - n_;
    return 2.0 * std::numbers::pi * m / length_;
  }

  // Unnormalized forward transform.
  void forward(const std::complex<double>* in, std::complex<double>* out) {
    std::memcpy(a_, in, sizeof(fftw_complex) * n_);
    fftw_execute(fwd_);
    std::memcpy(reinterpret_cast<double*>(out), b_, sizeof(fftw_complex) * n_);
  }
  // Inverse transform including the 1/n factor.
  void backward(const std::complex<double>* in, std::complex<double>* out) {
    std::memcpy(b_, in, sizeof(fftw_complex) * n_);
    fftw_execute(bwd_);
    const double s = 1.0 / n_;
    for (int j = 0; j < n_; ++j) out[j] = std::complex<double>(a_[j][0] * s, a_[j][1] * s);
  }

  // Multiply by mult(xi) in Fourier space.
  template <typename F>
  void apply(const std::complex<double>* in, std::complex<double>* out, F&& mult) {
    std::memcpy(a_, in, sizeof(fftw_complex) * n_);
    fftw_execute(fwd_);
    const double s = 1.0 / n_;
    for (int j = 0; j < n_; ++j) {
      const std::complex<double> v(b_[j][0], b_[j][1]);
      const std::complex<double> w = v * mult(j, wavenumber(j)) * s;
      b_[j][0] = w.real();
      b_[j][1] = w.imag();
    }
    fftw_execute(bwd_);
    std::memcpy(reinterpret_cast<double*>(out), a_, sizeof(fftw_complex) * n_);
  }

  void derivative(const std::complex<double>* in, std::complex<double>* out, int order) {
    const int nyq = n_ / 2;
    apply(in, out, [order, nyq](int j, double xi) {
      if (order % 2 == 1 && j == nyq) return std::complex<double>(0.0);
      return std::pow(std::complex<double>(0.0, xi), order);
    });
  }

  std::vector<std::complex<double>> derivative(const std::vector<std::complex<double>>& in, int order) {
    std::vector<std::complex<double>> out(in.size());
    derivative(in.data(), out.data(), order);
    return out;
  }

 private:
  int n_;
  double length_;
  fftw_complex* a_;
  fftw_complex* b_;
  fftw_plan fwd_, bwd_;
};

class RealSpectral {
 public:
  RealSpectral(int n, double length) : n_(n), length_(length) {
    if (n < 2 || n % 2 != 0) throw StructuralError("real spectral grid needs even n");
    r_ = fftw_alloc_real(n);
    c_ = fftw_alloc_complex(n / 2 + 1);
    fwd_ = fftw_plan_dft_r2c_1d(n, r_, c_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(n, c_, r_, FFTW_ESTIMATE);
  }
  RealSpectral(const RealSpectral&) = delete;
  RealSpectral& operator=(const RealSpectral&) = delete;
  ~RealSpectral() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(r_);
    fftw_free(c_);
  }

  int size() const { return n_; }

  // out = d^order/dx^order of in (periodic, trigonometric interpolant).
  void derivative(const double* in, double* out, int order) {
    if (order == 0) {
      if (out != in) std::memcpy(out, in, sizeof(double) * n_);
      return;
    }
    std::memcpy(r_, in, sizeof(double) * n_);
    fftw_execute(fwd_);
    const double s = 1.0 / n_;
    const int nyq = n_ / 2;
    for (int j = 0; j <= nyq; ++j) {
      const double xi = 2.0 * std::numbers::pi * j / length_;
      // (i xi)^order = xi^order times i^order
      const double mag = (j == nyq && order % 2 == 1) ? 0.0 : std::pow(xi, order) * s;
      const double re = c_[j][0] * mag, im = c_[j][1] * mag;
      switch (order % 4) {
        case 0: c_[j][0] = re, c_[j][1] = im; break;
        case 1: c_[j][0] = -im, c_[j][1] = re; break;
        case 2: c_[j][0] = -re, c_[j][1] = -im; break;
        default: c_[j][0] = im, c_[j][1] = -re; break;
      }
    }
    fftw_execute(bwd_);
    std::memcpy(out, r_, sizeof(double) * n_);
  }

 private:
  int n_;
  double length_;
  double* r_;
  fftw_complex* c_;
  fftw_plan fwd_, bwd_;
};

}  // namespace kerrwave
