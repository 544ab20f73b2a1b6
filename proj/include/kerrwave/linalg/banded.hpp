#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "kerrwave/core/errors.hpp"

namespace kerrwave {

// Square band matrix with kl sub- and ku super-diagonals. Row i keeps the
// columns i-kl .. i+ku+kl; the extra kl slots take the fill-in of pivoting.
template <typename Scalar>
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), w_(2 * kl + ku + 1), a_(static_cast<std::size_t>(n) * w_) {}

  int size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  bool in_band(int i, int j) const { return j >= i - kl_ && j <= i + ku_ && j >= 0 && j < n_; }

  Scalar get(int i, int j) const {
    if (j < i - kl_ || j > i + ku_ + kl_ || j < 0 || j >= n_) return Scalar{};
    return a_[slot(i, j)];
  }
  void set(int i, int j, Scalar v) { a_[checked(i, j)] = v; }
  void add(int i, int j, Scalar v) { a_[checked(i, j)] += v; }

  std::vector<Scalar> multiply(const std::vector<Scalar>& x) const {
    std::vector<Scalar> y(n_, Scalar{});
    for (int i = 0; i < n_; ++i) {
      Scalar s{};
      const int lo = std::max(0, i - kl_), hi = std::min(n_ - 1, i + ku_);
      for (int j = lo; j <= hi; ++j) s += a_[slot(i, j)] * x[j];
      y[i] = s;
    }
    return y;
  }

  Scalar& raw(int i, int j) { return a_[slot(i, j)]; }
  const Scalar& raw(int i, int j) const { return a_[slot(i, j)]; }

 private:
  std::size_t slot(int i, int j) const { return static_cast<std::size_t>(i) * w_ + (j - i + kl_); }
  std::size_t checked(int i, int j) const {
    if (!in_band(i, j)) throw StructuralError("band matrix entry outside the band");
    return slot(i, j);
  }

  int n_ = 0, kl_ = 0, ku_ = 0, w_ = 1;
  std::vector<Scalar> a_;
};

// LU factorization with partial pivoting inside the band.
template <typename Scalar>
class BandLU {
 public:
  explicit BandLU(BandMatrix<Scalar> a) : lu_(std::move(a)), piv_(lu_.size()) {
    const int n = lu_.size(), kl = lu_.kl(), ku = lu_.ku();
    double pmax = 0.0, pmin = 1e300;
    for (int k = 0; k < n; ++k) {
      const int last = std::min(n - 1, k + kl);
      int p = k;
      double best = std::abs(lu_.raw(k, k));
      for (int r = k + 1; r <= last; ++r)
        if (std::abs(lu_.raw(r, k)) > best) best = std::abs(lu_.raw(r, k)), p = r;
      piv_[k] = p;
      if (best == 0.0) throw DivisionError("band matrix is singular");
      const int cend = std::min(n - 1, k + kl + ku);
      if (p != k)
        for (int c = k; c <= cend; ++c) std::swap(lu_.raw(k, c), lu_.raw(p, c));
      const Scalar pivot = lu_.raw(k, k);
      pmax = std::max(pmax, best);
      pmin = std::min(pmin, best);
      for (int r = k + 1; r <= last; ++r) {
        const Scalar l = lu_.raw(r, k) / pivot;
        lu_.raw(r, k) = l;
        if (l == Scalar{}) continue;
        for (int c = k + 1; c <= cend; ++c) lu_.raw(r, c) -= l * lu_.raw(k, c);
      }
    }
    pivot_ratio_ = pmin / pmax;
  }

  int size() const { return lu_.size(); }
  // Smallest over largest pivot magnitude; a cheap singularity indicator.
  double pivot_ratio() const { return pivot_ratio_; }

  void solve_in_place(std::vector<Scalar>& b) const {
    const int n = lu_.size(), kl = lu_.kl(), ku = lu_.ku();
    for (int k = 0; k < n; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
      const int last = std::min(n - 1, k + kl);
      for (int r = k + 1; r <= last; ++r) b[r] -= lu_.raw(r, k) * b[k];
    }
    for (int k = n - 1; k >= 0; --k) {
      Scalar s = b[k];
      const int cend = std::min(n - 1, k + kl + ku);
      for (int c = k + 1; c <= cend; ++c) s -= lu_.raw(k, c) * b[c];
      b[k] = s / lu_.raw(k, k);
    }
  }

  std::vector<Scalar> solve(std::vector<Scalar> b) const {
    solve_in_place(b);
    return b;
  }

 private:
  BandMatrix<Scalar> lu_;
  std::vector<int> piv_;
  double pivot_ratio_ = 1.0;
};

// Solver for (M + U V^T) x = b with M banded and U, V holding a few columns
// (Sherman-Morrison-Woodbury). V is used without conjugation.
template <typename Scalar>
class LowRankUpdatedSolver {
 public:
  LowRankUpdatedSolver(BandLU<Scalar> lu, std::vector<std::vector<Scalar>> u,
                       std::vector<std::vector<Scalar>> v)
      : lu_(std::move(lu)), v_(std::move(v)) {
    const int k = static_cast<int>(u.size());
    if (static_cast<int>(v_.size()) != k) throw StructuralError("low-rank factors disagree");
    for (auto& col : u) minv_u_.push_back(lu_.solve(col));
    cap_.assign(static_cast<std::size_t>(k) * k, Scalar{});
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) cap_[i * k + j] = (i == j ? Scalar(1) : Scalar{}) + dot(v_[i], minv_u_[j]);
    k_ = k;
    double cmax = 0.0;
    for (const auto& c : cap_) cmax = std::max(cmax, std::abs(c));
    if (k == 1 && std::abs(cap_[0]) < 1e-14 * std::max(1.0, cmax))
      throw DivisionError("rank-one update makes the matrix singular");
  }

  std::vector<Scalar> solve(const std::vector<Scalar>& b) const {
    std::vector<Scalar> y = lu_.solve(b);
    std::vector<Scalar> rhs(k_);
    for (int i = 0; i < k_; ++i) rhs[i] = dot(v_[i], y);
    const std::vector<Scalar> z = small_solve(cap_, rhs, k_);
    for (int j = 0; j < k_; ++j)
      for (std::size_t r = 0; r < y.size(); ++r) y[r] -= minv_u_[j][r] * z[j];
    return y;
  }

  const std::vector<Scalar>& capacitance() const { return cap_; }
  const BandLU<Scalar>& band_lu() const { return lu_; }

 private:
  static Scalar dot(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    Scalar s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  static std::vector<Scalar> small_solve(std::vector<Scalar> a, std::vector<Scalar> b, int k) {
    for (int c = 0; c < k; ++c) {
      int p = c;
      for (int r = c + 1; r < k; ++r)
        if (std::abs(a[r * k + c]) > std::abs(a[p * k + c])) p = r;
      if (a[p * k + c] == Scalar{}) throw DivisionError("singular capacitance matrix");
      if (p != c) {
        for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[p * k + j]);
        std::swap(b[c], b[p]);
      }
      for (int r = c + 1; r < k; ++r) {
        const Scalar l = a[r * k + c] / a[c * k + c];
        for (int j = c; j < k; ++j) a[r * k + j] -= l * a[c * k + j];
        b[r] -= l * b[c];
      }
    }
    for (int c = k - 1; c >= 0; --c) {
      Scalar s = b[c];
      for (int j = c + 1; j < k; ++j) s -= a[c * k + j] * b[j];
      b[c] = s / a[c * k + c];
    }
    return b;
  }

  BandLU<Scalar> lu_;
  std::vector<std::vector<Scalar>> v_;
  std::vector<std::vector<Scalar>> minv_u_;
  std::vector<Scalar> cap_;
  int k_ = 0;
};

}  // namespace kerrwave
