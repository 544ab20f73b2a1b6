#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "kerrwave/core/errors.hpp"

namespace kerrwave {

using RealVec = std::vector<double>;
using LinearMap = std::function<RealVec(const RealVec&)>;

// A w = lambda B w, with a factory for solvers of (A - s B) y = b.
struct GeneralizedProblem {
  int n = 0;
  LinearMap apply_a;
  LinearMap apply_b;
  std::function<LinearMap(double)> shifted_solver;
};

struct EigenPair {
  double lambda = 0.0;
  double omega = 0.0;
  RealVec vec;
  double residual = 0.0;  // ||A w - lambda B w|| / ||w||
};

struct SolveOptions {
  int n_eigs = 10;
  double tol = 1e-10;
  int krylov_dim = 0;  // 0: chosen from n_eigs
  int max_polish = 8;
};

namespace detail {

inline double dot(const RealVec& a, const RealVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(const RealVec& a) { return std::sqrt(dot(a, a)); }

inline double pair_residual(const GeneralizedProblem& p, const RealVec& w, double lambda) {
  const RealVec aw = p.apply_a(w), bw = p.apply_b(w);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += (aw[i] - lambda * bw[i]) * (aw[i] - lambda * bw[i]);
  return std::sqrt(s) / norm2(w);
}

inline LinearMap factor_with_retry(const GeneralizedProblem& p, double shift) {
  try {
    return p.shifted_solver(shift);
  } catch (const DivisionError&) {
    const double perturbed = shift + 1e-8 * std::max(1.0, std::abs(shift));
    try {
      return p.shifted_solver(perturbed);
    } catch (const DivisionError&) {
      throw DivisionError("shifted operator singular at the requested shift");
    }
  }
}

}  // namespace detail

// Eigenpairs with lambda nearest to sigma. Arnoldi on (A - sigma B)^{-1} B is
// extended until the wanted Ritz values settle; each Ritz vector is then
// polished by inverse iteration shifted to its own Ritz value, which is what
// brings ||A w - lambda B w|| down to rounding level for stiff operators.
inline std::vector<EigenPair> solve_near_lambda(const GeneralizedProblem& p, double sigma,
                                                const SolveOptions& opt) {
  const int n = p.n;
  const int nev = std::min(opt.n_eigs, n);
  const int m_max = std::min(n, opt.krylov_dim > 0 ? opt.krylov_dim : std::max(8 * nev + 40, 200));
  const LinearMap inv = detail::factor_with_retry(p, sigma);
  auto op = [&](const RealVec& x) { return inv(p.apply_b(x)); };

  struct Ritz {
    double lambda;
    RealVec x;
    double res;
  };

  std::vector<RealVec> v;
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m_max + 1, m_max);
  RealVec start(n);
  // Deterministic start vector.
  for (int i = 0; i < n; ++i) start[i] = 1.0 + 0.5 * std::sin(0.37 * i + 0.1) + 0.25 * std::cos(1.3 * i);
  {
    const double s = detail::norm2(start);
    for (auto& x : start) x /= s;
  }
  v.push_back(start);

  // Ritz pairs of the current Arnoldi factorization, largest |theta| first.
  auto ritz = [&](int steps, int count, bool with_vectors, std::vector<Ritz>& out, std::vector<double>& est) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(hess.topLeftCorner(steps, steps));
    const Eigen::VectorXcd theta = es.eigenvalues();
    const Eigen::MatrixXcd y = es.eigenvectors();
    std::vector<int> order(steps);
    for (int i = 0; i < steps; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });
    out.clear();
    est.clear();
    for (int idx : order) {
      if (static_cast<int>(out.size()) >= count) break;
      const std::complex<double> th = theta[idx];
      if (std::abs(th) == 0.0 || std::abs(th.imag()) > 1e-8 * std::abs(th)) continue;
      const double ynorm = y.col(idx).norm();
      est.push_back(std::abs(hess(steps, steps - 1) * y(steps - 1, idx)) / (ynorm * std::abs(th)));
      RealVec x;
      if (with_vectors) {
        x.assign(n, 0.0);
        for (int i = 0; i < steps; ++i) {
          const double c = y(i, idx).real();
          for (int r = 0; r < n; ++r) x[r] += c * v[i][r];
        }
        const double nx = detail::norm2(x);
        for (auto& e : x) e /= nx;
      }
      out.push_back({sigma + 1.0 / th.real(), std::move(x), 0.0});
    }
  };

  std::vector<Ritz> wanted;
  std::vector<double> est;
  int steps = 0;
  for (int j = 0; j < m_max; ++j) {
    RealVec w = op(v[j]);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) {
        const double c = detail::dot(v[i], w);
        hess(i, j) += c;
        for (int r = 0; r < n; ++r) w[r] -= c * v[i][r];
      }
    const double beta = detail::norm2(w);
    hess(j + 1, j) = beta;
    steps = j + 1;
    const bool breakdown = beta < 1e-14 * std::abs(hess(j, j)) + 1e-300;
    if (!breakdown) {
      for (auto& x : w) x /= beta;
      v.push_back(std::move(w));
    }
    const bool check = breakdown || steps == m_max || (steps >= 2 * nev + 10 && steps % 10 == 0);
    if (!check) continue;
    ritz(steps, nev, false, wanted, est);
    bool small = static_cast<int>(wanted.size()) >= std::min(nev, steps);
    for (double e : est) small = small && e < 1e-13;
    if (small || breakdown || steps == m_max) {
      ritz(steps, nev, true, wanted, est);
      for (auto& r : wanted) r.res = detail::pair_residual(p, r.x, r.lambda);
      break;
    }
  }

  std::vector<EigenPair> out;
  for (auto& w : wanted) {
    double lambda = w.lambda, res = w.res;
    RealVec x = std::move(w.x);
    for (int it = 0; it < opt.max_polish && res > opt.tol; ++it) {
      const LinearMap polish = detail::factor_with_retry(p, lambda);
      RealVec z = polish(p.apply_b(x));
      const double nz = detail::norm2(z);
      const double zx = detail::dot(z, x);
      if (nz == 0.0 || zx == 0.0) break;
      lambda += 1.0 / zx;
      for (int r = 0; r < n; ++r) x[r] = z[r] / nz;
      res = detail::pair_residual(p, x, lambda);
    }
    out.push_back(EigenPair{lambda, 0.0, std::move(x), res});
  }
  std::sort(out.begin(), out.end(),
            [&](const EigenPair& a, const EigenPair& b) { return std::abs(a.lambda - sigma) < std::abs(b.lambda - sigma); });
  return out;
}

// Same in omega: shift at target^2, omega reported with the sign of the target.
inline std::vector<EigenPair> solve_near(const GeneralizedProblem& p, double target, const SolveOptions& opt) {
  auto pairs = solve_near_lambda(p, target * target, opt);
  std::vector<EigenPair> out;
  for (auto& e : pairs) {
    if (e.lambda <= 0.0) continue;
    if (e.residual > opt.tol)
      throw ConvergenceError("eigenpair did not reach the residual tolerance", e.residual);
    e.omega = (target < 0.0 ? -1.0 : 1.0) * std::sqrt(e.lambda);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [&](const EigenPair& a, const EigenPair& b) { return std::abs(a.omega - target) < std::abs(b.omega - target); });
  return out;
}

}  // namespace kerrwave
