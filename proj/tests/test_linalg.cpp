#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "kerrwave/linalg/banded.hpp"

using namespace kerrwave;
using cd = std::complex<double>;

namespace {

BandMatrix<cd> random_band(int n, int kl, int ku, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandMatrix<cd> a(n, kl, ku);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) a.set(i, j, cd(u(rng), u(rng)));
  return a;
}

Eigen::MatrixXcd dense(const BandMatrix<cd>& a) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(a.size(), a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j)
      if (a.in_band(i, j)) m(i, j) = a.get(i, j);
  return m;
}

}  // namespace

TEST(BandLU, MatchesDenseSolveWithPivoting) {
  std::mt19937 rng(7);
  const int n = 40;
  const BandMatrix<cd> a = random_band(n, 3, 2, rng);
  std::vector<cd> b(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& x : b) x = cd(u(rng), u(rng));
  const std::vector<cd> x = BandLU<cd>(a).solve(b);
  const Eigen::VectorXcd ref = dense(a).fullPivLu().solve(Eigen::Map<const Eigen::VectorXcd>(b.data(), n));
  for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs(x[i] - ref(i)), 0.0, 1e-10);
}

TEST(BandLU, MultiplyInvertsSolve) {
  std::mt19937 rng(11);
  const int n = 25;
  const BandMatrix<cd> a = random_band(n, 2, 4, rng);
  std::vector<cd> x(n);
  for (int i = 0; i < n; ++i) x[i] = cd(i, 1.0 - i);
  const std::vector<cd> back = BandLU<cd>(a).solve(a.multiply(x));
  for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs(back[i] - x[i]), 0.0, 1e-9);
}

TEST(BandMatrix, OutOfBandWriteIsStructuralError) {
  BandMatrix<cd> a(5, 1, 1);
  EXPECT_THROW(a.set(0, 3, 1.0), StructuralError);
}

TEST(LowRank, WoodburyMatchesDenseUpdatedSystem) {
  std::mt19937 rng(3);
  const int n = 30;
  const BandMatrix<cd> a = random_band(n, 2, 2, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<cd>> uu(2, std::vector<cd>(n)), vv(2, std::vector<cd>(n));
  for (auto* m : {&uu, &vv})
    for (auto& col : *m)
      for (auto& x : col) x = cd(u(rng), u(rng));
  Eigen::MatrixXcd m = dense(a);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) += uu[c][i] * vv[c][j];
  std::vector<cd> b(n, cd(1.0, -0.5));
  const LowRankUpdatedSolver<cd> s(BandLU<cd>(a), uu, vv);
  const std::vector<cd> x = s.solve(b);
  const Eigen::VectorXcd ref = m.fullPivLu().solve(Eigen::Map<const Eigen::VectorXcd>(b.data(), n));
  for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs(x[i] - ref(i)), 0.0, 1e-9);
}
