#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "stratwave/laminar.hpp"

using namespace stratwave;

constexpr double g0 = 9.81;

TEST(Laminar, HomogeneousIrrotationalIsLinear) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0});
  const auto t0 = std::chrono::steady_clock::now();
  const auto lam = solve_laminar(prof, g0, 2 * g0 + 1, 64);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 1.0);
  double err = 0;
  for (std::size_t j = 0; j < lam.p.size(); ++j) err = std::max(err, std::abs(lam.H[j] - (lam.p[j] + 1)));
  EXPECT_LT(err, 1e-10);
  EXPECT_EQ(lam.H[0], 0.0);
  EXPECT_LT(std::abs(lam.top_residual()), 1e-10);
  EXPECT_NEAR(lam.d, 1.0, 1e-10);
}

TEST(Laminar, ConstantDensityGivesLinearProfileForOtherQ) {
  const auto prof = StreamlineProfiles::polynomial(-0.5, {1.3}, {0.0});
  const auto lam = solve_laminar(prof, g0, 12.0, 33);
  const double k = lam.bed_slope;
  for (std::size_t j = 0; j < lam.p.size(); ++j)
    EXPECT_NEAR(lam.H[j], k * (lam.p[j] + 0.5), 1e-10);
  for (double hp : lam.Hp) EXPECT_GT(hp, 0.0);
}

TEST(Laminar, VorticalSelfConvergence) {
  // rho = 1, beta = 1: H'' = -H'^3. Compare against 10x finer integration.
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {1.0});
  const double Q = 16.0;
  LaminarOptions coarse;
  coarse.substeps = 1;
  const auto a = solve_laminar(prof, g0, Q, 33, coarse);
  LaminarOptions fine;
  fine.substeps = 10;
  const auto b = solve_laminar(prof, g0, Q, 33, fine);
  double diff = 0;
  for (std::size_t j = 0; j < a.H.size(); ++j) diff = std::max(diff, std::abs(a.H[j] - b.H[j]));
  EXPECT_LT(diff, 1e-8);
  EXPECT_LT(std::abs(b.top_residual()), 1e-10);
  for (double hp : b.Hp) EXPECT_GT(hp, 0.0);
  // The ODE in closed form: H' = (s^-2 + 2 (p - p0))^-1/2 with s = H'(p0).
  const double s = b.bed_slope;
  for (std::size_t j = 0; j < b.H.size(); ++j)
    EXPECT_NEAR(b.Hp[j], 1.0 / std::sqrt(1.0 / (s * s) + 2 * (b.p[j] + 1.0)), 1e-9);
}

TEST(Laminar, FourthOrderRatio) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.5}, {0.5, 1.0});
  auto run = [&](int sub) {
    LaminarOptions o;
    o.substeps = sub;
    return solve_laminar(prof, g0, 30.0, 9, o);
  };
  const auto ref = run(256);
  const auto r1 = run(2), r2 = run(4);
  double e1 = 0, e2 = 0;
  for (std::size_t j = 0; j < ref.H.size(); ++j) {
    e1 = std::max(e1, std::abs(r1.H[j] - ref.H[j]));
    e2 = std::max(e2, std::abs(r2.H[j] - ref.H[j]));
  }
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Laminar, NoFlowForVeryNegativeQ) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0});
  try {
    solve_laminar(prof, g0, -1e6, 17);
    FAIL() << "expected NoLaminarFlow";
  } catch (const NoLaminarFlow& e) {
    EXPECT_FALSE(e.slopes.empty());
    EXPECT_EQ(e.slopes.size(), e.residuals.size());
  }
}

TEST(Laminar, DiscretePolishIsSecondOrderClose) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.2}, {0.3});
  double prev = 0;
  for (int Np : {21, 41, 81}) {
    const auto lam = solve_laminar(prof, g0, 25.0, Np);
    const Grid grid = make_grid(1.0, -1.0, 8, Np);
    const auto H = discrete_laminar(grid, prof, g0, 25.0, lam.H);
    EXPECT_EQ(H[0], 0.0);
    double diff = 0;
    for (int j = 0; j < Np; ++j) diff = std::max(diff, std::abs(H[j] - lam.H[j]));
    if (prev > 0) EXPECT_NEAR(prev / diff, 4.0, 0.5);
    prev = diff;
  }
}
