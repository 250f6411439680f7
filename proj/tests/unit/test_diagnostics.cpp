#include <gtest/gtest.h>

#include <cmath>

#include "stratwave/diagnostics.hpp"

using namespace stratwave;

namespace {

constexpr double g0 = 9.81;

WaveSolution wave(const StreamlineProfiles& prof, double Q, int n, double amp, int steps = 2) {
  const Grid G = make_grid(1.0, prof.p0(), n, n + 1);
  return continue_from_laminar(solve_laminar(prof, g0, Q, G.Np), G, amp, steps);
}

// eps2 constant written out term by term, independently of the
// library's composition.
double eps2_oracle(const FlowDiagnostics& D) {
  const double M = D.M, a = D.a0, A = D.A0;
  const double B = D.sup_abs_beta + D.g * D.eta_max * D.sup_abs_rho_p;
  double t = 0;
  t += 4 * M * std::pow(A, 2);
  t += 2 * std::pow(M, 2) * std::pow(A, 3);
  t += 3 * A * B;
  t += 2 * std::pow(M, 3) * std::pow(A, 3) / a;
  t += std::pow(M, 2) * std::pow(A, 3) / a;
  t += M * std::pow(A, 3) * B / std::pow(a, 3);
  return t;
}

}  // namespace

TEST(Diagnostics, StillWaterCollapse) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0});
  const auto s = wave(prof, 2 * g0 + 1, 16, 0.0);
  const auto D = compute_diagnostics(s);
  EXPECT_EQ(D.M, 0.0);
  EXPECT_NEAR(D.a0, 1.0, 1e-12);
  EXPECT_NEAR(D.A0, 1.0, 1e-12);
  EXPECT_NEAR(D.eta_max, 1.0, 1e-12);
  EXPECT_NEAR(D.eta_min, 1.0, 1e-12);
  EXPECT_EQ(D.eps1, 0.0);
  EXPECT_EQ(D.eps2, 0.0);
  EXPECT_LE(D.a0, D.A0);
}

TEST(Diagnostics, VorticalLaminarEps2) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {1.0});
  const auto s = wave(prof, 16.0, 16, 0.0);
  const auto D = compute_diagnostics(s);
  EXPECT_EQ(D.M, 0.0);
  EXPECT_EQ(D.sup_abs_beta, 1.0);
  EXPECT_DOUBLE_EQ(D.eps2, 3 * D.A0);
  EXPECT_DOUBLE_EQ(D.eps2, eps2_oracle(D));
  EXPECT_EQ(D.eps1, 0.0);
}

TEST(Diagnostics, WaveEpsRecomposition) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.1}, {0.05});
  const auto s = wave(prof, 20.0, 16, 1e-2);
  const auto D = compute_diagnostics(s);
  EXPECT_GT(D.M, 0.0);
  EXPECT_NEAR(D.eps2, eps2_oracle(D), 1e-13 * eps2_oracle(D));
  EXPECT_DOUBLE_EQ(D.eps1, 3 * g0 * D.eta_max * 0.1);
  EXPECT_LT(D.eta_min, D.eta_max);
  EXPECT_GT(D.a0, 0.0);
  EXPECT_LE(D.a0, D.A0);
  double mean = 0;
  for (double e : s.eta()) mean += e;
  EXPECT_LT(std::abs(mean) / s.grid().Nq, 1e-12);
}

TEST(Diagnostics, MShrinksWithAmplitude) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0});
  const auto big = compute_diagnostics(wave(prof, 2 * g0 + 1, 16, 1e-3));
  const auto small = compute_diagnostics(wave(prof, 2 * g0 + 1, 16, 5e-4));
  EXPECT_GT(big.M, 0.0);
  EXPECT_LT(small.M, big.M);
  EXPECT_NEAR(small.M / big.M, 0.5, 0.01);
}

TEST(Reconstruction, StillWaterInFixedFrame) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0});
  const auto s = wave(prof, 2 * g0 + 1, 16, 0.0);
  const auto E = reconstruct_eulerian(s, 1.0);
  EXPECT_LT(E.u.sup_abs(), 1e-12);
  EXPECT_EQ(E.v.sup_abs(), 0.0);
  for (int j = 0; j < s.grid().Np; ++j) EXPECT_EQ(E.psi(3, j), -s.grid().p(j));
}

TEST(Reconstruction, RelativeVelocityNegativeEverywhere) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.1}, {0.05});
  const auto s = wave(prof, 20.0, 16, 1e-2);
  const double c = default_wave_speed(s);
  const auto E = reconstruct_eulerian(s, c);
  for (std::size_t k = 0; k < E.u.values().size(); ++k) {
    EXPECT_LT(E.u.values()[k] - c, 0.0);
    EXPECT_GE(E.u.values()[k], 1.0 - 1e-12);
  }
}

TEST(Reconstruction, FluxRoundTrip) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.1}, {0.05});
  for (int n : {16, 24, 32}) {
    const auto s = wave(prof, 20.0, n, 1e-2);
    const auto E = reconstruct_eulerian(s, 2.0 + default_wave_speed(s));
    const Grid& G = s.grid();
    const double tol = 5 * (G.dq * G.dq + G.dp * G.dp) * std::abs(G.p0);
    for (double p0 : flux_from_eulerian(E)) EXPECT_NEAR(p0, G.p0, tol) << n;
  }
}

TEST(EulerianM, LaminarIsZero) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.1}, {0.2});
  const auto s = wave(prof, 20.0, 16, 0.0);
  const auto E = reconstruct_eulerian(s, default_wave_speed(s));
  EXPECT_EQ(compute_M_eulerian(E).M, 0.0);
}

TEST(EulerianM, AgreesWithHeightFormulation) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.1}, {0.05});
  double prev = 0;
  for (int n : {16, 32}) {
    const auto s = wave(prof, 20.0, n, 1e-2);
    const auto D = compute_diagnostics(s);
    const auto E = reconstruct_eulerian(s, default_wave_speed(s));
    const auto m = compute_M_eulerian(E);
    EXPECT_NEAR(m.slope, D.M_hq, 1e-12);
    EXPECT_NEAR(m.vertical, D.M_hqp, 1e-10);
    const double err = std::abs(m.M - D.M);
    EXPECT_LT(err, 0.1 * D.M);
    if (prev > 0) EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(EulerianM, SlopeComponentIsHomogeneousInV) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0});
  const auto s = wave(prof, 2 * g0 + 1, 16, 1e-3);
  const auto E = reconstruct_eulerian(s, default_wave_speed(s));
  const auto m1 = compute_M_eulerian(E.u, E.v, E.rho, E.y, E.c);
  const auto m2 = compute_M_eulerian(E.u, 2.0 * E.v, E.rho, E.y, E.c);
  EXPECT_DOUBLE_EQ(m2.slope, 2 * m1.slope);
}

TEST(EulerianM, StagnationRejected) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0});
  const auto s = wave(prof, 2 * g0 + 1, 16, 0.0);
  const auto E = reconstruct_eulerian(s, 1.0);
  EXPECT_THROW(compute_M_eulerian(E.u, E.v, E.rho, E.y, -5.0), StagnationError);
}
