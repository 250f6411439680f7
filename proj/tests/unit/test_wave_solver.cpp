#include <gtest/gtest.h>

#include <cmath>

#include "stratwave/wave_solver.hpp"

using namespace stratwave;

namespace {

constexpr double g0 = 9.81;

StreamlineProfiles still() { return StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0}); }

// Every returned solution must satisfy the WaveSolution invariants.
void expect_invariants(const WaveSolution& s, double tol = 1e-10) {
  const Grid& G = s.grid();
  for (int i = 0; i < G.Nq; ++i) EXPECT_EQ(s.h(i, 0), 0.0);
  const auto hp = derivative(s.h, Deriv::p);
  for (double v : hp.values()) EXPECT_GT(v, 0.0);
  const auto r = residual(s.h, s.Q, s.profiles, s.g);
  EXPECT_LE(r.interior.sup_abs(), tol);
  for (double v : r.top) EXPECT_LE(std::abs(v), tol);
  double mean = 0;
  for (double e : s.eta()) mean += e;
  EXPECT_LE(std::abs(mean / G.Nq), 1e-12);
}

ScalarField reflect0(const ScalarField& h) {
  ScalarField out(h.grid());
  for (int i = 0; i < h.grid().Nq; ++i)
    for (int j = 0; j < h.grid().Np; ++j) out(i, j) = h(-i, j);
  return out;
}

}  // namespace

TEST(Residual, LinearProfileIsExact) {
  const Grid G = make_grid(1.0, -1.0, 16, 17);
  const auto h = ScalarField::from_function(G, [](double, double p) { return p + 1.0; });
  const auto r = residual(h, 2 * g0 + 1, still(), g0);
  EXPECT_EQ(r.interior.sup_abs(), 0.0);
  for (double v : r.top) EXPECT_NEAR(v, 0.0, 1e-13);
  for (double v : r.bottom) EXPECT_EQ(v, 0.0);
}

TEST(Residual, EmbeddedLaminarIsSmall) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.1}, {0.2, 0.1});
  const Grid G = make_grid(1.0, -1.0, 16, 33);
  const auto lam = solve_laminar(prof, g0, 25.0, G.Np);
  // Raw integrator output on the grid: residual at truncation level.
  ScalarField raw(G);
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j) raw(i, j) = lam.H[j];
  EXPECT_LT(residual(raw, lam.Q, prof, g0).sup_norm(), 1e-2);
  // Polished embedding solves the discrete equations.
  const auto emb = embed_laminar(lam, G);
  EXPECT_LT(residual(emb.h, emb.Q, prof, g0).sup_norm(), 1e-9);
}

TEST(Residual, StagnationDetected) {
  const Grid G = make_grid(1.0, -1.0, 8, 9);
  auto h = ScalarField::from_function(G, [](double, double p) { return p + 1.0; });
  for (int j = 3; j < G.Np; ++j) h(2, j) = h(2, 3);
  try {
    residual(h, 1.0, still(), g0);
    FAIL();
  } catch (const StagnationError& e) {
    EXPECT_EQ(e.node_i, 2);
    EXPECT_LE(e.h_p, 0.0);
  }
}

TEST(Newton, ZeroAmplitudeFromLaminarIsImmediate) {
  const Grid G = make_grid(1.0, -1.0, 16, 17);
  const auto emb = embed_laminar(solve_laminar(still(), g0, 2 * g0 + 1, G.Np), G);
  const auto s = newton_solve(emb, 0.0);
  EXPECT_LE(s.stats.iterations, 2);
  EXPECT_LT((s.h - emb.h).sup_abs(), 1e-12);
  EXPECT_NEAR(s.Q, emb.Q, 1e-12);
}

TEST(Newton, RejectsNegativeAmplitude) {
  const Grid G = make_grid(1.0, -1.0, 8, 9);
  const auto emb = embed_laminar(solve_laminar(still(), g0, 2 * g0 + 1, G.Np), G);
  EXPECT_THROW(newton_solve(emb, -1.0), InvalidParameter);
}

TEST(Bifurcation, ModeIsNeutralAndMatchesLinearTheory) {
  // Irrotational homogeneous flow: the linear dispersion relation with
  // depth d and speed of the fluid relative to the wave 1/d at the surface
  // gives c^2 = g tanh(kd)/k, i.e. (1/d)^2 = g tanh(kd)/k. Discretization
  // makes this hold to O(dq^2 + dp^2).
  const Grid G = make_grid(1.0, -1.0, 32, 33);
  const auto lam = solve_laminar(still(), g0, 2 * g0 + 1, G.Np);
  const auto b = find_bifurcation(lam, G);
  const double d = b.laminar.d;
  const double k = 2 * std::numbers::pi / G.L;
  EXPECT_NEAR(1.0 / (d * d), g0 * std::tanh(k * d) / k, 2e-2);
  EXPECT_EQ(b.mode.front(), 0.0);
  EXPECT_DOUBLE_EQ(b.mode.back(), 1.0);
  EXPECT_LT(residual(b.laminar.h, b.Q, still(), g0).sup_norm(), 1e-9);
}

TEST(Continuation, ZeroTargetIsLaminar) {
  const Grid G = make_grid(1.0, -1.0, 16, 17);
  const auto lam = solve_laminar(still(), g0, 2 * g0 + 1, G.Np);
  const auto s = continue_from_laminar(lam, G, 0.0, 3);
  EXPECT_LT(derivative(s.h, Deriv::q).sup_abs(), 1e-14);
  EXPECT_EQ(s.Q, lam.Q);
}

TEST(Continuation, SmallWaveIsEvenAndReflectionResolves) {
  const Grid G = make_grid(1.0, -1.0, 24, 25);
  const auto lam = solve_laminar(still(), g0, 2 * g0 + 1, G.Np);
  const auto s = continue_from_laminar(lam, G, 1e-3, 2);
  expect_invariants(s);
  EXPECT_NEAR(first_cosine_coefficient(s.h), 1e-3, 1e-12);
  EXPECT_LT((s.h - reflect0(s.h)).sup_abs(), 1e-8);
  EXPECT_LT(std::abs(s.stats.phase_multiplier), 1e-9);
  WaveSolution r = s;
  r.h = reflect0(s.h);
  const auto again = newton_solve(r, 1e-3);
  EXPECT_LT((again.h - s.h).sup_abs(), 1e-9);
}

TEST(Continuation, SingleCrestMonotoneProfile) {
  const Grid G = make_grid(1.0, -1.0, 32, 33);
  const auto lam = solve_laminar(still(), g0, 2 * g0 + 1, G.Np);
  const auto s = continue_from_laminar(lam, G, 1e-2, 5);
  expect_invariants(s);
  const auto eta = s.eta();
  // eta_q <= 0 on [0, L/2]: nodes i = Nq/2 .. Nq-1 then the wrap to i = 0.
  for (int i = G.Nq / 2; i < G.Nq; ++i) EXPECT_LE(eta[(i + 1) % G.Nq] - eta[i], 1e-10);
  // M grows with amplitude.
  const auto half = continue_from_laminar(lam, G, 5e-3, 3);
  EXPECT_LT(derivative(half.h, Deriv::q).sup_abs(), derivative(s.h, Deriv::q).sup_abs());
}

TEST(Continuation, StratifiedWave) {
  const auto prof = StreamlineProfiles::polynomial(-1.0, {1.0, -0.1}, {0.0});
  const Grid G = make_grid(1.0, -1.0, 24, 25);
  const auto lam = solve_laminar(prof, g0, 20.0, G.Np);
  const auto s = continue_from_laminar(lam, G, 1e-2, 5);
  expect_invariants(s);
  EXPECT_TRUE(s.profiles.validate_stable().pass);
}

TEST(Continuation, LargeAmplitudeReportsDivergence) {
  const Grid G = make_grid(1.0, -1.0, 16, 17);
  const auto lam = solve_laminar(still(), g0, 2 * g0 + 1, G.Np);
  try {
    const auto s = continue_from_laminar(lam, G, 0.5 * 0.8, 1);
    // A converged answer is acceptable only if it is a genuine solution.
    expect_invariants(s);
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.amplitude, 0.0);
  }
}

TEST(Serialization, SolutionInvariantsAfterRoundTripOfField) {
  const Grid G = make_grid(1.0, -1.0, 16, 17);
  const auto lam = solve_laminar(still(), g0, 2 * g0 + 1, G.Np);
  const auto s = continue_from_laminar(lam, G, 2e-3, 2);
  std::stringstream ss;
  write_field_binary(ss, s.h);
  const auto h = read_field_binary(ss);
  EXPECT_EQ(residual(h, s.Q, s.profiles, s.g).sup_norm(),
            residual(s.h, s.Q, s.profiles, s.g).sup_norm());
}
