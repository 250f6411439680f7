#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "stratwave/symmetry.hpp"

using namespace stratwave;

namespace {

constexpr double g0 = 9.81;
constexpr double kPi = std::numbers::pi;

StreamlineProfiles still() { return StreamlineProfiles::polynomial(-1.0, {1.0}, {0.0}); }

ScalarField two_mode(const Grid& G) {
  return ScalarField::from_function(G, [&](double q, double p) {
    return (p - G.p0) *
           (1.0 + 0.1 * std::sin(2 * kPi * q / G.L) + 0.05 * std::sin(4 * kPi * q / G.L + 1.0));
  });
}

const WaveSolution& small_wave() {
  static const WaveSolution s = [] {
    const Grid G = make_grid(1.0, -1.0, 24, 25);
    return continue_from_laminar(solve_laminar(still(), g0, 2 * g0 + 1, G.Np), G, 1e-3, 2);
  }();
  return s;
}

}  // namespace

TEST(Reflect, EvenFieldIsFixedAtLambdaZero) {
  const Grid G = make_grid(1.0, -1.0, 16, 9);
  const auto h = ScalarField::from_function(
      G, [](double q, double p) { return (p + 1.0) * (1.0 + 0.2 * std::cos(2 * kPi * q)); });
  const auto r = reflect(h, 0.0);
  for (std::size_t k = 0; k < h.values().size(); ++k) EXPECT_EQ(r.values()[k], h.values()[k]);
}

TEST(Reflect, OddFieldChangesSign) {
  const Grid G = make_grid(1.0, -1.0, 16, 9);
  const auto h = ScalarField::from_function(G, [](double q, double) { return std::sin(2 * kPi * q); });
  const auto r = reflect(h, 0.0);
  for (std::size_t k = 0; k < h.values().size(); ++k)
    EXPECT_NEAR(r.values()[k], -h.values()[k], 1e-15);
}

TEST(Reflect, DoubleReflectionFourthOrder) {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const Grid G = make_grid(1.0, -1.0, n, 9);
    const auto h = ScalarField::from_function(
        G, [](double q, double p) { return (p + 1.0) * std::exp(std::sin(2 * kPi * q)); });
    const double lam = -0.25 + 0.25 * G.dq;  // reflections land halfway between nodes
    const double err = (reflect(reflect(h, lam), lam) - h).sup_abs();
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 12.0);
      EXPECT_LT(prev / err, 20.0);
    }
    prev = err;
  }
}

TEST(Sweep, SymmetricWave) {
  const auto& s = small_wave();
  const auto r = moving_plane_sweep(s);
  EXPECT_EQ(r.classification, Classification::symmetric);
  EXPECT_NEAR(r.lambda0, 0.0, r.dlambda + 1e-15);
  EXPECT_LE(std::abs(r.axis), s.grid().dq);
  EXPECT_LT(r.sym_residual, 1e-6 * s.h.sup_abs());
  EXPECT_EQ(static_cast<int>(r.trace.size()), 4 * s.grid().Nq);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Sweep, LaminarIsSymmetric) {
  const Grid G = make_grid(1.0, -1.0, 16, 17);
  const auto lam = embed_laminar(solve_laminar(still(), g0, 2 * g0 + 1, G.Np), G);
  const auto r = moving_plane_sweep(lam);
  EXPECT_EQ(r.classification, Classification::symmetric);
  EXPECT_LT(r.sym_residual, 1e-12);
  for (const auto& t : r.trace) EXPECT_EQ(t.min_w_top, 0.0);
}

TEST(Sweep, TwoModeFieldIsAsymmetric) {
  const Grid G = make_grid(1.0, -1.0, 32, 9);
  const auto h = two_mode(G);
  const auto r = moving_plane_sweep(h);
  EXPECT_EQ(r.classification, Classification::asymmetric);
  // Oracle: no axis on the lambda grid, shifted back, makes h even.
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4 * G.Nq; ++k) {
    const double x0 = -0.5 * G.L + k * G.L / (4 * G.Nq);
    best = std::min(best, (h - reflect(h, x0)).sup_abs());
  }
  EXPECT_GT(best, 1e-4 * h.sup_abs());
}

TEST(Sweep, TranslationCovariance) {
  const auto& s = small_wave();
  const int shift = 5;
  const auto moved = rotate_nodes(s.h, shift);
  const auto a = moving_plane_sweep(s.h), b = moving_plane_sweep(moved);
  EXPECT_NEAR(a.sym_residual, b.sym_residual, 1e-10);
  EXPECT_NEAR(detail::wrap_axis(b.axis + shift * s.grid().dq, 1.0), a.axis, 1e-12);
}

TEST(Sweep, NonMonotoneWarning) {
  const Grid G = make_grid(1.0, -1.0, 32, 9);
  const auto h = ScalarField::from_function(
      G, [](double q, double p) { return (p + 1.0) * (1.0 + 0.1 * std::cos(4 * kPi * q)); });
  EXPECT_FALSE(moving_plane_sweep(h).warnings.empty());
}

TEST(Sweep, TraceCsv) {
  const auto r = moving_plane_sweep(small_wave(), 8);
  std::ostringstream os;
  write_trace_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  int n = 0;
  std::getline(is, line);
  EXPECT_EQ(line, "lambda,min_w_top");
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 8);
}

TEST(Identities, HoldForSolution) {
  const auto& s = small_wave();
  for (double lam : {-0.25, -0.25 + 0.37 * s.grid().dq, 0.0}) {
    const auto r = boundary_identities_check(s, lam);
    EXPECT_TRUE(r.pass()) << lam;
    EXPECT_EQ(r.bottom_max, 0.0);
  }
}

TEST(Identities, MeanCheckHasTeeth) {
  const auto& s = small_wave();
  const Grid& G = s.grid();
  // A "reflection" that is not a periodic rearrangement: clamp instead of wrap.
  ScalarField bad(G);
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j) bad(i, j) = s.h(std::min(G.Nq - 1, std::max(0, 2 * i)), j);
  const auto r = boundary_identities_check(s.h, bad, -0.25);
  EXPECT_TRUE(r.bottom_ok);
  EXPECT_FALSE(r.mean_ok);
  EXPECT_FALSE(r.pass());
}

TEST(EulerianSymmetry, LaminarAndWave) {
  const Grid G = make_grid(1.0, -1.0, 16, 17);
  const auto lam = embed_laminar(solve_laminar(still(), g0, 2 * g0 + 1, G.Np), G);
  const auto El = reconstruct_eulerian(lam, default_wave_speed(lam));
  for (double x0 : {0.0, 0.13, -0.4}) {
    const auto r = eulerian_symmetry_check(El, x0);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.u_residual, 1e-14);
    EXPECT_LE(r.eta_residual, 1e-14);
  }
  const auto& s = small_wave();
  const auto E = reconstruct_eulerian(s, default_wave_speed(s));
  EXPECT_TRUE(eulerian_symmetry_check(E, 0.0).pass);
  const auto off = eulerian_symmetry_check(E, 1.0 / 8.0);
  EXPECT_FALSE(off.pass);
  EXPECT_GT(std::max({off.u_residual, off.v_residual}), off.velocity_tol);
}
