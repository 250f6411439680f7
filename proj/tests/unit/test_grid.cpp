#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "stratwave/grid.hpp"

using namespace stratwave;
constexpr double kPi = std::numbers::pi;

TEST(Grid, SpacingAndNodes) {
  const Grid g = make_grid(1.0, -1.0, 8, 9);
  EXPECT_DOUBLE_EQ(g.dq, 0.125);
  EXPECT_DOUBLE_EQ(g.dp, 0.125);
  const Grid h = make_grid(2 * kPi, -1.0, 64, 33);
  EXPECT_DOUBLE_EQ(h.q(0), -kPi);
  EXPECT_EQ(h.p(0), -1.0);
  EXPECT_EQ(h.p(32), 0.0);
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(make_grid(1.0, 0.0, 8, 8), InvalidParameter);
  EXPECT_THROW(make_grid(0.0, -1.0, 8, 8), InvalidParameter);
  EXPECT_THROW(make_grid(1.0, -1.0, 9, 8), InvalidParameter);
  EXPECT_THROW(make_grid(1.0, -1.0, 6, 8), InvalidParameter);
  EXPECT_THROW(make_grid(1.0, -1.0, 8, 7), InvalidParameter);
}

TEST(Grid, PeriodicWrap) {
  const Grid g = make_grid(1.0, -1.0, 8, 8);
  EXPECT_EQ(g.wrap(-1), 7);
  EXPECT_EQ(g.wrap(8), 0);
  EXPECT_EQ(g.index(-1, 2), g.index(7, 2));
}

TEST(Derivative, LinearInPIsExact) {
  const Grid g = make_grid(1.0, -1.3, 16, 11);
  const auto f = ScalarField::from_function(g, [](double, double p) { return p; });
  const auto fp = derivative(f, Deriv::p);
  for (double v : fp.values()) EXPECT_NEAR(v, 1.0, 1e-13);
  for (Deriv d : {Deriv::q, Deriv::qq, Deriv::pp, Deriv::qp})
    EXPECT_LT(derivative(f, d).sup_abs(), 1e-12);
}

TEST(Derivative, ConstantGivesZero) {
  const Grid g = make_grid(2.0, -0.5, 12, 9);
  const ScalarField f(g, 3.25);
  for (Deriv d : {Deriv::q, Deriv::p, Deriv::qq, Deriv::pp, Deriv::qp})
    EXPECT_LT(derivative(f, d).sup_abs(), 1e-10);
}

TEST(Derivative, QIndependentFieldHasZeroQDerivative) {
  const Grid g = make_grid(1.0, -1.0, 16, 17);
  const auto f = ScalarField::from_function(g, [](double, double p) { return std::exp(p); });
  EXPECT_LE(derivative(f, Deriv::q).sup_abs(), 1e-14);
  EXPECT_LE(derivative(f, Deriv::qq).sup_abs(), 1e-14);
}

namespace {

struct Analytic {
  double L = 1.3, p0 = -0.8;
  double k() const { return 2 * kPi / L; }
  double f(double q, double p) const { return std::sin(k() * q) * std::exp(p) + std::cos(2 * p); }
  double d(Deriv w, double q, double p) const {
    switch (w) {
      case Deriv::q: return k() * std::cos(k() * q) * std::exp(p);
      case Deriv::p: return std::sin(k() * q) * std::exp(p) - 2 * std::sin(2 * p);
      case Deriv::qq: return -k() * k() * std::sin(k() * q) * std::exp(p);
      case Deriv::pp: return std::sin(k() * q) * std::exp(p) - 4 * std::cos(2 * p);
      case Deriv::qp: return k() * std::cos(k() * q) * std::exp(p);
    }
    return 0;
  }
  double error(Deriv w, int n) const {
    const Grid g = make_grid(L, p0, n, n + 1);
    const auto fld = ScalarField::from_function(g, [&](double q, double p) { return f(q, p); });
    const auto der = derivative(fld, w);
    double e = 0;
    for (int i = 0; i < g.Nq; ++i)
      for (int j = 0; j < g.Np; ++j)
        e = std::max(e, std::abs(der(i, j) - d(w, g.q(i), g.p(j))));
    return e;
  }
};

}  // namespace

TEST(Derivative, SecondOrderConvergence) {
  const Analytic a;
  for (Deriv w : {Deriv::q, Deriv::p, Deriv::qq, Deriv::pp, Deriv::qp}) {
    const double e1 = a.error(w, 32), e2 = a.error(w, 64), e3 = a.error(w, 128);
    EXPECT_GE(e1 / e2, 3.5) << static_cast<int>(w);
    EXPECT_LE(e1 / e2, 4.5) << static_cast<int>(w);
    EXPECT_GE(e2 / e3, 3.5) << static_cast<int>(w);
    EXPECT_LE(e2 / e3, 4.5) << static_cast<int>(w);
  }
}

TEST(Derivative, SineSecondDerivativeMatchesSymbol) {
  const double L = 2.0;
  const double k = 2 * kPi / L;
  double prev = 0;
  for (int n : {16, 32, 64}) {
    const Grid g = make_grid(L, -1.0, n, 9);
    const auto f = ScalarField::from_function(g, [&](double q, double) { return std::sin(k * q); });
    const auto fqq = derivative(f, Deriv::qq);
    double e = 0;
    for (int i = 0; i < g.Nq; ++i) e = std::max(e, std::abs(fqq(i, 3) + k * k * f(i, 3)));
    if (prev > 0) EXPECT_NEAR(prev / e, 4.0, 0.5);
    prev = e;
  }
}

TEST(Derivative, MixedEqualsComposedEitherOrder) {
  const Grid g = make_grid(1.0, -1.0, 32, 33);
  const Analytic a;
  const auto f = ScalarField::from_function(g, [&](double q, double p) { return a.f(q, p); });
  const auto direct = derivative(f, Deriv::qp);
  const auto qp = derivative(derivative(f, Deriv::q), Deriv::p);
  const auto pq = derivative(derivative(f, Deriv::p), Deriv::q);
  EXPECT_LT((direct - qp).sup_abs(), 1e-12);
  EXPECT_LT((direct - pq).sup_abs(), 1e-12);
}

TEST(SupSeminorms, ZeroAndLinear) {
  const Grid g = make_grid(1.0, -2.0, 8, 9);
  const auto z = sup_seminorms(ScalarField(g));
  EXPECT_EQ(z.f, 0.0);
  EXPECT_EQ(z.fqp, 0.0);
  const auto s = sup_seminorms(ScalarField::from_function(g, [](double, double p) { return p; }));
  EXPECT_DOUBLE_EQ(s.f, 2.0);
  EXPECT_LT(s.fq, 1e-14);
  EXPECT_NEAR(s.fp, 1.0, 1e-13);
  EXPECT_LT(s.fqq, 1e-12);
  EXPECT_LT(s.fqp, 1e-12);
}

TEST(SupSeminorms, SineMaxima) {
  const double L = 1.0;
  const Grid g = make_grid(L, -1.0, 64, 9);
  const auto s = sup_seminorms(
      ScalarField::from_function(g, [&](double q, double) { return std::sin(2 * kPi * q / L); }));
  EXPECT_NEAR(s.f, 1.0, 1e-12);
  const double k = 2 * kPi / L;
  // Central difference of sin has amplitude sin(k dq)/dq.
  EXPECT_NEAR(s.fq, std::sin(k * g.dq) / g.dq, 1e-12);
  EXPECT_NEAR(s.fq, k, k * k * k * g.dq * g.dq / 6 * 1.01);
}

TEST(Serialization, BinaryRoundTripIsBitExact) {
  const Grid g = make_grid(1.7, -0.3, 10, 12);
  const auto f = ScalarField::from_function(
      g, [](double q, double p) { return std::sin(3.1 * q) / 7.0 + std::exp(p) * 1e-17; });
  std::stringstream ss;
  write_field_binary(ss, f);
  const auto back = read_field_binary(ss);
  EXPECT_TRUE(back.grid() == g);
  for (std::size_t k = 0; k < f.values().size(); ++k)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(f.values()[k]),
              std::bit_cast<std::uint64_t>(back.values()[k]));
}

TEST(Serialization, CsvRoundTripIsBitExact) {
  const Grid g = make_grid(1.7, -0.3, 10, 12);
  const auto f = ScalarField::from_function(
      g, [](double q, double p) { return std::sin(3.1 * q) / 7.0 + p / 3.0; });
  std::stringstream ss;
  write_field_csv(ss, f);
  const auto back = read_field_csv(ss);
  EXPECT_TRUE(back.grid() == g);
  for (std::size_t k = 0; k < f.values().size(); ++k) EXPECT_EQ(f.values()[k], back.values()[k]);
}

TEST(Serialization, RejectsGarbage) {
  std::stringstream ss("not a field");
  EXPECT_THROW(read_field_binary(ss), Error);
}
