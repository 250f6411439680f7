#pragma once

// Seeded property suites for the eigenvalue machinery.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stratwave/eigen.hpp"
#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"

namespace stratwave {

/// Smooth random coefficient: sum over m, k < 3 of c_mk cos(m pi s + phi_mk)
/// cos(k pi t) on the rectangle, with (s, t) in [0, 1]^2.
struct SmoothMode {
  std::vector<double> amp, phase;
  double operator()(const Grid& g, int i, int j) const {
    const double s = static_cast<double>(i) / g.Nq, t = static_cast<double>(j) / (g.Np - 1);
    double v = 0.0;
    for (int m = 0; m < 3; ++m)
      for (int k = 0; k < 3; ++k)
        v += amp[m * 3 + k] * std::cos(m * std::numbers::pi * s + phase[m * 3 + k]) *
             std::cos(k * std::numbers::pi * t);
    return v;
  }
};

inline SmoothMode random_mode(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SmoothMode m;
  for (int k = 0; k < 9; ++k) {
    m.amp.push_back(U(rng) / (1.0 + k));
    m.phase.push_back(std::numbers::pi * U(rng));
  }
  return m;
}

/// Parameters of a random elliptic operator with a_qp = 0.
struct RandomOperatorSpec {
  std::uint64_t seed = 0;
  double a0 = 1.0;          // ellipticity floor
  double drift_max = 1.0;   // sup of the drift magnitude
  double c_max = 0.0;       // sup |c|
};

inline nlohmann::ordered_json to_json(const RandomOperatorSpec& s) {
  return {{"seed", s.seed}, {"a0", s.a0}, {"drift_max", s.drift_max}, {"c_max", s.c_max}};
}

namespace detail {

inline void scale_to_sup(ScalarField& f, const DiscreteOperator& op, double target) {
  double m = 0.0;
  op.for_interior([&](int i, int j) { m = std::max(m, std::abs(f(i, j))); });
  if (m > 0.0) f *= target / m;
}

}  // namespace detail

/// a_qq, a_pp >= a0 with equality at some interior node, drift magnitude with
/// interior supremum drift_max, zeroth order with interior sup |c| = c_max.
inline DiscreteOperator random_elliptic_operator(const Grid& g, const RandomOperatorSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  DiscreteOperator op(g);
  const auto mq = random_mode(rng), mp = random_mode(rng);
  const auto bq = random_mode(rng), bp = random_mode(rng), mc = random_mode(rng);
  double lo_q = std::numeric_limits<double>::infinity(), lo_p = lo_q;
  for (int i = 0; i < g.Nq; ++i)
    for (int j = 0; j < g.Np; ++j) {
      op.a_qq(i, j) = std::exp(0.5 * mq(g, i, j));
      op.a_pp(i, j) = std::exp(0.5 * mp(g, i, j));
      op.b_q(i, j) = bq(g, i, j);
      op.b_p(i, j) = bp(g, i, j);
      op.c(i, j) = mc(g, i, j);
    }
  op.for_interior([&](int i, int j) {
    lo_q = std::min(lo_q, op.a_qq(i, j));
    lo_p = std::min(lo_p, op.a_pp(i, j));
  });
  op.a_qq *= spec.a0 / lo_q;
  op.a_pp *= spec.a0 / lo_p;
  ScalarField mag(g);
  for (std::size_t k = 0; k < g.size(); ++k)
    mag.values()[k] = std::hypot(op.b_q.values()[k], op.b_p.values()[k]);
  double mmax = 0.0;
  op.for_interior([&](int i, int j) { mmax = std::max(mmax, mag(i, j)); });
  if (mmax > 0.0) {
    op.b_q *= spec.drift_max / mmax;
    op.b_p *= spec.drift_max / mmax;
  }
  if (spec.c_max > 0.0)
    detail::scale_to_sup(op.c, op, spec.c_max);
  else
    op.c = ScalarField(g);
  return op;
}

struct SuiteSummary {
  std::string suite;
  int trials = 0;
  int failures = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  nlohmann::ordered_json failing_inputs = nlohmann::ordered_json::array();
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  bool pass() const { return failures == 0 && trials > 0; }
  void record(double margin, const nlohmann::ordered_json& inputs) {
    ++trials;
    worst_margin = std::min(worst_margin, margin);
    if (!(margin >= 0.0)) {
      ++failures;
      failing_inputs.push_back(inputs);
    }
  }
};

inline nlohmann::ordered_json to_json(const SuiteSummary& s) {
  return {{"suite", s.suite}, {"trials", s.trials}, {"failures", s.failures},
          {"worst_margin", s.worst_margin}, {"pass", s.pass()},
          {"failing_inputs", s.failing_inputs}, {"details", s.details}};
}

inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(trial) * 7919ULL + 1ULL;
}

inline Grid interior_box(int n, double L = 1.0, double p0 = -1.0) {
  return make_box_grid(L, p0, n + 1, n + 2);
}

/// Exponential lower bound against the dense eigenvalue for random
/// operators without zeroth order: margin = lambda1 - bnv bound.
inline SuiteSummary verify_bnv_bound(int trials, std::uint64_t seed, int n = 14) {
  SuiteSummary s;
  s.suite = "bnv-bound";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    RandomOperatorSpec spec{trial_seed(seed, t), 0.5 + 1.5 * U(rng), U(rng), 0.0};
    const Grid g = interior_box(n, 0.5 + 1.5 * U(rng), -(0.5 + 1.5 * U(rng)));
    const auto op = random_elliptic_operator(g, spec);
    const double lam = dense_lambda1(op), bound = bnv_exp_bound(op);
    auto in = to_json(spec);
    in["L"] = g.L;
    in["p0"] = g.p0;
    in["lambda1"] = lam;
    in["bound"] = bound;
    s.record(lam - bound, in);
  }
  return s;
}

/// Laplacian family on random rectangles: separation oracle, inverse iteration
/// against dense, PW bounds for random positive test functions, BNV bound and
/// the constant-shift identity.
inline SuiteSummary verify_eigen_props(int trials, std::uint64_t seed, int n = 16) {
  SuiteSummary s;
  s.suite = "eigen-props";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const double L = 0.5 + 1.5 * U(rng), h = 0.5 + 1.5 * U(rng);
    const double aq = 0.5 + 1.5 * U(rng), ap = 0.5 + 1.5 * U(rng);
    const Grid g = interior_box(n, L, -h);
    DiscreteOperator op(g);
    op.a_qq = ScalarField(g, aq);
    op.a_pp = ScalarField(g, ap);
    nlohmann::ordered_json in{{"trial", t}, {"L", L}, {"height", h}, {"a_qq", aq}, {"a_pp", ap}};
    const auto e = principal_eigenvalue(op);
    const double sq = std::sin(std::numbers::pi * g.dq / (2 * L));
    const double sp = std::sin(std::numbers::pi * g.dp / (2 * h));
    const double exact = 4 * aq * sq * sq / (g.dq * g.dq) + 4 * ap * sp * sp / (g.dp * g.dp);
    auto tagged = [&](const char* check) {
      auto j = in;
      j["check"] = check;
      return j;
    };
    s.record(1e-9 * (1.0 + exact) - std::abs(e.lambda1 - exact), tagged("separation"));
    const auto it = principal_eigenvalue_iterative(op);
    s.record(1e-8 * (1.0 + exact) - std::abs(it.lambda1 - e.lambda1), tagged("iterative"));
    const double a = 2 * U(rng) - 1, b = 2 * U(rng) - 1, c = 0.1 + U(rng);
    const auto phi = ScalarField::from_function(g, [&](double q, double p) {
      return c + std::exp(a * q + b * p) * (1.05 + std::sin(5.0 * q * p + a));
    });
    s.record(e.lambda1 + 1e-8 - pw_lower_bound(op, phi), tagged("pw"));
    s.record(e.lambda1 - bnv_exp_bound(op), tagged("bnv"));
    const double c0 = 4 * U(rng) - 2;
    auto shifted = op;
    shifted.c = ScalarField(g, c0);
    s.record(1e-10 * (1.0 + std::abs(exact)) - std::abs(dense_lambda1(shifted) - (e.lambda1 - c0)),
             tagged("shift"));
  }
  return s;
}

/// Drift and zeroth-order perturbation bounds on n x n interiors: each trial
/// draws a base operator and checks one drift change and one zeroth-order
/// change against dense eigenvalues.
inline SuiteSummary verify_perturbation(int trials, std::uint64_t seed, int n = 20) {
  SuiteSummary s;
  s.suite = "perturbation";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid g = interior_box(n);
  int drift_checked = 0, zeroth_checked = 0;
  for (int t = 0; t < trials; ++t) {
    RandomOperatorSpec spec{trial_seed(seed, t), 0.5 + 1.5 * U(rng), 0.1 + 0.9 * U(rng), 0.0};
    const auto op = random_elliptic_operator(g, spec);
    const double lam = dense_lambda1(op);
    nlohmann::ordered_json in{{"trial", t}, {"base", to_json(spec)}};

    // Drift change with delta^2 <= b a0.
    auto dop = op;
    std::mt19937_64 r2(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto dq = random_mode(r2), dp = random_mode(r2);
    ScalarField ddq(g), ddp(g);
    for (int i = 0; i < g.Nq; ++i)
      for (int j = 0; j < g.Np; ++j) {
        ddq(i, j) = dq(g, i, j);
        ddp(i, j) = dp(g, i, j);
      }
    double dmax = 0.0;
    op.for_interior([&](int i, int j) { dmax = std::max(dmax, std::hypot(ddq(i, j), ddp(i, j))); });
    const double b = drift_sup(op), a0 = ellipticity_floor(op);
    const double delta = U(rng) * std::min(std::sqrt(b * a0), b);
    ddq *= delta / dmax;
    ddp *= delta / dmax;
    dop.b_q += ddq;
    dop.b_p += ddp;
    const auto rd = perturbation_bound_check(op, dop, lam, dense_lambda1(dop));
    in["drift_delta"] = rd.delta;
    in["drift_lhs"] = rd.lhs;
    in["drift_rhs"] = rd.rhs;
    if (rd.premise_met) {
      ++drift_checked;
      s.record(rd.lhs - rd.rhs, in);
    }

    // Zeroth-order change.
    auto zop = op;
    zop.c = ScalarField(g);
    std::mt19937_64 r3(spec.seed ^ 0x632be59bd9b4e019ULL);
    const auto mc = random_mode(r3);
    for (int i = 0; i < g.Nq; ++i)
      for (int j = 0; j < g.Np; ++j) zop.c(i, j) = mc(g, i, j);
    detail::scale_to_sup(zop.c, zop, 0.1 + 2.0 * U(rng));
    const auto rz = perturbation_bound_check(op, zop, lam, dense_lambda1(zop));
    in["zeroth_delta"] = rz.delta;
    in["zeroth_lhs"] = rz.lhs;
    ++zeroth_checked;
    s.record(rz.rhs - rz.lhs, in);
  }
  s.details["drift_checked"] = drift_checked;
  s.details["zeroth_checked"] = zeroth_checked;
  return s;
}

/// Three operators with lambda1 > 0 (Laplacian, Laplacian - 19 and a random
/// drifted operator) must admit no sign violation; the negative control
/// Laplacian - 25 must produce a witness.
inline SuiteSummary verify_max_principle_suite(int trials, std::uint64_t seed, int n = 20,
                                               bool inject_negative = true) {
  SuiteSummary s;
  s.suite = "max-principle";
  const Grid g = interior_box(n);
  std::vector<std::pair<std::string, DiscreteOperator>> ops;
  ops.emplace_back("laplacian", laplacian(g));
  auto near = laplacian(g);
  near.c = ScalarField(g, 19.0);
  ops.emplace_back("laplacian-19", near);
  ops.emplace_back("random-drift",
                   random_elliptic_operator(g, RandomOperatorSpec{trial_seed(seed, 0), 1.0, 1.0, 0.0}));
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto r = verify_max_principle(ops[k].second, trials, trial_seed(seed, static_cast<int>(k)));
    nlohmann::ordered_json in{{"operator", ops[k].first}, {"lambda1", r.lambda1},
                              {"worst_ratio", r.worst_ratio}, {"violations", r.violations}};
    s.details[ops[k].first] = in;
    s.record(r.pass && r.lambda1 > 0.0 ? r.worst_ratio + 1e-10 : -1.0, in);
  }
  if (inject_negative) {
    auto neg = laplacian(g);
    neg.c = ScalarField(g, 25.0);
    const auto r = verify_max_principle(neg, std::min(trials, 10), seed);
    nlohmann::ordered_json in{{"operator", "laplacian-25"}, {"lambda1", r.lambda1},
                              {"witness_found", r.witness_found},
                              {"witness_source", r.witness_source},
                              {"witness_ratio", r.witness_ratio}};
    s.details["negative_control"] = in;
    // Expected failure of the principle: the control passes when a witness exists.
    s.record(r.lambda1 < 0.0 && r.witness_found ? 0.0 : -1.0, in);
  }
  return s;
}

}  // namespace stratwave
