#pragma once

// Scalars consumed by the symmetry certificates, and Eulerian fields
// reconstructed from a height function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/wave_solver.hpp"

namespace stratwave {

struct FlowDiagnostics {
  double a0 = 0.0;  // inf 1/h_p
  double A0 = 0.0;  // sup 1/h_p
  double M = 0.0;   // max of the three components below
  double M_hq = 0.0, M_hqq = 0.0, M_hqp = 0.0;
  double eta_max = 0.0;  // max h(q, 0), i.e. max eta + d
  double eta_min = 0.0;  // min h(q, 0)
  double d = 0.0;
  double p0 = 0.0;
  double L = 0.0;
  double Q = 0.0;
  double g = 0.0;
  double sup_beta_prime = 0.0;
  double sup_abs_beta = 0.0;
  double sup_abs_rho_p = 0.0;
  double sup_rho_pp_plus = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
};

/// eps1 = 3 g eta_max sup|rho'|.
inline double compose_eps1(double g, double eta_max, double sup_abs_rho_p) {
  return 3.0 * g * eta_max * sup_abs_rho_p;
}

/// eps2 = 4 M A0^2 + 2 M^2 A0^3 + 3 A0 B + 2 M^3 A0^3 / a0 + M^2 A0^3 / a0
///        + M A0^3 B / a0^3, with B = sup|beta| + g eta_max sup|rho_p|.
inline double compose_eps2(double M, double a0, double A0, double sup_abs_beta, double g,
                           double eta_max, double sup_abs_rho_p) {
  const double B = sup_abs_beta + g * eta_max * sup_abs_rho_p;
  const double A2 = A0 * A0, A3 = A2 * A0;
  return 4.0 * M * A2 + 2.0 * M * M * A3 + 3.0 * A0 * B + 2.0 * M * M * M * A3 / a0 +
         M * M * A3 / a0 + M * A3 * B / (a0 * a0 * a0);
}

inline FlowDiagnostics compute_diagnostics(const WaveSolution& sol) {
  const Grid& G = sol.grid();
  const auto hp = derivative(sol.h, Deriv::p);
  FlowDiagnostics D;
  D.a0 = std::numeric_limits<double>::infinity();
  D.A0 = 0.0;
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j) {
      if (!(hp(i, j) > 0.0))
        throw StagnationError("diagnostics: h_p <= 0", i, j, hp(i, j));
      const double inv = 1.0 / hp(i, j);
      D.a0 = std::min(D.a0, inv);
      D.A0 = std::max(D.A0, inv);
    }
  D.M_hq = derivative(sol.h, Deriv::q).sup_abs();
  D.M_hqq = derivative(sol.h, Deriv::qq).sup_abs();
  D.M_hqp = derivative(sol.h, Deriv::qp).sup_abs();
  D.M = std::max({D.M_hq, D.M_hqq, D.M_hqp});
  const auto top = sol.h.row(G.top());
  D.eta_max = *std::max_element(top.begin(), top.end());
  D.eta_min = *std::min_element(top.begin(), top.end());
  D.d = sol.d;
  D.p0 = G.p0;
  D.L = G.L;
  D.Q = sol.Q;
  D.g = sol.g;
  const auto b = sol.profiles.supremum_bounds();
  D.sup_beta_prime = b.sup_beta_prime;
  D.sup_abs_beta = b.sup_abs_beta;
  D.sup_abs_rho_p = b.sup_abs_rho_p;
  D.sup_rho_pp_plus = b.sup_rho_pp_plus;
  D.eps1 = compose_eps1(D.g, D.eta_max, D.sup_abs_rho_p);
  D.eps2 = compose_eps2(D.M, D.a0, D.A0, D.sup_abs_beta, D.g, D.eta_max, D.sup_abs_rho_p);
  return D;
}

/// Eulerian quantities on the (q, p) nodes. The physical point of node
/// (i, j) is (x, y) = (q_i, h(i, j) - d).
struct EulerianFields {
  ScalarField psi, u, v, y, rho;
  double c = 0.0;
};

/// Speed used when none is given: u = c - 1/(h_p sqrt(rho)) is then >= 1.
inline double default_wave_speed(const WaveSolution& sol) {
  const Grid& G = sol.grid();
  const auto hp = derivative(sol.h, Deriv::p);
  double m = 0.0;
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j)
      m = std::max(m, 1.0 / (hp(i, j) * std::sqrt(sol.profiles.rho(G.p(j)))));
  return m + 1.0;
}

inline EulerianFields reconstruct_eulerian(const WaveSolution& sol, double c) {
  const Grid& G = sol.grid();
  const auto hp = derivative(sol.h, Deriv::p);
  const auto hq = derivative(sol.h, Deriv::q);
  EulerianFields E{ScalarField(G), ScalarField(G), ScalarField(G), ScalarField(G),
                   ScalarField(G), c};
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j) {
      if (!(hp(i, j) > 0.0))
        throw StagnationError("reconstruction: h_p <= 0", i, j, hp(i, j));
      const double r = sol.profiles.rho(G.p(j));
      const double sr = std::sqrt(r);
      E.psi(i, j) = -G.p(j);
      E.u(i, j) = c - 1.0 / (hp(i, j) * sr);
      E.v(i, j) = -hq(i, j) / (hp(i, j) * sr);
      E.y(i, j) = sol.h(i, j) - sol.d;
      E.rho(i, j) = r;
    }
  return E;
}

/// p0 recomputed per column as the trapezoid sum of sqrt(rho)(u - c) over the
/// mapped y-nodes from the bed to the surface.
inline std::vector<double> flux_from_eulerian(const EulerianFields& E) {
  const Grid& G = E.u.grid();
  std::vector<double> out(G.Nq, 0.0);
  for (int i = 0; i < G.Nq; ++i) {
    double acc = 0.0;
    for (int j = 0; j + 1 < G.Np; ++j) {
      const double f0 = std::sqrt(E.rho(i, j)) * (E.u(i, j) - E.c);
      const double f1 = std::sqrt(E.rho(i, j + 1)) * (E.u(i, j + 1) - E.c);
      acc += 0.5 * (f0 + f1) * (E.y(i, j + 1) - E.y(i, j));
    }
    out[i] = acc;
  }
  return out;
}

struct EulerianM {
  double slope = 0.0;      // max |v/(u-c)|
  double transport = 0.0;  // max |(d_x + v/(u-c) d_y) v/(u-c)|
  double vertical = 0.0;   // max |d_y(v/(u-c)) / (sqrt(rho)(u-c))|
  double M = 0.0;
};

/// M from Eulerian fields, with x- and y-derivatives obtained from the
/// (q, p) stencils through d_y = d_p / y_p and d_x = d_q - y_q d_y.
inline EulerianM compute_M_eulerian(const ScalarField& u, const ScalarField& v,
                                    const ScalarField& rho, const ScalarField& y, double c) {
  const Grid& G = u.grid();
  ScalarField r(G);
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j) {
      if (!(u(i, j) < c))
        throw StagnationError("M: u >= c", i, j, c - u(i, j));
      r(i, j) = v(i, j) / (u(i, j) - c);
    }
  const auto rq = derivative(r, Deriv::q), rp = derivative(r, Deriv::p);
  const auto yq = derivative(y, Deriv::q), yp = derivative(y, Deriv::p);
  EulerianM m;
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j) {
      const double ry = rp(i, j) / yp(i, j);
      const double rx = rq(i, j) - yq(i, j) * ry;
      m.slope = std::max(m.slope, std::abs(r(i, j)));
      m.transport = std::max(m.transport, std::abs(rx + r(i, j) * ry));
      m.vertical =
          std::max(m.vertical, std::abs(ry / (std::sqrt(rho(i, j)) * (u(i, j) - c))));
    }
  m.M = std::max({m.slope, m.transport, m.vertical});
  return m;
}

inline EulerianM compute_M_eulerian(const EulerianFields& E) {
  return compute_M_eulerian(E.u, E.v, E.rho, E.y, E.c);
}

}  // namespace stratwave
