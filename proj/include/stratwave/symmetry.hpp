#pragma once

// Moving-plane diagnostic on computed height functions: reflected
// differences, the critical plane, and symmetry residuals.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "stratwave/diagnostics.hpp"
#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/wave_solver.hpp"

namespace stratwave {

namespace detail {

// Periodic 4-point Lagrange interpolation of nodal values f[i] at q_i.
inline double periodic_cubic(const std::vector<double>& f, const Grid& g, double x) {
  const int n = g.Nq;
  const double s = (x - g.q(0)) / g.dq;
  const double fl = std::floor(s);
  const double t = s - fl;
  const int i0 = static_cast<int>(fl);
  auto at = [&](int k) { return f[static_cast<std::size_t>(((k % n) + n) % n)]; };
  if (t < 1e-12) return at(i0);
  if (t > 1.0 - 1e-12) return at(i0 + 1);
  const double wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return wm * at(i0 - 1) + w0 * at(i0) + w1 * at(i0 + 1) + w2 * at(i0 + 2);
}

}  // namespace detail

/// h_tilde(q, p) = h(2 lambda - q, p), periodic in q, cubic between nodes.
inline ScalarField reflect(const ScalarField& h, double lambda) {
  const Grid& g = h.grid();
  ScalarField out(g);
  for (int j = 0; j < g.Np; ++j) {
    const auto row = h.row(j);
    for (int i = 0; i < g.Nq; ++i) out(i, j) = detail::periodic_cubic(row, g, 2.0 * lambda - g.q(i));
  }
  return out;
}

/// h(q + shift, p) for a whole number of nodes.
inline ScalarField rotate_nodes(const ScalarField& h, int shift) {
  const Grid& g = h.grid();
  ScalarField out(g);
  for (int i = 0; i < g.Nq; ++i)
    for (int j = 0; j < g.Np; ++j) out(i, j) = h(i + shift, j);
  return out;
}

/// min over axes x0 in `axes` of ||h - reflect(h, x0)||_inf, with the argmin.
inline std::pair<double, double> best_axis_residual(const ScalarField& h,
                                                    const std::vector<double>& axes) {
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  for (double x0 : axes) {
    const double r = (h - reflect(h, x0)).sup_abs();
    if (r < best) {
      best = r;
      arg = x0;
    }
  }
  return {best, arg};
}

enum class Classification { symmetric, asymmetric, inconclusive };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::symmetric: return "symmetric";
    case Classification::asymmetric: return "asymmetric";
    case Classification::inconclusive: return "inconclusive";
  }
  return "";
}

struct TracePoint {
  double lambda = 0.0;
  double min_w_top = 0.0;
};

struct MovingPlaneResult {
  double lambda0 = 0.0;     // in the rotated frame, in [-L/2, 0]
  double min_w_top = 0.0;   // at lambda0
  double sym_residual = 0.0;
  double axis = 0.0;        // in the original frame, wrapped to [-L/2, L/2)
  Classification classification = Classification::inconclusive;
  int rotation = 0;         // nodes shifted so the trough sits at the first node
  double dlambda = 0.0;
  double tol_w = 0.0, tol_sym = 0.0;
  std::vector<TracePoint> trace;
  std::vector<std::string> warnings;
};

namespace detail {

inline int count_local_maxima(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double a = f[(i + n - 1) % n], b = f[i], c = f[(i + 1) % n];
    if (b > a && b >= c) ++count;
  }
  return count;
}

inline double wrap_axis(double x, double L) {
  double y = std::fmod(x + 0.5 * L, L);
  if (y < 0) y += L;
  return y - 0.5 * L;
}

// Vertex of the parabola through the crest node and its neighbours.
inline double refined_crest(const std::vector<double>& f, const Grid& g) {
  const int n = g.Nq;
  const int k = static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
  const double a = f[(k + n - 1) % n], b = f[k], c = f[(k + 1) % n];
  const double den = a - 2.0 * b + c;
  const double off = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
  return g.q(k) + std::clamp(off, -0.5, 0.5) * g.dq;
}

}  // namespace detail

/// Sweeps the plane q = lambda over a uniform grid in (-L/2, 0] after rotating
/// the field so that the lowest surface node is at q = -L/2.
inline MovingPlaneResult moving_plane_sweep(const ScalarField& h, int n_lambda = 0) {
  const Grid& g = h.grid();
  if (n_lambda <= 0) n_lambda = 4 * g.Nq;
  MovingPlaneResult r;
  const double hn = h.sup_abs();
  r.tol_w = 1e-9 * hn;
  r.tol_sym = 1e-6 * hn;
  const auto top0 = h.row(g.top());
  r.rotation = static_cast<int>(std::min_element(top0.begin(), top0.end()) - top0.begin());
  const auto hr = rotate_nodes(h, r.rotation);
  const auto eta = hr.row(g.top());
  if (detail::count_local_maxima(eta) > 1)
    r.warnings.push_back("surface has more than one local maximum per period");

  const double half = 0.5 * g.L;
  r.dlambda = half / n_lambda;
  r.lambda0 = -half;
  r.min_w_top = 0.0;
  bool blocked = false;
  for (int k = 1; k <= n_lambda; ++k) {
    const double lam = -half + k * r.dlambda;
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.Nq; ++i) {
      const double q = g.q(i);
      if (q > lam && q < 2.0 * lam + half)
        m = std::min(m, eta[i] - detail::periodic_cubic(eta, g, 2.0 * lam - q));
    }
    if (!std::isfinite(m)) m = 0.0;  // no node strictly inside the cap
    r.trace.push_back({lam, m});
    if (!blocked && m >= -r.tol_w) {
      r.lambda0 = lam;
      r.min_w_top = m;
    } else {
      blocked = true;
    }
  }

  const double crest_node = g.q(static_cast<int>(std::max_element(eta.begin(), eta.end()) -
                                                 eta.begin()));
  const auto [res, x0] =
      best_axis_residual(hr, {r.lambda0, crest_node, detail::refined_crest(eta, g)});
  r.sym_residual = res;
  r.axis = detail::wrap_axis(x0 + r.rotation * g.dq, g.L);
  const bool interior = r.lambda0 > -half && r.lambda0 < 0.0;
  if (res < r.tol_sym)
    r.classification = Classification::symmetric;
  else if (res > 100.0 * r.tol_sym && interior)
    r.classification = Classification::asymmetric;
  else
    r.classification = Classification::inconclusive;
  return r;
}

inline MovingPlaneResult moving_plane_sweep(const WaveSolution& sol, int n_lambda = 0) {
  return moving_plane_sweep(sol.h, n_lambda);
}

inline void write_trace_csv(std::ostream& os, const MovingPlaneResult& r) {
  os << "lambda,min_w_top\n";
  for (const auto& t : r.trace)
    os << detail::fmt_double(t.lambda) << ',' << detail::fmt_double(t.min_w_top) << '\n';
}

struct BoundaryIdentities {
  double plane_residual = 0.0;  // max_p |w(lambda, p)|
  double plane_tol = 0.0;
  double bottom_max = 0.0;      // max |w(q, p0)|, must be exactly zero
  double mean_top = 0.0;        // mean of w(., 0)
  double mean_tol = 0.0;
  bool plane_ok = false, bottom_ok = false, mean_ok = false;
  bool pass() const { return plane_ok && bottom_ok && mean_ok; }
};

/// The three identities for w = h - h_reflected about q = lambda. The plane
/// tolerance is the largest fourth difference of h in q, which bounds the
/// cubic interpolation error.
inline BoundaryIdentities boundary_identities_check(const ScalarField& h,
                                                    const ScalarField& h_reflected,
                                                    double lambda) {
  const Grid& g = h.grid();
  if (!(h_reflected.grid() == g)) throw InvalidParameter("identities: grid mismatch");
  BoundaryIdentities r;
  const double hn = h.sup_abs();
  double d4 = 0.0;
  for (int i = 0; i < g.Nq; ++i)
    for (int j = 0; j < g.Np; ++j)
      d4 = std::max(d4, std::abs(h(i - 2, j) - 4.0 * h(i - 1, j) + 6.0 * h(i, j) -
                                 4.0 * h(i + 1, j) + h(i + 2, j)));
  r.plane_tol = d4 + 1e-12 * hn;
  for (int j = 0; j < g.Np; ++j) {
    const double a = detail::periodic_cubic(h.row(j), g, lambda);
    const double b = detail::periodic_cubic(h_reflected.row(j), g, lambda);
    r.plane_residual = std::max(r.plane_residual, std::abs(a - b));
  }
  for (int i = 0; i < g.Nq; ++i)
    r.bottom_max = std::max(r.bottom_max, std::abs(h(i, 0) - h_reflected(i, 0)));
  double s = 0.0;
  for (int i = 0; i < g.Nq; ++i) s += h(i, g.top()) - h_reflected(i, g.top());
  r.mean_top = s / g.Nq;
  r.mean_tol = 1e-10 * hn;
  r.plane_ok = r.plane_residual <= r.plane_tol;
  r.bottom_ok = r.bottom_max == 0.0;
  r.mean_ok = std::abs(r.mean_top) <= r.mean_tol;
  return r;
}

inline BoundaryIdentities boundary_identities_check(const WaveSolution& sol, double lambda) {
  return boundary_identities_check(sol.h, reflect(sol.h, lambda), lambda);
}

struct EulerianSymmetry {
  double u_residual = 0.0, v_residual = 0.0, eta_residual = 0.0, rho_residual = 0.0;
  double velocity_tol = 0.0, eta_tol = 0.0;
  bool pass = false;
};

/// Along each streamline: u, rho and the surface symmetric about x = x0, v
/// antisymmetric. Tolerances are tol_rel times the velocity and height scales.
inline EulerianSymmetry eulerian_symmetry_check(const EulerianFields& E, double x0,
                                                double tol_rel = 1e-6) {
  EulerianSymmetry r;
  const Grid& g = E.u.grid();
  const auto ur = reflect(E.u, x0), vr = reflect(E.v, x0), rr = reflect(E.rho, x0);
  const auto yr = reflect(E.y, x0);
  r.u_residual = (E.u - ur).sup_abs();
  ScalarField vs = E.v;
  vs += vr;
  r.v_residual = vs.sup_abs();
  r.rho_residual = (E.rho - rr).sup_abs();
  for (int i = 0; i < g.Nq; ++i)
    r.eta_residual = std::max(r.eta_residual, std::abs(E.y(i, g.top()) - yr(i, g.top())));
  ScalarField rel = E.u;
  for (auto& x : rel.values()) x -= E.c;
  r.velocity_tol = tol_rel * std::max(rel.sup_abs(), E.v.sup_abs());
  double ymax = 0.0;
  for (double y : E.y.values()) ymax = std::max(ymax, std::abs(y));
  r.eta_tol = tol_rel * ymax;
  r.pass = r.u_residual < r.velocity_tol && r.v_residual < r.velocity_tol &&
           r.rho_residual <= tol_rel && r.eta_residual < r.eta_tol;
  return r;
}

}  // namespace stratwave
