#pragma once

// Laminar (q-independent) flows: H'' - g (H - d) H'^3 rho_p + H'^3 beta(-p) = 0
// on [p0, 0] with H(p0) = 0, 1 + H'(0)^2 (2 g rho(0) H(0) - Q) = 0 and d = H(0).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/height_equation.hpp"
#include "stratwave/profiles.hpp"

namespace stratwave {

struct LaminarOptions {
  int substeps = 8;          // RK4 steps per grid interval
  double s_min = 1e-4;       // bracket scan range for the bed slope H'(p0)
  double s_max = 1e4;
  int scan_points = 161;     // log-spaced
  double d_tol = 1e-12;      // outer fixed point on d = H(0)
  int max_outer = 200;
};

struct LaminarFlow {
  std::vector<double> p;   // node coordinates, p[0] = p0, p.back() = 0
  std::vector<double> H;   // height above the bed
  std::vector<double> Hp;  // H' from the integrator
  double Q = 0.0;
  double g = 0.0;
  double d = 0.0;
  double bed_slope = 0.0;  // H'(p0) found by shooting
  StreamlineProfiles profiles;
  int outer_iterations = 0;

  double top_residual() const {
    const double hp = Hp.back();
    return 1.0 + hp * hp * (2.0 * g * profiles.rho(0.0) * H.back() - Q);
  }
};

namespace detail {

struct ShotResult {
  bool ok = false;
  std::vector<double> H, Hp;  // at the coarse nodes
};

inline ShotResult shoot(const StreamlineProfiles& prof, double g, double d, double s, int Np,
                        int substeps) {
  const double p0 = prof.p0();
  const int n = (Np - 1) * substeps;
  const double h = -p0 / n;
  auto rhs = [&](double p, double H, double Hp) {
    const double hp3 = Hp * Hp * Hp;
    return g * (H - d) * hp3 * prof.rho_p(p) - hp3 * prof.beta_on(p);
  };
  ShotResult r;
  r.H.assign(Np, 0.0);
  r.Hp.assign(Np, 0.0);
  double H = 0.0, Hp = s;
  r.Hp[0] = s;
  for (int k = 0; k < n; ++k) {
    const double p = p0 + k * h;
    const double pe = (k + 1 == n) ? 0.0 : p0 + (k + 1) * h;
    const double ph = 0.5 * (p + pe);
    const double k1H = Hp, k1P = rhs(p, H, Hp);
    const double k2H = Hp + 0.5 * h * k1P, k2P = rhs(ph, H + 0.5 * h * k1H, Hp + 0.5 * h * k1P);
    const double k3H = Hp + 0.5 * h * k2P, k3P = rhs(ph, H + 0.5 * h * k2H, Hp + 0.5 * h * k2P);
    const double k4H = Hp + h * k3P, k4P = rhs(pe, H + h * k3H, Hp + h * k3P);
    H += h / 6.0 * (k1H + 2 * k2H + 2 * k3H + k4H);
    Hp += h / 6.0 * (k1P + 2 * k2P + 2 * k3P + k4P);
    if (!std::isfinite(H) || !std::isfinite(Hp) || Hp <= 0.0) return r;
    if ((k + 1) % substeps == 0) {
      r.H[(k + 1) / substeps] = H;
      r.Hp[(k + 1) / substeps] = Hp;
    }
  }
  r.ok = true;
  return r;
}

inline double top_condition(const StreamlineProfiles& prof, double g, double Q,
                            const ShotResult& r) {
  const double hp = r.Hp.back();
  return 1.0 + hp * hp * (2.0 * g * prof.rho(0.0) * r.H.back() - Q);
}

}  // namespace detail

/// Shooting on H'(p0) with a safeguarded Newton iteration inside the bracket
/// of largest slope (the deepest, subcritical branch when several exist),
/// and an outer fixed point on the nonlocal d = H(0).
inline LaminarFlow solve_laminar(const StreamlineProfiles& prof, double g, double Q, int Np,
                                 const LaminarOptions& opt = {}) {
  if (Np < 2) throw InvalidParameter("laminar: Np must be >= 2");
  if (!(g > 0.0)) throw InvalidParameter("laminar: gravity must be positive");
  auto F = [&](double s, double d, detail::ShotResult* keep) {
    auto r = detail::shoot(prof, g, d, s, Np, opt.substeps);
    if (!r.ok) return std::numeric_limits<double>::quiet_NaN();
    const double v = detail::top_condition(prof, g, Q, r);
    if (keep) *keep = std::move(r);
    return v;
  };

  double d = 0.0;
  double s_root = 0.0;
  detail::ShotResult best;
  bool have_d = false;
  int outer = 0;
  for (; outer < opt.max_outer; ++outer) {
    std::vector<double> slopes, vals;
    slopes.reserve(opt.scan_points);
    const double la = std::log(opt.s_min), lb = std::log(opt.s_max);
    for (int k = 0; k < opt.scan_points; ++k) {
      const double s = std::exp(la + (lb - la) * k / (opt.scan_points - 1));
      slopes.push_back(s);
      vals.push_back(F(s, d, nullptr));
    }
    int bracket = -1;
    for (int k = opt.scan_points - 2; k >= 0; --k) {
      if (std::isfinite(vals[k]) && std::isfinite(vals[k + 1]) &&
          (vals[k] == 0.0 || vals[k] * vals[k + 1] < 0.0)) {
        bracket = k;
        break;
      }
    }
    if (bracket < 0)
      throw NoLaminarFlow("laminar: no sign change of the top condition for H'(p0) in [" +
                              std::to_string(opt.s_min) + ", " + std::to_string(opt.s_max) +
                              "]",
                          slopes, vals);
    double a = slopes[bracket], b = slopes[bracket + 1];
    double fa = vals[bracket];
    double s = vals[bracket] == 0.0 ? a : 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      const double fs = F(s, d, nullptr);
      if (fs == 0.0 || !std::isfinite(fs)) break;
      if ((fs < 0) == (fa < 0)) { a = s; fa = fs; } else { b = s; }
      const double ds = 1e-7 * s;
      const double slope = (F(s + ds, d, nullptr) - F(s - ds, d, nullptr)) / (2 * ds);
      double next = s - fs / slope;
      if (!std::isfinite(next) || next <= a || next >= b) next = 0.5 * (a + b);
      if (std::abs(next - s) <= 1e-15 * s || b - a <= 1e-15 * s) { s = next; break; }
      s = next;
    }
    s_root = s;
    F(s_root, d, &best);
    if (best.H.empty())
      throw NoLaminarFlow("laminar: shooting broke down at the root", {s_root}, {});
    const double d_new = best.H.back();
    const bool done = have_d && std::abs(d_new - d) < opt.d_tol;
    have_d = true;
    d = d_new;
    if (done) {
      ++outer;
      break;
    }
  }
  if (outer >= opt.max_outer)
    throw NoLaminarFlow("laminar: fixed point on d = H(0) did not converge", {s_root}, {});

  LaminarFlow out;
  out.p.resize(Np);
  for (int j = 0; j < Np; ++j) out.p[j] = j == Np - 1 ? 0.0 : prof.p0() + j * (-prof.p0() / (Np - 1));
  out.H = std::move(best.H);
  out.Hp = std::move(best.Hp);
  out.H[0] = 0.0;
  out.Q = Q;
  out.g = g;
  out.d = out.H.back();
  out.bed_slope = s_root;
  out.profiles = prof;
  out.outer_iterations = outer;
  for (int j = 0; j < Np; ++j)
    if (!(out.Hp[j] > 0.0))
      throw NoLaminarFlow("laminar: H' <= 0 encountered", {s_root}, {});
  return out;
}

/// The q-independent solution of the discrete height equation on the p-nodes
/// of `grid` at fixed Q, found by Newton from `guess` (values at every p-node).
/// Uses the same stencils as the two-dimensional residual, so embedding the
/// result uniformly in q gives a discrete solution to rounding.
inline std::vector<double> discrete_laminar(const Grid& grid, const StreamlineProfiles& prof,
                                            double g, double Q, std::vector<double> H,
                                            double tol = 1e-13, int max_iter = 60,
                                            double floor_tol = 1e-10) {
  const int Np = grid.Np;
  const int n = Np - 1;  // unknowns H_1..H_{Np-1}
  if (static_cast<int>(H.size()) != Np) throw InvalidParameter("laminar: guess size mismatch");
  H[0] = 0.0;
  const double rho_top = prof.rho(0.0);
  std::vector<double> rho_p(Np), beta(Np);
  for (int j = 0; j < Np; ++j) {
    rho_p[j] = prof.rho_p(grid.p(j));
    beta[j] = prof.beta_on(grid.p(j));
  }
  auto eval = [&](const std::vector<double>& h, Eigen::VectorXd& F, Eigen::MatrixXd* J) {
    F.setZero(n);
    if (J) J->setZero(n, n);
    const double d = h[Np - 1];
    for (int j = 1; j < Np; ++j) {
      const auto wp = detail::p_first(grid, j);
      LocalJet x;
      x.h = h[j];
      for (int k = 0; k < wp.n; ++k) x.hp += wp.w[k] * h[j + wp.off[k]];
      if (x.hp <= 0.0) throw StagnationError("laminar: h_p <= 0 during polish", 0, j, x.hp);
      if (j < Np - 1) {
        const auto wpp = detail::p_second(grid, j);
        for (int k = 0; k < wpp.n; ++k) x.hpp += wpp.w[k] * h[j + wpp.off[k]];
        const auto loc = interior_local(x, d, rho_p[j], beta[j], g);
        F(j - 1) = loc.value;
        if (J) {
          for (int k = 0; k < wp.n; ++k)
            if (j + wp.off[k] >= 1) (*J)(j - 1, j + wp.off[k] - 1) += loc.d_hp * wp.w[k];
          for (int k = 0; k < wpp.n; ++k)
            if (j + wpp.off[k] >= 1) (*J)(j - 1, j + wpp.off[k] - 1) += loc.d_hpp * wpp.w[k];
          (*J)(j - 1, j - 1) += loc.d_h;
          (*J)(j - 1, n - 1) += loc.d_d;
        }
      } else {
        const auto loc = top_local(x, rho_top, g, Q);
        F(n - 1) = loc.value;
        if (J) {
          for (int k = 0; k < wp.n; ++k)
            if (j + wp.off[k] >= 1) (*J)(n - 1, j + wp.off[k] - 1) += loc.d_hp * wp.w[k];
          (*J)(n - 1, n - 1) += loc.d_h;
        }
      }
    }
  };
  Eigen::VectorXd F;
  Eigen::MatrixXd J;
  std::vector<double> history;
  for (int it = 0; it < max_iter; ++it) {
    eval(H, F, &J);
    const double res = F.lpNorm<Eigen::Infinity>();
    history.push_back(res);
    if (res < tol) return H;
    // Rounding floor: the residual is below the solver tolerance and Newton
    // no longer reduces it.
    const std::size_t k = history.size();
    if (k >= 3 && res < floor_tol && res > 0.5 * history[k - 3]) return H;
    Eigen::VectorXd step = J.partialPivLu().solve(F);
    double t = 1.0;
    for (int half = 0; half <= 10; ++half, t *= 0.5) {
      std::vector<double> trial = H;
      for (int k = 0; k < n; ++k) trial[k + 1] -= t * step(k);
      try {
        Eigen::VectorXd Ft;
        eval(trial, Ft, nullptr);
        if (Ft.lpNorm<Eigen::Infinity>() < res || half == 10) {
          H = std::move(trial);
          break;
        }
      } catch (const StagnationError&) {
        if (half == 10) throw;
      }
    }
  }
  throw DivergenceError("laminar: discrete polish did not converge", history);
}

}  // namespace stratwave
