#pragma once

// Newton solver for the discrete height equation with amplitude pinning by
// the first cosine Fourier coefficient of the surface, Q and d as unknowns,
// and amplitude continuation from the bifurcation point on the laminar family.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/height_equation.hpp"
#include "stratwave/laminar.hpp"
#include "stratwave/profiles.hpp"

namespace stratwave {

struct SolveStats {
  int iterations = 0;
  std::vector<double> residual_history;
  double phase_multiplier = 0.0;  // zero for waves symmetric about q = 0
};

struct WaveSolution {
  ScalarField h;
  double Q = 0.0;
  double g = 0.0;
  double d = 0.0;  // mean of h(., 0)
  StreamlineProfiles profiles;
  SolveStats stats;

  const Grid& grid() const { return h.grid(); }
  std::vector<double> eta() const {
    auto top = h.row(grid().top());
    for (double& v : top) v -= d;
    return top;
  }
};

/// Mean depth d(h): the average of h over the surface row.
inline double mean_depth(const ScalarField& h) { return row_mean(h, h.grid().top()); }

inline WaveSolution make_solution(ScalarField h, double Q, double g,
                                  const StreamlineProfiles& prof) {
  WaveSolution s;
  s.d = mean_depth(h);
  s.h = std::move(h);
  s.Q = Q;
  s.g = g;
  s.profiles = prof;
  return s;
}

/// Throws StagnationError at the first node with h_p <= 0.
inline void require_no_stagnation(const ScalarField& h) {
  const Grid& g = h.grid();
  for (int i = 0; i < g.Nq; ++i)
    for (int j = 0; j < g.Np; ++j) {
      const double hp = derivative_at(h, Deriv::p, i, j);
      if (!(hp > 0.0))
        throw StagnationError("stagnation: h_p = " + std::to_string(hp) + " at node (" +
                                  std::to_string(i) + ", " + std::to_string(j) + ")",
                              i, j, hp);
    }
}

inline LocalJet jet_at(const ScalarField& h, int i, int j) {
  return {derivative_at(h, Deriv::q, i, j),  derivative_at(h, Deriv::p, i, j),
          derivative_at(h, Deriv::qq, i, j), derivative_at(h, Deriv::pp, i, j),
          derivative_at(h, Deriv::qp, i, j), h(i, j)};
}

struct WaveResidual {
  ScalarField interior;       // zero on the rows j = 0 and j = Np-1
  std::vector<double> top;    // surface condition per q-node
  std::vector<double> bottom; // h on the bed per q-node
  double sup_norm() const {
    double m = interior.sup_abs();
    for (double v : top) m = std::max(m, std::abs(v));
    for (double v : bottom) m = std::max(m, std::abs(v));
    return m;
  }
};

inline WaveResidual residual(const ScalarField& h, double Q, const StreamlineProfiles& prof,
                             double g) {
  require_no_stagnation(h);
  const Grid& G = h.grid();
  const double d = mean_depth(h);
  const double rho_top = prof.rho(0.0);
  WaveResidual r{ScalarField(G), std::vector<double>(G.Nq), std::vector<double>(G.Nq)};
  for (int j = 1; j < G.Np - 1; ++j) {
    const double p = G.p(j);
    const double rho_p = prof.rho_p(p), beta = prof.beta_on(p);
    for (int i = 0; i < G.Nq; ++i)
      r.interior(i, j) = interior_local(jet_at(h, i, j), d, rho_p, beta, g).value;
  }
  for (int i = 0; i < G.Nq; ++i) {
    r.top[i] = top_local(jet_at(h, i, G.top()), rho_top, g, Q).value;
    r.bottom[i] = h(i, 0);
  }
  return r;
}

/// (2/Nq) sum_i eta_i cos(2 pi q_i / L).
inline double first_cosine_coefficient(const ScalarField& h) {
  const Grid& G = h.grid();
  const double kappa = 2.0 * std::numbers::pi / G.L;
  double acc = 0.0;
  for (int i = 0; i < G.Nq; ++i) acc += h(i, G.top()) * std::cos(kappa * G.q(i));
  return 2.0 * acc / G.Nq;
}

struct SolverParams {
  double tol_solve = 1e-10;
  double tol_step = 1e-11;
  int max_iter = 50;
  int max_halvings = 10;
};

namespace detail {

// Unknowns: h at every node with j >= 1, then Q, d and a multiplier mu.
// Rows: the equations at those nodes (each with mu * h_q added), the cosine
// pinning, the definition of d, and the phase condition that the first sine
// coefficient of the surface vanishes. Translation in q maps solutions to
// solutions, and for an even wave the generator h_q is odd, so the cosine
// pinning alone leaves the Jacobian singular. The phase condition removes
// that direction; mu unfolds it and is zero at every even solution because
// the residual of an even field is even while mu * h_q is odd.
class HeightSystem {
public:
  HeightSystem(const Grid& grid, const StreamlineProfiles& prof, double g, double amplitude)
      : G_(grid), g_(g), amp_(amplitude),
        n_nodes_(static_cast<int>(grid.Nq) * (grid.Np - 1)) {
    rho_p_.resize(G_.Np);
    beta_.resize(G_.Np);
    for (int j = 0; j < G_.Np; ++j) {
      rho_p_[j] = prof.rho_p(G_.p(j));
      beta_[j] = prof.beta_on(G_.p(j));
    }
    rho_top_ = prof.rho(0.0);
    const double kappa = 2.0 * std::numbers::pi / G_.L;
    cosines_.resize(G_.Nq);
    sines_.resize(G_.Nq);
    for (int i = 0; i < G_.Nq; ++i) {
      cosines_[i] = std::cos(kappa * G_.q(i));
      sines_[i] = std::sin(kappa * G_.q(i));
    }
  }

  int size() const { return n_nodes_ + 3; }
  int col(int i, int j) const { return G_.wrap(i) * (G_.Np - 1) + (j - 1); }
  int colQ() const { return n_nodes_; }
  int colD() const { return n_nodes_ + 1; }
  int colMu() const { return n_nodes_ + 2; }

  Eigen::VectorXd pack(const ScalarField& h, double Q, double d) const {
    Eigen::VectorXd x(size());
    for (int i = 0; i < G_.Nq; ++i)
      for (int j = 1; j < G_.Np; ++j) x(col(i, j)) = h(i, j);
    x(colQ()) = Q;
    x(colD()) = d;
    x(colMu()) = 0.0;
    return x;
  }
  ScalarField unpack(const Eigen::VectorXd& x) const {
    ScalarField h(G_);
    for (int i = 0; i < G_.Nq; ++i)
      for (int j = 1; j < G_.Np; ++j) h(i, j) = x(col(i, j));
    return h;
  }

  // A q-independent field has h_q = 0 exactly; the phase row then fixes mu.
  static bool flat(const ScalarField& h) {
    const Grid& G = h.grid();
    for (int i = 0; i < G.Nq; ++i)
      if (h(i, G.top()) != h(0, G.top())) return false;
    return true;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    const ScalarField h = unpack(x);
    require_no_stagnation(h);
    const double Q = x(colQ()), d = x(colD()), mu = x(colMu());
    Eigen::VectorXd F(size());
    double top_sum = 0.0, cos_sum = 0.0, sin_sum = 0.0;
    for (int i = 0; i < G_.Nq; ++i) {
      for (int j = 1; j < G_.Np - 1; ++j) {
        const LocalJet jet = jet_at(h, i, j);
        F(col(i, j)) = interior_local(jet, d, rho_p_[j], beta_[j], g_).value + mu * jet.hq;
      }
      const LocalJet jet = jet_at(h, i, G_.top());
      F(col(i, G_.top())) = top_local(jet, rho_top_, g_, Q).value + mu * jet.hq;
      top_sum += h(i, G_.top());
      cos_sum += cosines_[i] * h(i, G_.top());
      sin_sum += sines_[i] * h(i, G_.top());
    }
    F(colQ()) = 2.0 * cos_sum / G_.Nq - amp_;
    F(colD()) = d - top_sum / G_.Nq;
    F(colMu()) = flat(h) ? mu : 2.0 * sin_sum / G_.Nq;
    return F;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x) const {
    const ScalarField h = unpack(x);
    const double Q = x(colQ()), d = x(colD()), mu = x(colMu());
    const bool is_flat = flat(h);
    std::vector<Eigen::Triplet<double>> T;
    T.reserve(static_cast<std::size_t>(size()) * 26);
    auto add_stencil = [&](int row, Deriv which, int i, int j, double coef) {
      if (coef == 0.0) return;
      for (const Tap& t : stencil(G_, which, i, j))
        if (t.j >= 1) T.emplace_back(row, col(t.i, t.j), coef * t.w);
    };
    for (int i = 0; i < G_.Nq; ++i) {
      for (int j = 1; j < G_.Np - 1; ++j) {
        const int row = col(i, j);
        const LocalJet jet = jet_at(h, i, j);
        const auto loc = interior_local(jet, d, rho_p_[j], beta_[j], g_);
        add_stencil(row, Deriv::q, i, j, loc.d_hq + mu);
        add_stencil(row, Deriv::p, i, j, loc.d_hp);
        add_stencil(row, Deriv::qq, i, j, loc.d_hqq);
        add_stencil(row, Deriv::pp, i, j, loc.d_hpp);
        add_stencil(row, Deriv::qp, i, j, loc.d_hqp);
        T.emplace_back(row, row, loc.d_h);
        T.emplace_back(row, colD(), loc.d_d);
        if (jet.hq != 0.0) T.emplace_back(row, colMu(), jet.hq);
      }
      const int j = G_.top();
      const int row = col(i, j);
      const LocalJet jet = jet_at(h, i, j);
      const auto loc = top_local(jet, rho_top_, g_, Q);
      add_stencil(row, Deriv::q, i, j, loc.d_hq + mu);
      add_stencil(row, Deriv::p, i, j, loc.d_hp);
      T.emplace_back(row, row, loc.d_h);
      T.emplace_back(row, colQ(), loc.d_Q);
      if (jet.hq != 0.0) T.emplace_back(row, colMu(), jet.hq);
      T.emplace_back(colQ(), row, 2.0 * cosines_[i] / G_.Nq);
      T.emplace_back(colD(), row, -1.0 / G_.Nq);
      if (!is_flat) T.emplace_back(colMu(), row, 2.0 * sines_[i] / G_.Nq);
    }
    T.emplace_back(colD(), colD(), 1.0);
    if (is_flat) T.emplace_back(colMu(), colMu(), 1.0);
    Eigen::SparseMatrix<double> J(size(), size());
    J.setFromTriplets(T.begin(), T.end());
    return J;
  }

private:
  Grid G_;
  double g_;
  double amp_;
  int n_nodes_;
  std::vector<double> rho_p_, beta_, cosines_, sines_;
  double rho_top_ = 1.0;
};

}  // namespace detail

/// Damped Newton on (h, Q, d, mu) with the first cosine coefficient of the
/// surface pinned to `amplitude`. Backtracking halves the step (up to
/// params.max_halvings times) until the sup-norm residual decreases.
inline WaveSolution newton_solve(const WaveSolution& initial, double amplitude,
                                 const SolverParams& params = {}) {
  if (!(amplitude >= 0.0)) throw InvalidParameter("newton: amplitude must be >= 0");
  const Grid& G = initial.grid();
  require_no_stagnation(initial.h);
  detail::HeightSystem sys(G, initial.profiles, initial.g, amplitude);
  Eigen::VectorXd x = sys.pack(initial.h, initial.Q, mean_depth(initial.h));
  Eigen::VectorXd F = sys.residual(x);
  double res = F.lpNorm<Eigen::Infinity>();
  std::vector<double> history{res};

  auto finish = [&](int iterations) {
    WaveSolution s = make_solution(sys.unpack(x), x(sys.colQ()), initial.g, initial.profiles);
    s.stats.iterations = iterations;
    s.stats.residual_history = history;
    s.stats.phase_multiplier = x(sys.colMu());
    return s;
  };
  if (res < params.tol_solve) return finish(0);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  for (int it = 1; it <= params.max_iter; ++it) {
    const auto J = sys.jacobian(x);
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw DivergenceError("newton: singular Jacobian at iteration " + std::to_string(it),
                            history, amplitude);
    const Eigen::VectorXd delta = lu.solve(F);
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_trial, F_trial;
    double res_trial = 0.0;
    for (int half = 0; half <= params.max_halvings; ++half, t *= 0.5) {
      x_trial = x - t * delta;
      try {
        F_trial = sys.residual(x_trial);
      } catch (const StagnationError&) {
        continue;
      }
      res_trial = F_trial.lpNorm<Eigen::Infinity>();
      if (res_trial < res) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Already inside tolerance: the remaining step is rounding noise.
      if (res < params.tol_solve) return finish(it - 1);
      throw DivergenceError("newton: line search failed at iteration " + std::to_string(it),
                            history, amplitude);
    }
    const double step = t * delta.lpNorm<Eigen::Infinity>();
    x = std::move(x_trial);
    F = std::move(F_trial);
    res = res_trial;
    history.push_back(res);
    if (res < params.tol_solve && step < params.tol_step) return finish(it);
  }
  if (res < params.tol_solve) return finish(params.max_iter);
  throw DivergenceError("newton: no convergence after " + std::to_string(params.max_iter) +
                            " iterations",
                        history, amplitude);
}

/// Embeds a laminar flow uniformly in q after polishing it to the discrete
/// laminar equations on the grid's p-nodes (same stencils as the 2D residual).
inline WaveSolution embed_laminar(const LaminarFlow& lam, const Grid& grid) {
  if (std::abs(grid.p0 - lam.profiles.p0()) > 1e-14 * std::abs(grid.p0))
    throw InvalidParameter("embed: grid flux differs from the profiles' flux");
  std::vector<double> guess(grid.Np);
  // Cubic interpolation of the integrator output onto the grid's p-nodes.
  const int n = static_cast<int>(lam.p.size());
  for (int j = 0; j < grid.Np; ++j) {
    const double p = grid.p(j);
    const double s = (p - lam.p.front()) / (lam.p.back() - lam.p.front()) * (n - 1);
    int base = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, std::max(0, n - 4));
    const int m = std::min(4, n);
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
      double w = 1.0;
      for (int b = 0; b < m; ++b)
        if (b != a) w *= (s - (base + b)) / static_cast<double>(a - b);
      acc += w * lam.H[base + a];
    }
    guess[j] = acc;
  }
  auto H = discrete_laminar(grid, lam.profiles, lam.g, lam.Q, std::move(guess));
  ScalarField h(grid);
  for (int i = 0; i < grid.Nq; ++i)
    for (int j = 0; j < grid.Np; ++j) h(i, j) = H[j];
  return make_solution(std::move(h), lam.Q, lam.g, lam.profiles);
}

struct Bifurcation {
  WaveSolution laminar;     // discrete laminar flow at the bifurcation value of Q
  std::vector<double> mode; // p-profile of the cos(2 pi q / L) kernel, mode[top] = 1
  double Q = 0.0;
  int iterations = 0;
};

namespace detail {

// Linearization of the discrete equations about a laminar column, restricted
// to perturbations phi(p) cos(kappa q). Solves the interior rows with
// phi(top) = 1 and returns the linearized surface condition (zero exactly at
// a bifurcation point) together with phi.
inline double mode_condition(const Grid& G, const StreamlineProfiles& prof, double g, double Q,
                             const std::vector<double>& H, std::vector<double>* phi_out) {
  const int Np = G.Np, n = Np - 1;
  const double kappa = 2.0 * std::numbers::pi / G.L;
  const double sym_qq = -(2.0 - 2.0 * std::cos(kappa * G.dq)) / (G.dq * G.dq);
  const double d = H[Np - 1];
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  Eigen::RowVectorXd top_row = Eigen::RowVectorXd::Zero(n);
  for (int j = 1; j < Np; ++j) {
    const auto wp = p_first(G, j);
    LocalJet x;
    x.h = H[j];
    for (int k = 0; k < wp.n; ++k) x.hp += wp.w[k] * H[j + wp.off[k]];
    if (j < Np - 1) {
      const auto wpp = p_second(G, j);
      for (int k = 0; k < wpp.n; ++k) x.hpp += wpp.w[k] * H[j + wpp.off[k]];
      const auto loc = interior_local(x, d, prof.rho_p(G.p(j)), prof.beta_on(G.p(j)), g);
      for (int k = 0; k < wp.n; ++k)
        if (j + wp.off[k] >= 1) A(j - 1, j + wp.off[k] - 1) += loc.d_hp * wp.w[k];
      for (int k = 0; k < wpp.n; ++k)
        if (j + wpp.off[k] >= 1) A(j - 1, j + wpp.off[k] - 1) += loc.d_hpp * wpp.w[k];
      A(j - 1, j - 1) += loc.d_h + loc.d_hqq * sym_qq;
    } else {
      const auto loc = top_local(x, prof.rho(0.0), g, Q);
      for (int k = 0; k < wp.n; ++k)
        if (j + wp.off[k] >= 1) top_row(j + wp.off[k] - 1) += loc.d_hp * wp.w[k];
      top_row(n - 1) += loc.d_h;
    }
  }
  A.row(n - 1).setZero();
  A(n - 1, n - 1) = 1.0;
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd phi = A.partialPivLu().solve(rhs);
  if (phi_out) {
    phi_out->assign(Np, 0.0);
    for (int k = 0; k < n; ++k) (*phi_out)[k + 1] = phi(k);
  }
  return top_row.dot(phi);
}

}  // namespace detail

/// Locates the value of Q on the laminar family through `seed` at which the
/// first q-mode becomes neutral, i.e. where waves of period L bifurcate.
inline Bifurcation find_bifurcation(const LaminarFlow& seed, const Grid& grid,
                                    int max_iter = 100) {
  WaveSolution lam = embed_laminar(seed, grid);
  std::vector<double> H(grid.Np);
  for (int j = 0; j < grid.Np; ++j) H[j] = lam.h(0, j);
  const auto& prof = seed.profiles;
  const double g = seed.g;
  double Q = seed.Q;
  auto condition = [&](double q, std::vector<double>& Hq, std::vector<double>* phi) {
    Hq = discrete_laminar(grid, prof, g, q, Hq);
    return detail::mode_condition(grid, prof, g, q, Hq, phi);
  };
  // Forward difference in Q, falling back to a backward one when the laminar
  // family ends just above Q.
  auto slope = [&](double f0) {
    const double dQ = 1e-7 * std::max(1.0, std::abs(Q));
    std::vector<double> Hd = H;
    try {
      return (condition(Q + dQ, Hd, nullptr) - f0) / dQ;
    } catch (const Error&) {
      Hd = H;
      return (f0 - condition(Q - dQ, Hd, nullptr)) / dQ;
    }
  };
  double f = condition(Q, H, nullptr);
  int it = 0;
  for (; it < max_iter; ++it) {
    double step = -f / slope(f);
    if (!std::isfinite(step)) throw DivergenceError("bifurcation: flat mode condition", {f});
    const double cap = 0.1 * std::max(1.0, std::abs(Q));
    step = std::clamp(step, -cap, cap);
    bool moved = false;
    for (int half = 0; half < 30; ++half, step *= 0.5) {
      std::vector<double> Ht = H;
      try {
        const double ft = condition(Q + step, Ht, nullptr);
        if (std::abs(ft) < std::abs(f) || half == 29) {
          Q += step;
          H = std::move(Ht);
          f = ft;
          moved = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!moved) throw DivergenceError("bifurcation: could not reduce the mode condition", {f});
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(Q))) break;
  }
  Bifurcation b;
  b.iterations = it;
  b.Q = Q;
  condition(Q, H, &b.mode);
  ScalarField h(grid);
  for (int i = 0; i < grid.Nq; ++i)
    for (int j = 0; j < grid.Np; ++j) h(i, j) = H[j];
  b.laminar = make_solution(std::move(h), Q, g, prof);
  return b;
}

/// Amplitude continuation: locate the bifurcation point on the laminar family
/// through `laminar`, then step the pinned amplitude linearly to the target.
/// The first step is predicted along the neutral mode, later ones by secant.
inline WaveSolution continue_from_laminar(const LaminarFlow& laminar, const Grid& grid,
                                          double target_amplitude, int steps,
                                          const SolverParams& params = {}) {
  if (steps < 1) throw InvalidParameter("continuation: steps must be >= 1");
  if (target_amplitude == 0.0) return embed_laminar(laminar, grid);
  const Bifurcation bif = find_bifurcation(laminar, grid);
  const double kappa = 2.0 * std::numbers::pi / grid.L;

  WaveSolution prev = bif.laminar;
  std::optional<WaveSolution> prev2;
  double a_prev = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double a = target_amplitude * k / steps;
    WaveSolution guess = prev;
    if (!prev2) {
      for (int i = 0; i < grid.Nq; ++i)
        for (int j = 0; j < grid.Np; ++j)
          guess.h(i, j) += (a - a_prev) * bif.mode[j] * std::cos(kappa * grid.q(i));
    } else {
      guess.h = prev.h + prev.h - prev2->h;
      guess.Q = 2.0 * prev.Q - prev2->Q;
    }
    try {
      prev2 = prev;
      prev = newton_solve(guess, a, params);
    } catch (DivergenceError& e) {
      e.amplitude = a;
      throw;
    } catch (const StagnationError&) {
      throw DivergenceError("continuation: predictor stagnates at amplitude " + std::to_string(a),
                            {}, a);
    }
    a_prev = a;
  }
  return prev;
}

}  // namespace stratwave
