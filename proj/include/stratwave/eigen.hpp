#pragma once

// Second-order difference operators on the rectangle with Dirichlet data on
// all four sides, their principal eigenvalue, and the lower bounds built on it.
//
// Sign convention: lambda1(L) is the eigenvalue of -L with the smallest real
// part, so the maximum principle holds for L exactly when lambda1 > 0.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/profiles.hpp"
#include "stratwave/wave_solver.hpp"

namespace stratwave {

/// L u = a_qq u_qq + a_pp u_pp + a_qp u_qp + b_q u_q + b_p u_p + c u.
/// Rows exist at the interior nodes i = 1..Nq-1, j = 1..Np-2; the column
/// i = 0 and the rows j = 0, Np-1 carry the Dirichlet data.
struct DiscreteOperator {
  Grid grid;
  ScalarField a_qq, a_pp, a_qp, b_q, b_p, c;

  explicit DiscreteOperator(const Grid& g = Grid{})
      : grid(g), a_qq(g), a_pp(g), a_qp(g), b_q(g), b_p(g), c(g) {}

  int nq_interior() const { return grid.Nq - 1; }
  int np_interior() const { return grid.Np - 2; }
  int interior_count() const { return nq_interior() * np_interior(); }
  int interior_index(int i, int j) const { return (i - 1) * np_interior() + (j - 1); }
  bool is_boundary(int i, int j) const {
    return grid.wrap(i) == 0 || j <= 0 || j >= grid.Np - 1;
  }
  bool has_zeroth_order() const { return c.sup_abs() != 0.0; }

  template <class F>
  void for_interior(F&& f) const {
    for (int i = 1; i < grid.Nq; ++i)
      for (int j = 1; j < grid.Np - 1; ++j) f(i, j);
  }
};

inline DiscreteOperator laplacian(const Grid& grid) {
  DiscreteOperator op(grid);
  op.a_qq = ScalarField(grid, 1.0);
  op.a_pp = ScalarField(grid, 1.0);
  return op;
}

namespace detail {

// Taps of L at an interior node, with coefficients folded in.
template <class Emit>
void operator_taps(const DiscreteOperator& op, int i, int j, Emit&& emit) {
  const Grid& g = op.grid;
  auto add = [&](Deriv which, double coef) {
    if (coef == 0.0) return;
    for (const Tap& t : stencil(g, which, i, j)) emit(t.i, t.j, coef * t.w);
  };
  add(Deriv::qq, op.a_qq(i, j));
  add(Deriv::pp, op.a_pp(i, j));
  add(Deriv::qp, op.a_qp(i, j));
  add(Deriv::q, op.b_q(i, j));
  add(Deriv::p, op.b_p(i, j));
  if (op.c(i, j) != 0.0) emit(i, j, op.c(i, j));
}

}  // namespace detail

/// (L u) at the interior nodes, using the boundary values of u as Dirichlet
/// data. Boundary entries of the result are zero.
inline ScalarField apply(const DiscreteOperator& op, const ScalarField& u) {
  ScalarField out(op.grid);
  op.for_interior([&](int i, int j) {
    double acc = 0.0;
    detail::operator_taps(op, i, j, [&](int ti, int tj, double w) { acc += w * u(ti, tj); });
    out(i, j) = acc;
  });
  return out;
}

/// Matrix of -L on the interior nodes with zero Dirichlet data.
inline Eigen::SparseMatrix<double> minus_L_matrix(const DiscreteOperator& op) {
  std::vector<Eigen::Triplet<double>> T;
  T.reserve(static_cast<std::size_t>(op.interior_count()) * 10);
  op.for_interior([&](int i, int j) {
    const int row = op.interior_index(i, j);
    detail::operator_taps(op, i, j, [&](int ti, int tj, double w) {
      if (!op.is_boundary(ti, tj))
        T.emplace_back(row, op.interior_index(op.grid.wrap(ti), tj), -w);
    });
  });
  Eigen::SparseMatrix<double> A(op.interior_count(), op.interior_count());
  A.setFromTriplets(T.begin(), T.end());
  return A;
}

inline Eigen::MatrixXd minus_L_dense(const DiscreteOperator& op) {
  return Eigen::MatrixXd(minus_L_matrix(op));
}

/// Smallest eigenvalue of the symbol [[a_qq, a_qp/2], [a_qp/2, a_pp]] over
/// the interior nodes.
inline double ellipticity_floor(const DiscreteOperator& op) {
  double m = std::numeric_limits<double>::infinity();
  op.for_interior([&](int i, int j) {
    const double a = op.a_qq(i, j), d = op.a_pp(i, j), b = 0.5 * op.a_qp(i, j);
    const double mean = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
    m = std::min(m, mean - rad);
  });
  return m;
}

/// sup of sqrt(b_q^2 + b_p^2) over the interior nodes, or over every node.
inline double drift_sup(const DiscreteOperator& op, bool include_boundary = false) {
  double m = 0.0;
  const Grid& g = op.grid;
  for (int i = 0; i < g.Nq; ++i)
    for (int j = 0; j < g.Np; ++j)
      if (include_boundary || !op.is_boundary(i, j))
        m = std::max(m, std::hypot(op.b_q(i, j), op.b_p(i, j)));
  return m;
}

/// Which parts of the difference operator to keep.
enum class Truncation {
  full,               // L
  drop_zeroth,        // L0: no zeroth-order term
  drop_stratified,    // L1: rho_p set to zero (no zeroth order, no rho_p drift)
  principal_part      // L2: second-order terms only
};

/// Operator satisfied by h - h_tilde when both solve the height equation with
/// the same Q and mean depth.
inline DiscreteOperator assemble_L(const ScalarField& h, const ScalarField& ht,
                                   const StreamlineProfiles& prof, double g,
                                   Truncation trunc = Truncation::full) {
  if (!(h.grid() == ht.grid())) throw InvalidParameter("assemble_L: fields on different grids");
  const Grid& G = h.grid();
  const auto D = all_derivatives(h);
  const auto Dt = all_derivatives(ht);
  const double dt = mean_depth(ht);
  DiscreteOperator op(G);
  for (int i = 0; i < G.Nq; ++i)
    for (int j = 0; j < G.Np; ++j) {
      const double hp = D.p(i, j), thp = Dt.p(i, j);
      if (!(hp > 0.0)) throw StagnationError("assemble_L: h_p <= 0", i, j, hp);
      if (!(thp > 0.0)) throw StagnationError("assemble_L: tilde h_p <= 0", i, j, thp);
      const double hq = D.q(i, j);
      const double inv3 = 1.0 / (hp * hp * hp);
      const double p = G.p(j);
      const double rho_p = prof.rho_p(p);
      const double quad = hp * hp + hp * thp + thp * thp;
      op.a_pp(i, j) = (1.0 + hq * hq) * inv3;
      op.a_qq(i, j) = 1.0 / hp;
      op.a_qp(i, j) = -2.0 * hq / (hp * hp);
      if (trunc == Truncation::principal_part) continue;
      double bp = Dt.qq(i, j) * (hp + thp) - 2.0 * Dt.q(i, j) * Dt.qp(i, j) +
                  prof.beta_on(p) * quad;
      if (trunc != Truncation::drop_stratified) bp -= g * rho_p * (ht(i, j) - dt) * quad;
      op.b_p(i, j) = bp * inv3;
      op.b_q(i, j) = (Dt.pp(i, j) * (hq + Dt.q(i, j)) - 2.0 * hp * Dt.qp(i, j)) * inv3;
      if (trunc == Truncation::full) op.c(i, j) = -g * rho_p;
    }
  return op;
}

/// Coefficient fields in the order a_qq, a_pp, a_qp, b_q, b_p, c, each in the
/// binary field format.
inline void write_operator(std::ostream& os, const DiscreteOperator& op) {
  for (const ScalarField* f : {&op.a_qq, &op.a_pp, &op.a_qp, &op.b_q, &op.b_p, &op.c})
    write_field_binary(os, *f);
}

inline DiscreteOperator read_operator(std::istream& is) {
  DiscreteOperator op;
  op.a_qq = read_field_binary(is);
  op.grid = op.a_qq.grid();
  for (ScalarField* f : {&op.a_pp, &op.a_qp, &op.b_q, &op.b_p, &op.c}) {
    *f = read_field_binary(is);
    if (!(f->grid() == op.grid)) throw InvalidParameter("operator dump: grid mismatch");
  }
  return op;
}

enum class EigenMethod { dense, inverse_iteration };

inline const char* to_string(EigenMethod m) {
  return m == EigenMethod::dense ? "dense" : "inverse-iteration";
}

struct EigenEstimate {
  double lambda1 = 0.0;
  ScalarField eigenvector;  // zero on the boundary, max 1, positive inside
  EigenMethod method = EigenMethod::dense;
  double residual = 0.0;    // ||(-L - lambda1) phi||_inf / ||phi||_inf
  int iterations = 0;
};

struct EigenOptions {
  int dense_limit = 2500;
  double imag_tol = 1e-8;
  double residual_tol = 1e-8;
  int max_iter = 5000;
};

namespace detail {

inline ScalarField embed_interior(const DiscreteOperator& op, const Eigen::VectorXd& x) {
  ScalarField out(op.grid);
  op.for_interior([&](int i, int j) { out(i, j) = x(op.interior_index(i, j)); });
  return out;
}

inline Eigen::VectorXd restrict_interior(const DiscreteOperator& op, const ScalarField& f) {
  Eigen::VectorXd x(op.interior_count());
  op.for_interior([&](int i, int j) { x(op.interior_index(i, j)) = f(i, j); });
  return x;
}

inline void require_positive(const Eigen::VectorXd& phi, const char* where) {
  for (Eigen::Index k = 0; k < phi.size(); ++k)
    if (!(phi(k) > 0.0))
      throw PerronFailure(std::string(where) + ": principal eigenvector changes sign");
}

inline double eigen_residual(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& phi,
                             double lambda) {
  return (A * phi - lambda * phi).lpNorm<Eigen::Infinity>() / phi.lpNorm<Eigen::Infinity>();
}

}  // namespace detail

/// Values-only dense eigensolve: smallest real part over the spectrum of -L.
inline double dense_lambda1(const DiscreteOperator& op) {
  const Eigen::MatrixXd A = minus_L_dense(op);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw PerronFailure("dense eigensolve failed");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    best = std::min(best, es.eigenvalues()(k).real());
  return best;
}

inline EigenEstimate principal_eigenvalue_dense(const DiscreteOperator& op,
                                                const EigenOptions& opt = {}) {
  const auto As = minus_L_matrix(op);
  const Eigen::MatrixXd A(As);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) throw PerronFailure("dense eigensolve failed");
  Eigen::Index arg = 0;
  for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k).real() < es.eigenvalues()(arg).real()) arg = k;
  const std::complex<double> lam = es.eigenvalues()(arg);
  if (std::abs(lam.imag()) > opt.imag_tol * (1.0 + std::abs(lam.real())))
    throw PerronFailure("principal eigenvalue is complex: " + std::to_string(lam.real()) +
                        " + " + std::to_string(lam.imag()) + "i");
  Eigen::VectorXd phi = es.eigenvectors().col(arg).real();
  if (phi.sum() < 0) phi = -phi;
  phi /= phi.lpNorm<Eigen::Infinity>();
  detail::require_positive(phi, "dense");
  EigenEstimate e;
  e.lambda1 = lam.real();
  e.method = EigenMethod::dense;
  e.residual = detail::eigen_residual(As, phi, e.lambda1);
  e.eigenvector = detail::embed_interior(op, phi);
  return e;
}

/// Shifted inverse iteration from the all-ones vector. The first shift is a
/// Gershgorin lower bound for the spectrum; once the Rayleigh estimate has
/// settled the shift is moved just below it.
inline EigenEstimate principal_eigenvalue_iterative(const DiscreteOperator& op,
                                                    const EigenOptions& opt = {}) {
  const auto A = minus_L_matrix(op);
  const Eigen::Index n = A.rows();
  double gersh = std::numeric_limits<double>::infinity();
  {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
        if (it.row() == it.col()) diag(it.row()) += it.value();
        else off(it.row()) += std::abs(it.value());
      }
    for (Eigen::Index k = 0; k < n; ++k) gersh = std::min(gersh, diag(k) - off(k));
  }
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  double shift = gersh - 1.0;
  auto factor = [&](double s) {
    lu.compute(A - s * I);
    if (lu.info() != Eigen::Success) throw PerronFailure("inverse iteration: singular shift");
  };
  factor(shift);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double lambda = shift, res = std::numeric_limits<double>::infinity();
  int reshifts = 0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Eigen::VectorXd y = lu.solve(x);
    if (y.sum() < 0) y = -y;
    x = y / y.lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd Ax = A * x;
    lambda = x.dot(Ax) / x.dot(x);
    res = (Ax - lambda * x).lpNorm<Eigen::Infinity>();
    if (res <= 0.1 * opt.residual_tol) break;
    const double scale = 1.0 + std::abs(lambda);
    if (reshifts < 3 && res < 1e-2 * scale && lambda - shift > 1e-3 * scale) {
      shift = lambda - 1e-3 * scale;
      factor(shift);
      ++reshifts;
    }
  }
  if (!(res <= opt.residual_tol))
    throw PerronFailure("inverse iteration did not converge (residual " + std::to_string(res) +
                        ")");
  detail::require_positive(x, "inverse iteration");
  EigenEstimate e;
  e.lambda1 = lambda;
  e.method = EigenMethod::inverse_iteration;
  e.residual = res;
  e.iterations = it + 1;
  e.eigenvector = detail::embed_interior(op, x);
  return e;
}

inline EigenEstimate principal_eigenvalue(const DiscreteOperator& op,
                                          const EigenOptions& opt = {}) {
  if (op.interior_count() <= opt.dense_limit) return principal_eigenvalue_dense(op, opt);
  return principal_eigenvalue_iterative(op, opt);
}

/// inf over interior nodes of (-L phi)/phi.
inline double pw_lower_bound(const DiscreteOperator& op, const ScalarField& phi) {
  if (!(phi.grid() == op.grid)) throw InvalidParameter("pw bound: grid mismatch");
  const auto Lphi = apply(op, phi);
  double m = std::numeric_limits<double>::infinity();
  op.for_interior([&](int i, int j) {
    if (!(phi(i, j) > 0.0))
      throw InvalidParameter("pw bound: test function must be positive at interior nodes");
    m = std::min(m, -Lphi(i, j) / phi(i, j));
  });
  return m;
}

/// Positive root of a0 s^2 - b s - b = 1.
inline double sigma_root(double a0, double b) {
  if (!(a0 > 0.0)) throw InvalidParameter("sigma: a0 must be positive");
  if (!(b >= 0.0)) throw InvalidParameter("sigma: b must be nonnegative");
  return (b + std::sqrt(b * b + 4.0 * a0 * (1.0 + b))) / (2.0 * a0);
}

/// exp(-sigma min(L, |p0|)) with a0 the ellipticity floor and b the drift sup.
inline double bnv_exp_bound(const DiscreteOperator& op) {
  if (op.has_zeroth_order())
    throw MisuseError("bnv bound applies to operators without zeroth-order term; "
                      "remove it first and account for it by Lipschitz continuity");
  const double s = sigma_root(ellipticity_floor(op), drift_sup(op));
  return std::exp(-s * std::min(op.grid.L, std::abs(op.grid.p0)));
}

enum class PerturbationKind { identical, drift, zeroth_order };

inline const char* to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::identical: return "identical";
    case PerturbationKind::drift: return "drift";
    case PerturbationKind::zeroth_order: return "zeroth-order";
  }
  return "";
}

struct PerturbationReport {
  PerturbationKind kind = PerturbationKind::identical;
  double lambda = 0.0;        // lambda1(op)
  double lambda_prime = 0.0;  // lambda1(op')
  double delta = 0.0;         // sup |b' - b| or sup |c' - c|
  double b = 0.0;             // max drift sup of op and op' (drift case)
  double a0 = 0.0;
  double lhs = 0.0;           // the quantity bounded from below / above
  double rhs = 0.0;
  bool premise_met = true;
  bool pass = true;
  std::string message;
};

namespace detail {

inline bool same_field(const ScalarField& a, const ScalarField& b) {
  return std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

inline double sup_diff(const ScalarField& a, const ScalarField& b, const DiscreteOperator& op) {
  double m = 0.0;
  op.for_interior([&](int i, int j) { m = std::max(m, std::abs(a(i, j) - b(i, j))); });
  return m;
}

}  // namespace detail

/// Checks lambda1(M') >= lambda1(M) - sqrt(b/a0) delta for a drift change
/// (both without zeroth order, delta^2 <= b a0 required), or
/// |lambda1(M') - lambda1(M)| <= sup|c' - c| for a zeroth-order change.
/// Eigenvalues may be passed in when already known.
inline PerturbationReport perturbation_bound_check(const DiscreteOperator& op,
                                                   const DiscreteOperator& op_prime,
                                                   std::optional<double> lambda = {},
                                                   std::optional<double> lambda_prime = {}) {
  if (!(op.grid == op_prime.grid)) throw InvalidParameter("perturbation: grid mismatch");
  if (!detail::same_field(op.a_qq, op_prime.a_qq) || !detail::same_field(op.a_pp, op_prime.a_pp) ||
      !detail::same_field(op.a_qp, op_prime.a_qp))
    throw MisuseError("perturbation: second-order coefficients differ");
  const bool same_drift =
      detail::same_field(op.b_q, op_prime.b_q) && detail::same_field(op.b_p, op_prime.b_p);
  const bool same_c = detail::same_field(op.c, op_prime.c);
  if (!same_drift && !same_c)
    throw MisuseError("perturbation: change either the drift or the zeroth-order term");
  PerturbationReport r;
  r.lambda = lambda ? *lambda : dense_lambda1(op);
  r.lambda_prime = lambda_prime ? *lambda_prime : (same_drift && same_c ? r.lambda
                                                                        : dense_lambda1(op_prime));
  const double tol = 1e-9 * (1.0 + std::abs(r.lambda) + std::abs(r.lambda_prime));
  r.a0 = ellipticity_floor(op);
  if (same_drift && same_c) {
    r.kind = PerturbationKind::identical;
    r.lhs = r.lambda_prime;
    r.rhs = r.lambda;
    r.pass = std::abs(r.lambda_prime - r.lambda) <= tol;
    return r;
  }
  if (!same_drift) {
    r.kind = PerturbationKind::drift;
    if (op.has_zeroth_order() || op_prime.has_zeroth_order())
      throw MisuseError("perturbation: drift comparison needs operators without zeroth order");
    op.for_interior([&](int i, int j) {
      r.delta = std::max(r.delta, std::hypot(op_prime.b_q(i, j) - op.b_q(i, j),
                                             op_prime.b_p(i, j) - op.b_p(i, j)));
    });
    // The bound is applied both ways round (drift removed or added), so b is
    // the larger of the two drift suprema.
    r.b = std::max(drift_sup(op), drift_sup(op_prime));
    r.lhs = r.lambda_prime;
    r.rhs = r.lambda - std::sqrt(r.b / r.a0) * r.delta;
    r.premise_met = r.delta * r.delta <= r.b * r.a0;
    if (!r.premise_met) {
      r.pass = false;
      r.message = "premise unmet: delta^2 = " + std::to_string(r.delta * r.delta) +
                  " > b a0 = " + std::to_string(r.b * r.a0);
      return r;
    }
    r.pass = r.lhs >= r.rhs - tol;
    return r;
  }
  r.kind = PerturbationKind::zeroth_order;
  r.delta = detail::sup_diff(op.c, op_prime.c, op);
  r.lhs = std::abs(r.lambda_prime - r.lambda);
  r.rhs = r.delta;
  r.pass = r.lhs <= r.rhs + tol;
  return r;
}

struct MaxPrincipleReport {
  double lambda1 = 0.0;
  int trials = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();  // min over trials of min(u)/||u||
  int violations = 0;
  bool witness_found = false;
  double witness_ratio = 0.0;
  std::string witness_source;  // "random" or "eigenvector"
  bool near_singular = false;
  bool pass = false;  // outcome agrees with the sign of lambda1
};

/// Smooth strictly negative right-hand side: -exp of a random combination of
/// low cosine modes on the rectangle.
inline ScalarField random_negative_rhs(const Grid& g, std::mt19937_64& rng, int modes = 3) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> coef(static_cast<std::size_t>(modes * modes));
  for (double& c : coef) c = U(rng);
  ScalarField f(g);
  for (int i = 0; i < g.Nq; ++i)
    for (int j = 0; j < g.Np; ++j) {
      const double s = static_cast<double>(i) / g.Nq;
      const double t = static_cast<double>(j) / (g.Np - 1);
      double e = 0.0;
      for (int m = 0; m < modes; ++m)
        for (int k = 0; k < modes; ++k)
          e += coef[m * modes + k] * std::cos(m * std::numbers::pi * s) *
               std::cos(k * std::numbers::pi * t);
      f(i, j) = -std::exp(e);
    }
  return f;
}

/// Solves L u = f with zero boundary data for random smooth f <= 0 and checks
/// u >= 0. When lambda1 < 0 it also tries f = -phi1 and records a witness.
inline MaxPrincipleReport verify_max_principle(const DiscreteOperator& op, int trials,
                                               std::uint64_t seed = 0) {
  MaxPrincipleReport r;
  const auto est = principal_eigenvalue(op);
  r.lambda1 = est.lambda1;
  const auto A = minus_L_matrix(op);
  double scale = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  r.near_singular = std::abs(r.lambda1) <= 1e-10 * scale;
  if (r.near_singular) return r;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu(A);
  if (lu.info() != Eigen::Success) {
    r.near_singular = true;
    return r;
  }
  auto ratio_for = [&](const Eigen::VectorXd& f) {
    const Eigen::VectorXd u = lu.solve(-f);  // -L u = -f
    return u.minCoeff() / u.lpNorm<Eigen::Infinity>();
  };
  std::mt19937_64 rng(seed);
  const double tol = -1e-10;
  for (int t = 0; t < trials; ++t) {
    const double ratio =
        ratio_for(detail::restrict_interior(op, random_negative_rhs(op.grid, rng)));
    ++r.trials;
    r.worst_ratio = std::min(r.worst_ratio, ratio);
    if (ratio < tol) {
      ++r.violations;
      if (!r.witness_found) {
        r.witness_found = true;
        r.witness_ratio = ratio;
        r.witness_source = "random";
      }
    }
  }
  if (r.lambda1 < 0.0 && !r.witness_found) {
    const Eigen::VectorXd phi = detail::restrict_interior(op, est.eigenvector);
    const double ratio = ratio_for(-phi);
    if (ratio < tol) {
      r.witness_found = true;
      r.witness_ratio = ratio;
      r.witness_source = "eigenvector";
    }
  }
  r.pass = r.lambda1 > 0.0 ? r.violations == 0 : r.witness_found;
  return r;
}

}  // namespace stratwave
