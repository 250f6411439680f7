#pragma once

// Sufficient conditions for symmetry of a computed wave, and the eigenvalue
// positivity conditions for the operator of a reflected pair.

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "stratwave/diagnostics.hpp"
#include "stratwave/eigen.hpp"
#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/profiles.hpp"
#include "stratwave/wave_solver.hpp"

namespace stratwave {

/// One strict inequality lhs < rhs.
struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
  bool holds() const { return margin() > 0.0; }
};

inline Inequality make_inequality(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs};
}

struct CertificateEntry {
  Inequality main;
  std::vector<Inequality> side;  // must all hold as well
  std::optional<double> uncertainty;  // margin change under one refinement
  bool pass() const {
    return main.holds() && std::all_of(side.begin(), side.end(),
                                       [](const Inequality& s) { return s.holds(); });
  }
};

/// eta_max^2 sup beta' + g eta_max^3 sup (rho'')^+ < pi^2.
inline CertificateEntry check_S1(const FlowDiagnostics& d) {
  const double e = d.eta_max;
  const double lhs = e * e * d.sup_beta_prime + d.g * e * e * e * d.sup_rho_pp_plus;
  return {make_inequality("S1", lhs, std::numbers::pi * std::numbers::pi), {}, {}};
}

/// sup beta' + g eta_max sup (rho'')^+ < exp(-min(L, eta_min)).
inline CertificateEntry check_S2(const FlowDiagnostics& d, double L) {
  const double lhs = d.sup_beta_prime + d.g * d.eta_max * d.sup_rho_pp_plus;
  return {make_inequality("S2", lhs, std::exp(-std::min(L, d.eta_min))), {}, {}};
}
inline CertificateEntry check_S2(const FlowDiagnostics& d) { return check_S2(d, d.L); }

/// A0 eps1 sqrt(eps2/a0) + eps2 sqrt(eps2/a0) + g sup|rho'| <
/// exp(-a0^(-1/2) min(L, |p0|)), with eps1 < a0^2/A0 and eps2 < a0.
inline CertificateEntry check_S3(const FlowDiagnostics& d, double L) {
  const double r = std::sqrt(d.eps2 / d.a0);
  const double lhs = d.A0 * d.eps1 * r + d.eps2 * r + d.g * d.sup_abs_rho_p;
  const double rhs = std::exp(-std::min(L, std::abs(d.p0)) / std::sqrt(d.a0));
  return {make_inequality("S3", lhs, rhs),
          {make_inequality("eps1 < a0^2/A0", d.eps1, d.a0 * d.a0 / d.A0),
           make_inequality("eps2 < a0", d.eps2, d.a0)},
          {}};
}
inline CertificateEntry check_S3(const FlowDiagnostics& d) { return check_S3(d, d.L); }

struct LemmaReport {
  double a0 = 0.0, A0 = 0.0;
  double b = 0.0, delta1 = 0.0, delta2 = 0.0, sigma = 0.0;
  double sup_g_rho_p = 0.0;
  double strat_drift = 0.0;  // sup of the rho_p part of the drift, |b - delta2| <= this
  bool premise_met = true;
  std::string premise_message;
  Inequality condition1;         // uses max(L, |p0|)
  double condition1_rhs_min = 0.0;  // the same right-hand side with min(L, |p0|)
  Inequality eig1_delta1, eig1_delta2;
  Inequality eig2;
  bool condition1_pass() const { return premise_met && condition1.holds(); }
  bool eigen_conditions_pass() const {
    return premise_met && eig1_delta1.holds() && eig1_delta2.holds() && eig2.holds();
  }
  bool pass() const { return condition1_pass() || eigen_conditions_pass(); }
};

namespace detail {

inline std::pair<double, double> inv_hp_range(const ScalarField& h) {
  const auto hp = derivative(h, Deriv::p);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : hp.values()) {
    if (!(v > 0.0)) throw StagnationError("h_p <= 0", -1, -1, v);
    lo = std::min(lo, 1.0 / v);
    hi = std::max(hi, 1.0 / v);
  }
  return {lo, hi};
}

}  // namespace detail

/// b and delta2 are nodal suprema over the closed rectangle of the drift of
/// the full operator and of the operator with rho_p set to zero.
inline LemmaReport lemma_conditions(const ScalarField& h, const ScalarField& ht,
                                    const StreamlineProfiles& prof, double g, double L) {
  LemmaReport r;
  const Grid& G = h.grid();
  const auto [a0, A0] = detail::inv_hp_range(h);
  const auto [ta0, tA0] = detail::inv_hp_range(ht);
  r.a0 = a0;
  r.A0 = A0;
  const double tol = 1e-12 * std::max(1.0, A0);
  if (std::abs(a0 - ta0) > tol || std::abs(A0 - tA0) > tol) {
    r.premise_met = false;
    r.premise_message = "inf/sup of 1/h_p differ between the pair: (" + std::to_string(a0) +
                        ", " + std::to_string(A0) + ") vs (" + std::to_string(ta0) + ", " +
                        std::to_string(tA0) + ")";
  }
  r.b = drift_sup(assemble_L(h, ht, prof, g, Truncation::drop_zeroth), true);
  r.delta2 = drift_sup(assemble_L(h, ht, prof, g, Truncation::drop_stratified), true);
  {
    const auto full = assemble_L(h, ht, prof, g, Truncation::drop_zeroth);
    const auto free = assemble_L(h, ht, prof, g, Truncation::drop_stratified);
    for (std::size_t k = 0; k < G.size(); ++k)
      r.strat_drift =
          std::max(r.strat_drift, std::abs(full.b_p.values()[k] - free.b_p.values()[k]));
  }
  r.sup_g_rho_p = g * prof.supremum_bounds().sup_abs_rho_p;
  const double ap0 = std::abs(G.p0);
  r.delta1 = 3.0 * ap0 * r.sup_g_rho_p;
  r.sigma = sigma_root(a0, r.b);
  r.condition1 =
      make_inequality("condition1", r.sup_g_rho_p, std::exp(-r.sigma * std::max(L, ap0)));
  r.condition1_rhs_min = std::exp(-r.sigma * std::min(L, ap0));
  r.eig1_delta1 = make_inequality("delta1 < a0^2/A0", r.delta1, a0 * a0 / A0);
  r.eig1_delta2 = make_inequality("delta2 < a0", r.delta2, a0);
  const double lhs = A0 * r.delta1 * std::sqrt(r.b / a0) +
                     r.delta2 * std::sqrt(r.delta2 / a0) + r.sup_g_rho_p;
  r.eig2 = make_inequality("eigenvalue condition", lhs,
                           std::exp(-std::min(L, ap0) / std::sqrt(a0)));
  return r;
}

inline LemmaReport lemma_conditions(const ScalarField& h, const ScalarField& ht,
                                    const StreamlineProfiles& prof, double g) {
  return lemma_conditions(h, ht, prof, g, h.grid().L);
}

/// alpha(y) = sin(pi((1 - 2 delta) y / eta_max + delta)) on [0, eta_max].
struct AlphaWeight {
  double eta_max = 1.0;
  double delta = 0.25;
  double k() const { return std::numbers::pi * (1.0 - 2.0 * delta) / eta_max; }
  double phase(double y) const { return k() * y + std::numbers::pi * delta; }
  double operator()(double y) const { return std::sin(phase(y)); }
  double dy(double y) const { return k() * std::cos(phase(y)); }
  double dyy(double y) const { return -k() * k() * std::sin(phase(y)); }
  double floor() const { return std::sin(std::numbers::pi * delta); }
};

inline AlphaWeight build_alpha(double eta_max, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidParameter("alpha: delta must lie in (0, 1/2)");
  if (!(eta_max > 0.0)) throw InvalidParameter("alpha: eta_max must be positive");
  return {eta_max, delta};
}

struct SupersolutionReport {
  double bound = 0.0;  // sup beta' + g eta_max sup (rho'')^+ - pi^2/eta_max^2
  double eta_max = 0.0;
  double alpha_floor = 0.0;       // sin(pi delta)
  double alpha_ratio_min = 0.0;   // min over sampled y of alpha_yy/alpha
  double wave_speed = 0.0;
  bool pass = false;              // bound < 0
};

/// Upper bound for the zeroth-order coefficient of the weighted reflected
/// difference, from the diagnostics alone.
inline SupersolutionReport supersolution_coefficient_check(const FlowDiagnostics& d,
                                                           double delta) {
  SupersolutionReport r;
  r.eta_max = d.eta_max;
  const auto alpha = build_alpha(d.eta_max, delta);
  r.alpha_floor = alpha.floor();
  r.alpha_ratio_min = std::numeric_limits<double>::infinity();
  const int n = 257;
  for (int k = 0; k < n; ++k) {
    const double y = d.eta_max * k / (n - 1);
    r.alpha_ratio_min = std::min(r.alpha_ratio_min, alpha.dyy(y) / alpha(y));
  }
  r.bound = d.sup_beta_prime + d.g * d.eta_max * d.sup_rho_pp_plus -
            std::numbers::pi * std::numbers::pi / (d.eta_max * d.eta_max);
  r.pass = r.bound < 0.0;
  return r;
}

/// Same check for a computed wave; eta_max is read from the Eulerian surface
/// reconstructed at c_speed.
inline SupersolutionReport supersolution_coefficient_check(const WaveSolution& sol,
                                                           double c_speed, double delta) {
  const auto E = reconstruct_eulerian(sol, c_speed);
  auto d = compute_diagnostics(sol);
  const auto top = E.y.row(sol.grid().top());
  d.eta_max = *std::max_element(top.begin(), top.end()) + sol.d;
  auto r = supersolution_coefficient_check(d, delta);
  r.wave_speed = c_speed;
  return r;
}

inline nlohmann::ordered_json to_json(const SupersolutionReport& r) {
  return {{"bound", r.bound}, {"eta_max", r.eta_max}, {"alpha_floor", r.alpha_floor},
          {"alpha_ratio_min", r.alpha_ratio_min}, {"wave_speed", r.wave_speed},
          {"verdict", r.pass ? "pass" : "fail"}};
}

struct CertificateReport {
  FlowDiagnostics diagnostics;
  CertificateEntry s1, s2, s3;
  std::optional<LemmaReport> lemma;
  bool all_pass() const { return s1.pass() && s2.pass() && s3.pass(); }
};

inline CertificateReport certify(const FlowDiagnostics& d) {
  return {d, check_S1(d), check_S2(d), check_S3(d), {}};
}

/// Certificates plus the lemma conditions for the pair (h, h_tilde).
inline CertificateReport certify(const WaveSolution& sol, const ScalarField& h_tilde) {
  auto r = certify(compute_diagnostics(sol));
  r.lemma = lemma_conditions(sol.h, h_tilde, sol.profiles, sol.g);
  return r;
}

/// Margin changes against a coarser solve of the same wave.
inline void annotate_uncertainty(CertificateReport& fine, const CertificateReport& coarse) {
  fine.s1.uncertainty = std::abs(fine.s1.main.margin() - coarse.s1.main.margin());
  fine.s2.uncertainty = std::abs(fine.s2.main.margin() - coarse.s2.main.margin());
  fine.s3.uncertainty = std::abs(fine.s3.main.margin() - coarse.s3.main.margin());
}

inline nlohmann::ordered_json to_json(const Inequality& q) {
  return {{"name", q.name}, {"lhs", q.lhs}, {"rhs", q.rhs}, {"margin", q.margin()},
          {"holds", q.holds()}};
}

inline nlohmann::ordered_json to_json(const CertificateEntry& e) {
  nlohmann::ordered_json j = to_json(e.main);
  j["side_conditions"] = nlohmann::ordered_json::array();
  for (const auto& s : e.side) j["side_conditions"].push_back(to_json(s));
  j["uncertainty"] = e.uncertainty ? nlohmann::ordered_json(*e.uncertainty) : nullptr;
  j["verdict"] = e.pass() ? "pass" : "fail";
  return j;
}

inline nlohmann::ordered_json to_json(const FlowDiagnostics& d) {
  return {{"a0", d.a0}, {"A0", d.A0}, {"M", d.M}, {"M_hq", d.M_hq}, {"M_hqq", d.M_hqq},
          {"M_hqp", d.M_hqp}, {"eta_max", d.eta_max}, {"eta_min", d.eta_min}, {"d", d.d},
          {"p0", d.p0}, {"L", d.L}, {"Q", d.Q}, {"g", d.g},
          {"sup_beta_prime", d.sup_beta_prime}, {"sup_abs_beta", d.sup_abs_beta},
          {"sup_abs_rho_p", d.sup_abs_rho_p}, {"sup_rho_pp_plus", d.sup_rho_pp_plus},
          {"eps1", d.eps1}, {"eps2", d.eps2}};
}

inline nlohmann::ordered_json to_json(const LemmaReport& r) {
  return {{"a0", r.a0}, {"A0", r.A0}, {"b", r.b}, {"delta1", r.delta1}, {"delta2", r.delta2},
          {"sigma", r.sigma}, {"sup_g_rho_p", r.sup_g_rho_p},
          {"strat_drift", r.strat_drift}, {"premise_met", r.premise_met}, {"premise_message", r.premise_message},
          {"condition1", to_json(r.condition1)},
          {"condition1_rhs_min", r.condition1_rhs_min},
          {"condition1_verdict", r.condition1_pass() ? "pass" : "fail"},
          {"eigenvalue_condition_delta1", to_json(r.eig1_delta1)},
          {"eigenvalue_condition_delta2", to_json(r.eig1_delta2)},
          {"eigenvalue_condition", to_json(r.eig2)},
          {"eigenvalue_conditions_verdict", r.eigen_conditions_pass() ? "pass" : "fail"},
          {"verdict", r.pass() ? "pass" : "fail"}};
}

inline nlohmann::ordered_json to_json(const CertificateReport& r) {
  nlohmann::ordered_json j{{"S1", to_json(r.s1)}, {"S2", to_json(r.s2)}, {"S3", to_json(r.s3)}};
  j["lemma"] = r.lemma ? to_json(*r.lemma) : nlohmann::ordered_json(nullptr);
  j["all_pass"] = r.all_pass();
  j["diagnostics"] = to_json(r.diagnostics);
  return j;
}

}  // namespace stratwave
