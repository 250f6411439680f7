#pragma once

// Scenario files and the staged pipeline behind the command-line tool:
// laminar flow, continuation, diagnostics, certificates, then the optional
// eigen analysis and moving-plane sweep. Every stage is recorded in the
// report, including failures with their error payload.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stratwave/certificates.hpp"
#include "stratwave/diagnostics.hpp"
#include "stratwave/eigen.hpp"
#include "stratwave/error.hpp"
#include "stratwave/grid.hpp"
#include "stratwave/laminar.hpp"
#include "stratwave/profiles.hpp"
#include "stratwave/symmetry.hpp"
#include "stratwave/wave_solver.hpp"

namespace stratwave {

using ojson = nlohmann::ordered_json;

/// Bad scenario file: unreadable, not JSON, or failing a precondition.
class ConfigError : public Error {
public:
  using Error::Error;
};

struct ProfileSpec {
  std::string kind = "poly";  // "poly" or "samples"
  std::vector<double> values; // coefficients or uniform samples
};

struct Scenario {
  std::string name = "scenario";
  double L = 1.0, p0 = -1.0;
  int Nq = 24, Np = 25;
  ProfileSpec rho{"poly", {1.0}}, beta{"poly", {0.0}};
  double g = 9.81;
  std::optional<double> c;  // reconstruction speed, default_wave_speed when absent
  double Q = 0.0;
  double amplitude = 0.0;
  int steps = 1;
  bool certificates = true, eigen = false, sweep = false, svg = true;
  bool uncertainty = true;
  std::optional<double> reflection_lambda;  // default -L/4
  int max_principle_trials = 20;
  double supersolution_delta = 0.25;
  std::string output = "out";
  std::uint64_t seed = 0;

  Grid grid() const { return make_grid(L, p0, Nq, Np); }
  double lambda_reflect() const { return reflection_lambda.value_or(-0.25 * L); }
  StreamlineProfiles profiles() const {
    auto make = [](const ProfileSpec& s, double lo, double hi) {
      return s.kind == "poly" ? Profile1D::polynomial(s.values, lo, hi)
                              : Profile1D::sampled(s.values, lo, hi);
    };
    return {p0, make(rho, p0, 0.0), make(beta, 0.0, -p0)};
  }
};

namespace detail {

template <class T>
T take(const ojson& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline ProfileSpec parse_profile(const ojson& j, const std::string& where, double lo,
                                 double hi) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (k != "kind" && k != "values" && k != "domain")
      throw ConfigError(where + ": unknown key '" + k + "'");
  ProfileSpec s;
  s.kind = take<std::string>(j, "kind", where);
  if (s.kind != "poly" && s.kind != "samples")
    throw ConfigError(where + ".kind: expected \"poly\" or \"samples\", got \"" + s.kind + "\"");
  s.values = take<std::vector<double>>(j, "values", where);
  if (s.values.empty()) throw ConfigError(where + ".values: empty");
  if (j.contains("domain")) {
    const auto d = take<std::vector<double>>(j, "domain", where);
    if (d.size() != 2 || std::abs(d[0] - lo) > 1e-12 || std::abs(d[1] - hi) > 1e-12)
      throw ConfigError(where + ".domain: must be [" + fmt_double(lo) + ", " + fmt_double(hi) +
                        "]");
  }
  return s;
}

inline ojson profile_json(const ProfileSpec& s) {
  return ojson{{"kind", s.kind}, {"values", s.values}};
}

}  // namespace detail

/// Parses and validates a scenario. Throws ConfigError with a message naming
/// the offending key.
inline Scenario parse_scenario(const ojson& j) {
  if (!j.is_object()) throw ConfigError("scenario: top level must be an object");
  static const std::vector<std::string> known{
      "name", "grid", "rho", "beta", "g", "c", "Q", "amplitude", "steps", "certificates",
      "eigen", "sweep", "svg", "uncertainty", "reflection_lambda", "max_principle_trials",
      "supersolution_delta", "output", "seed"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ConfigError("scenario: unknown key '" + k + "'");
  using detail::take;
  Scenario s;
  if (j.contains("name")) s.name = take<std::string>(j, "name", "scenario");
  if (!j.contains("grid")) throw ConfigError("scenario.grid: missing");
  const auto& gj = j["grid"];
  if (!gj.is_object()) throw ConfigError("scenario.grid: expected an object");
  s.L = take<double>(gj, "L", "grid");
  s.p0 = take<double>(gj, "p0", "grid");
  s.Nq = take<int>(gj, "Nq", "grid");
  s.Np = take<int>(gj, "Np", "grid");
  if (j.contains("rho")) s.rho = detail::parse_profile(j["rho"], "rho", s.p0, 0.0);
  if (j.contains("beta")) s.beta = detail::parse_profile(j["beta"], "beta", 0.0, -s.p0);
  if (j.contains("g")) s.g = take<double>(j, "g", "scenario");
  if (j.contains("c") && !j["c"].is_null()) s.c = take<double>(j, "c", "scenario");
  s.Q = take<double>(j, "Q", "scenario");
  if (j.contains("amplitude")) s.amplitude = take<double>(j, "amplitude", "scenario");
  if (j.contains("steps")) s.steps = take<int>(j, "steps", "scenario");
  for (auto [key, flag] : {std::pair{"certificates", &s.certificates}, {"eigen", &s.eigen},
                           {"sweep", &s.sweep}, {"svg", &s.svg},
                           {"uncertainty", &s.uncertainty}})
    if (j.contains(key)) *flag = take<bool>(j, key, "scenario");
  if (j.contains("reflection_lambda"))
    s.reflection_lambda = take<double>(j, "reflection_lambda", "scenario");
  if (j.contains("max_principle_trials"))
    s.max_principle_trials = take<int>(j, "max_principle_trials", "scenario");
  if (j.contains("supersolution_delta"))
    s.supersolution_delta = take<double>(j, "supersolution_delta", "scenario");
  if (j.contains("output")) s.output = take<std::string>(j, "output", "scenario");
  if (j.contains("seed")) s.seed = take<std::uint64_t>(j, "seed", "scenario");

  // Module preconditions, checked before anything runs.
  try {
    (void)s.grid();
    const auto prof = s.profiles();
    const auto st = prof.validate_stable();
    if (!st.pass) throw ConfigError("scenario.rho: " + st.message);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (!(s.g > 0.0)) throw ConfigError("scenario.g: must be positive");
  if (!(s.Q > 0.0)) throw ConfigError("scenario.Q: must be positive");
  if (!(s.amplitude >= 0.0)) throw ConfigError("scenario.amplitude: must be >= 0");
  if (s.steps < 1) throw ConfigError("scenario.steps: must be >= 1");
  if (s.max_principle_trials < 0) throw ConfigError("scenario.max_principle_trials: must be >= 0");
  if (!(s.supersolution_delta > 0.0 && s.supersolution_delta < 0.5))
    throw ConfigError("scenario.supersolution_delta: must lie in (0, 1/2)");
  if (s.reflection_lambda && !(*s.reflection_lambda > -0.5 * s.L && *s.reflection_lambda <= 0.0))
    throw ConfigError("scenario.reflection_lambda: must lie in (-L/2, 0]");
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    auto s = parse_scenario(j);
    if (!j.contains("name")) s.name = path.stem().string();
    return s;
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Normalized echo of the scenario; the output directory is left out so that
/// the report does not depend on where it is written.
inline ojson to_json(const Scenario& s) {
  return ojson{{"name", s.name},
               {"grid", {{"L", s.L}, {"p0", s.p0}, {"Nq", s.Nq}, {"Np", s.Np}}},
               {"rho", detail::profile_json(s.rho)},
               {"beta", detail::profile_json(s.beta)},
               {"g", s.g},
               {"c", s.c ? ojson(*s.c) : ojson(nullptr)},
               {"Q", s.Q},
               {"amplitude", s.amplitude},
               {"steps", s.steps},
               {"certificates", s.certificates},
               {"eigen", s.eigen},
               {"sweep", s.sweep},
               {"uncertainty", s.uncertainty},
               {"reflection_lambda", s.lambda_reflect()},
               {"max_principle_trials", s.max_principle_trials},
               {"supersolution_delta", s.supersolution_delta},
               {"seed", s.seed}};
}

// ---------------------------------------------------------------------------
// Serializers for module results.

inline ojson to_json(const LaminarFlow& l) {
  return ojson{{"Q", l.Q}, {"d", l.d}, {"bed_slope", l.bed_slope},
               {"top_residual", l.top_residual()}, {"outer_iterations", l.outer_iterations}};
}

inline ojson to_json(const EigenEstimate& e) {
  return ojson{{"lambda1", e.lambda1}, {"method", to_string(e.method)},
               {"residual", e.residual}, {"iterations", e.iterations}};
}

inline ojson to_json(const PerturbationReport& r) {
  return ojson{{"kind", to_string(r.kind)}, {"lambda", r.lambda},
               {"lambda_prime", r.lambda_prime}, {"delta", r.delta}, {"b", r.b},
               {"a0", r.a0}, {"lhs", r.lhs}, {"rhs", r.rhs},
               {"premise_met", r.premise_met}, {"pass", r.pass}, {"message", r.message}};
}

inline ojson to_json(const MaxPrincipleReport& r) {
  return ojson{{"lambda1", r.lambda1},
               {"trials", r.trials},
               {"worst_ratio", std::isfinite(r.worst_ratio) ? ojson(r.worst_ratio) : ojson(nullptr)},
               {"violations", r.violations},
               {"witness_found", r.witness_found},
               {"witness_ratio", r.witness_ratio},
               {"witness_source", r.witness_source},
               {"near_singular", r.near_singular},
               {"pass", r.pass}};
}

inline ojson to_json(const MovingPlaneResult& r) {
  return ojson{{"lambda0", r.lambda0},       {"min_w_top", r.min_w_top},
               {"sym_residual", r.sym_residual}, {"axis", r.axis},
               {"classification", to_string(r.classification)},
               {"rotation", r.rotation},     {"dlambda", r.dlambda},
               {"tol_w", r.tol_w},           {"tol_sym", r.tol_sym},
               {"trace_points", r.trace.size()}, {"warnings", r.warnings}};
}

inline ojson to_json(const BoundaryIdentities& b) {
  return ojson{{"plane_residual", b.plane_residual}, {"plane_tol", b.plane_tol},
               {"bottom_max", b.bottom_max},         {"mean_top", b.mean_top},
               {"mean_tol", b.mean_tol},             {"pass", b.pass()}};
}

inline ojson to_json(const EulerianSymmetry& e) {
  return ojson{{"u_residual", e.u_residual},     {"v_residual", e.v_residual},
               {"eta_residual", e.eta_residual}, {"rho_residual", e.rho_residual},
               {"velocity_tol", e.velocity_tol}, {"eta_tol", e.eta_tol},
               {"pass", e.pass}};
}

/// Error payload: type name, message and the structured fields of the type.
inline ojson error_json(const std::exception& e) {
  ojson j{{"type", "std::exception"}, {"message", e.what()}};
  if (auto* s = dynamic_cast<const StagnationError*>(&e)) {
    j["type"] = "StagnationError";
    j["node"] = {s->node_i, s->node_j};
    j["h_p"] = s->h_p;
  } else if (auto* n = dynamic_cast<const NoLaminarFlow*>(&e)) {
    j["type"] = "NoLaminarFlow";
    j["slopes"] = n->slopes;
    j["residuals"] = n->residuals;
  } else if (auto* d = dynamic_cast<const DivergenceError*>(&e)) {
    j["type"] = "DivergenceError";
    j["residual_history"] = d->residual_history;
    j["amplitude"] = d->amplitude;
  } else if (dynamic_cast<const PerronFailure*>(&e)) {
    j["type"] = "PerronFailure";
  } else if (dynamic_cast<const MisuseError*>(&e)) {
    j["type"] = "MisuseError";
  } else if (dynamic_cast<const InvalidParameter*>(&e)) {
    j["type"] = "InvalidParameter";
  } else if (dynamic_cast<const DomainError*>(&e)) {
    j["type"] = "DomainError";
  } else if (dynamic_cast<const Error*>(&e)) {
    j["type"] = "Error";
  }
  return j;
}

// ---------------------------------------------------------------------------
// Output files.

inline void write_diagnostics_csv(std::ostream& os, const FlowDiagnostics& d) {
  os << "quantity,value\n";
  const ojson j = to_json(d);
  for (const auto& [k, v] : j.items())
    os << k << ',' << detail::fmt_double(v.get<double>()) << '\n';
}

/// Streamlines p = const drawn through y = h - d, every `stride` rows.
inline void write_contours_svg(std::ostream& os, const WaveSolution& sol, int lines = 16) {
  const Grid& G = sol.grid();
  const double W = 800.0, H = 400.0, pad = 20.0;
  double ylo = 0.0, yhi = 0.0;
  for (double v : sol.h.values()) {
    ylo = std::min(ylo, v - sol.d);
    yhi = std::max(yhi, v - sol.d);
  }
  const double sx = (W - 2 * pad) / G.L, sy = (H - 2 * pad) / std::max(yhi - ylo, 1e-300);
  auto fmt = [](double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", x);
    return std::string(b);
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const int stride = std::max(1, (G.Np - 1) / std::max(1, lines));
  for (int j = 0; j < G.Np; j += stride) {
    const bool edge = j == 0 || j == G.top();
    os << "<polyline fill=\"none\" stroke=\"" << (edge ? "black" : "steelblue")
       << "\" stroke-width=\"" << (edge ? "1.5" : "0.8") << "\" points=\"";
    for (int i = 0; i <= G.Nq; ++i) {
      const double x = pad + (G.q(0) + i * G.dq + 0.5 * G.L) * sx;
      const double y = H - pad - (sol.h(i, j) - sol.d - ylo) * sy;
      os << (i ? " " : "") << fmt(x) << ',' << fmt(y);
    }
    os << "\"/>\n";
    if (j != G.top() && j + stride > G.top()) j = G.top() - stride;
  }
  os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Pipeline.

enum Stage : unsigned {
  stage_solve = 1u,         // laminar, continuation, diagnostics
  stage_certificates = 2u,
  stage_eigen = 4u,
  stage_sweep = 8u,
};

struct RunResult {
  ojson report;
  bool mandatory_failed = false;
  std::vector<std::string> files;
};

namespace detail {

inline double interior_sup(const DiscreteOperator& op, const ScalarField& f) {
  double m = 0.0;
  op.for_interior([&](int i, int j) { m = std::max(m, std::abs(f(i, j))); });
  return m;
}

inline ojson eigen_stage(const Scenario& sc, const WaveSolution& sol, const ScalarField& ht) {
  ojson out;
  const auto& prof = sol.profiles;
  const std::pair<Truncation, const char*> truncs[] = {
      {Truncation::full, "full"},
      {Truncation::drop_zeroth, "drop_zeroth"},
      {Truncation::drop_stratified, "drop_stratified"},
      {Truncation::principal_part, "principal_part"}};
  std::optional<DiscreteOperator> full, l0;
  std::optional<double> lam_full, lam_l0;
  ojson ops = ojson::object();
  for (const auto& [t, name] : truncs) {
    const auto op = assemble_L(sol.h, ht, prof, sol.g, t);
    ojson e{{"ellipticity_floor", ellipticity_floor(op)}, {"drift_sup", drift_sup(op)},
            {"zeroth_order_sup", op.c.sup_abs()}};
    try {
      const auto est = principal_eigenvalue(op);
      e["principal"] = to_json(est);
      if (t == Truncation::full) lam_full = est.lambda1;
      if (t == Truncation::drop_zeroth) lam_l0 = est.lambda1;
    } catch (const Error& err) {
      e["principal"] = ojson{{"error", error_json(err)}};
    }
    if (!op.has_zeroth_order()) e["bnv_bound"] = bnv_exp_bound(op);
    if (t == Truncation::full) {
      e["residual_on_difference"] = interior_sup(op, apply(op, sol.h - ht));
      full = op;
    }
    if (t == Truncation::drop_zeroth) l0 = op;
    ops[name] = std::move(e);
  }
  out["operators"] = std::move(ops);
  out["zeroth_order_perturbation"] = to_json(perturbation_bound_check(*l0, *full, lam_l0, lam_full));
  if (sc.max_principle_trials > 0) {
    try {
      out["max_principle"] = to_json(verify_max_principle(*full, sc.max_principle_trials, sc.seed));
    } catch (const Error& err) {
      out["max_principle"] = ojson{{"error", error_json(err)}};
    }
  }
  return out;
}

}  // namespace detail

/// Runs the requested stages, writing files into `out_dir`. Mandatory stages
/// are the solve stages and, when requested, the certificates. With
/// `honor_toggles` false the requested stages run whatever the scenario says.
inline RunResult run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                              unsigned stages, bool honor_toggles = true) {
  namespace fs = std::filesystem;
  RunResult res;
  ojson& rep = res.report;
  rep["scenario"] = to_json(sc);
  rep["stages"] = ojson::array();
  fs::create_directories(out_dir);

  auto run_stage = [&](const char* name, bool mandatory, const std::function<void()>& fn) {
    ojson entry{{"name", name}, {"mandatory", mandatory}};
    bool passed = true;
    try {
      fn();
      entry["status"] = "ok";
    } catch (const std::exception& e) {
      passed = false;
      entry["status"] = "failed";
      entry["error"] = error_json(e);
      if (mandatory) res.mandatory_failed = true;
    }
    rep["stages"].push_back(std::move(entry));
    return passed;
  };
  auto skip = [&](const char* name, const char* why) {
    rep["stages"].push_back(ojson{{"name", name}, {"mandatory", false}, {"status", "skipped"},
                                  {"reason", why}});
  };
  auto write = [&](const std::string& file, const std::function<void(std::ostream&)>& fn,
                   bool binary = false) {
    std::ofstream os(out_dir / file, binary ? std::ios::binary : std::ios::out);
    if (!os) throw Error("cannot write " + (out_dir / file).string());
    fn(os);
    res.files.push_back(file);
  };

  const Grid G = sc.grid();
  const auto prof = sc.profiles();
  std::optional<LaminarFlow> lam;
  std::optional<WaveSolution> sol;
  std::optional<FlowDiagnostics> diag;

  bool ok = run_stage("laminar", true, [&] {
    lam = solve_laminar(prof, sc.g, sc.Q, G.Np);
    rep["laminar"] = to_json(*lam);
  });
  ok = ok && run_stage("continuation", true, [&] {
    sol = continue_from_laminar(*lam, G, sc.amplitude, sc.steps);
    const auto& st = sol->stats;
    rep["solution"] = ojson{
        {"Q", sol->Q}, {"d", sol->d}, {"amplitude", first_cosine_coefficient(sol->h)},
        {"newton_iterations", st.iterations},
        {"final_residual", st.residual_history.empty() ? 0.0 : st.residual_history.back()},
        {"phase_multiplier", st.phase_multiplier}};
    write("solution.swf", [&](std::ostream& os) { write_field_binary(os, sol->h); }, true);
    if (sc.svg) write("contours.svg", [&](std::ostream& os) { write_contours_svg(os, *sol); });
  });
  ok = ok && run_stage("diagnostics", true, [&] {
    diag = compute_diagnostics(*sol);
    rep["diagnostics"] = to_json(*diag);
    write("diagnostics.csv", [&](std::ostream& os) { write_diagnostics_csv(os, *diag); });
  });

  const double lam_r = sc.lambda_reflect();
  if (stages & stage_certificates) {
    if (honor_toggles && !sc.certificates) {
      skip("certificates", "disabled in scenario");
    } else if (!ok) {
      skip("certificates", "no solution");
    } else {
      ok = run_stage("certificates", true, [&] {
        const auto ht = reflect(sol->h, lam_r);
        auto cert = certify(*sol, ht);
        std::optional<std::string> note;
        if (sc.uncertainty) {
          // Same wave at half resolution; its margins bound the discretization error.
          try {
            const int nq = std::max(8, (sc.Nq / 4) * 2), np = std::max(8, (sc.Np + 1) / 2);
            const Grid Gc = make_grid(sc.L, sc.p0, nq, np);
            const auto lc = solve_laminar(prof, sc.g, sc.Q, np);
            const auto sc_sol = continue_from_laminar(lc, Gc, sc.amplitude, sc.steps);
            annotate_uncertainty(cert, certify(compute_diagnostics(sc_sol)));
          } catch (const Error& e) {
            note = std::string("coarse solve failed: ") + e.what();
          }
        }
        rep["certificates"] = to_json(cert);
        if (note) rep["certificates"]["uncertainty_note"] = *note;
        const double c = sc.c.value_or(default_wave_speed(*sol));
        rep["supersolution"] = to_json(supersolution_coefficient_check(*sol, c, sc.supersolution_delta));
      });
    }
  }
  if (stages & stage_eigen) {
    if (honor_toggles && !sc.eigen) {
      skip("eigen", "disabled in scenario");
    } else if (!sol) {
      skip("eigen", "no solution");
    } else {
      run_stage("eigen", false, [&] {
        rep["eigen"] = detail::eigen_stage(sc, *sol, reflect(sol->h, lam_r));
        rep["eigen"]["reflection_lambda"] = lam_r;
      });
    }
  }
  if (stages & stage_sweep) {
    if (honor_toggles && !sc.sweep) {
      skip("sweep", "disabled in scenario");
    } else if (!sol) {
      skip("sweep", "no solution");
    } else {
      run_stage("sweep", false, [&] {
        const auto mp = moving_plane_sweep(*sol);
        ojson s = to_json(mp);
        s["boundary_identities"] = to_json(boundary_identities_check(*sol, lam_r));
        const double c = sc.c.value_or(default_wave_speed(*sol));
        s["eulerian_symmetry"] = to_json(eulerian_symmetry_check(reconstruct_eulerian(*sol, c), mp.axis));
        rep["sweep"] = std::move(s);
        write("trace.csv", [&](std::ostream& os) { write_trace_csv(os, mp); });
      });
    }
  }
  res.files.push_back("report.json");
  rep["files"] = res.files;
  rep["status"] = res.mandatory_failed ? "failed" : "ok";
  std::ofstream os(out_dir / "report.json");
  os << rep.dump(2) << '\n';
  if (!os) throw Error("cannot write " + (out_dir / "report.json").string());
  return res;
}

}  // namespace stratwave
