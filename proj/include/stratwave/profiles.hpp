#pragma once

// Streamline density rho(p) on [p0, 0] and Bernoulli function beta(s) on
// [0, |p0|]. The Bernoulli function is always queried at s = -p.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stratwave/error.hpp"

namespace stratwave {

/// A scalar function on [lo, hi] given either by polynomial coefficients
/// (ascending powers of the argument) or by uniform samples.
class Profile1D {
public:
  enum class Kind { poly, samples };

  static Profile1D polynomial(std::vector<double> coeffs, double lo, double hi) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    Profile1D f(Kind::poly, lo, hi);
    f.coeffs_ = std::move(coeffs);
    return f;
  }

  static Profile1D sampled(std::vector<double> values, double lo, double hi) {
    if (values.size() < 4)
      throw InvalidParameter("profile: sampled representation needs at least 4 samples");
    Profile1D f(Kind::samples, lo, hi);
    f.samples_ = std::move(values);
    f.build_sample_derivatives();
    return f;
  }

  template <class F>
  static Profile1D sample_function(F&& fn, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k)
      v[k] = fn(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    return sampled(std::move(v), lo, hi);
  }

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<double>& samples() const { return samples_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  /// Value (order 0) or derivative (order 1, 2) at x.
  double eval(double x, int order = 0) const {
    x = clamp_to_domain(x);
    if (kind_ == Kind::poly) return poly_eval(x, order);
    const std::vector<double>& arr = order == 0 ? samples_ : order == 1 ? d1_ : d2_;
    return interpolate(arr, x);
  }

  /// Number of points used when a supremum has to be found by sampling.
  std::size_t dense_points() const {
    if (kind_ == Kind::samples) return 10 * (samples_.size() - 1) + 1;
    return 4001;
  }

  /// Domain check with a relative slack for nodes computed in floating point.
  double clamp_to_domain(double x) const {
    const double slack = 1e-10 * std::max(1.0, hi_ - lo_);
    if (!(x >= lo_ - slack && x <= hi_ + slack))
      throw DomainError("profile: argument " + std::to_string(x) + " outside [" +
                        std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    return std::clamp(x, lo_, hi_);
  }

private:
  Profile1D(Kind k, double lo, double hi) : kind_(k), lo_(lo), hi_(hi) {
    if (!(hi > lo)) throw InvalidParameter("profile: empty domain");
  }

  double poly_eval(double x, int order) const {
    double acc = 0.0;
    for (int k = degree(); k >= order; --k) {
      double c = coeffs_[k];
      for (int m = 0; m < order; ++m) c *= (k - m);
      acc = acc * x + c;
    }
    return acc;
  }

  void build_sample_derivatives() {
    const std::size_t n = samples_.size();
    const double h = (hi_ - lo_) / static_cast<double>(n - 1);
    const auto& f = samples_;
    d1_.assign(n, 0.0);
    d2_.assign(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      d1_[k] = (f[k + 1] - f[k - 1]) / (2 * h);
      d2_[k] = (f[k + 1] - 2 * f[k] + f[k - 1]) / (h * h);
    }
    d1_[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
    d1_[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
    d2_[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h);
    d2_[n - 1] = (2 * f[n - 1] - 5 * f[n - 2] + 4 * f[n - 3] - f[n - 4]) / (h * h);
  }

  // Four-point Lagrange interpolation on the uniform sample grid.
  double interpolate(const std::vector<double>& arr, double x) const {
    const std::size_t n = arr.size();
    const double h = (hi_ - lo_) / static_cast<double>(n - 1);
    const double s = (x - lo_) / h;
    const double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-12) return arr[static_cast<std::size_t>(nearest)];
    auto base = static_cast<long>(std::floor(s)) - 1;
    base = std::clamp(base, 0L, static_cast<long>(n) - 4);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) w *= (s - static_cast<double>(base + b)) / static_cast<double>(a - b);
      acc += w * arr[base + a];
    }
    return acc;
  }

  Kind kind_;
  double lo_;
  double hi_;
  std::vector<double> coeffs_;
  std::vector<double> samples_;
  std::vector<double> d1_;
  std::vector<double> d2_;
};

enum class ProfileTarget { rho, rho_p, rho_pp, beta, beta_prime };

struct ProfileBounds {
  double sup_beta_prime = 0.0;
  double sup_abs_beta = 0.0;
  double sup_abs_rho_p = 0.0;
  double sup_rho_pp_plus = 0.0;
};

struct StabilityReport {
  bool pass = true;
  double min_rho = 0.0;
  double max_rho_p = 0.0;
  double worst_p = 0.0;  // location of the largest rho_p (or smallest rho if rho <= 0)
  std::string message;
};

class StreamlineProfiles {
public:
  StreamlineProfiles() : StreamlineProfiles(-1.0, Profile1D::polynomial({1.0}, -1.0, 0.0),
                                            Profile1D::polynomial({0.0}, 0.0, 1.0)) {}

  StreamlineProfiles(double p0, Profile1D rho, Profile1D beta)
      : p0_(p0), rho_(std::move(rho)), beta_(std::move(beta)) {
    if (!(p0 < 0.0)) throw InvalidParameter("profiles: p0 must be negative");
    const double tol = 1e-12 * std::max(1.0, std::abs(p0));
    if (std::abs(rho_.lo() - p0) > tol || std::abs(rho_.hi()) > tol)
      throw InvalidParameter("profiles: rho must be defined on [p0, 0]");
    if (std::abs(beta_.lo()) > tol || std::abs(beta_.hi() + p0) > tol)
      throw InvalidParameter("profiles: beta must be defined on [0, |p0|]");
  }

  /// Both profiles as polynomials (ascending powers of p for rho, of s for beta).
  static StreamlineProfiles polynomial(double p0, std::vector<double> rho_coeffs,
                                       std::vector<double> beta_coeffs) {
    return {p0, Profile1D::polynomial(std::move(rho_coeffs), p0, 0.0),
            Profile1D::polynomial(std::move(beta_coeffs), 0.0, -p0)};
  }

  double p0() const { return p0_; }
  const Profile1D& rho_profile() const { return rho_; }
  const Profile1D& beta_profile() const { return beta_; }

  double rho(double p) const { return rho_.eval(p, 0); }
  double rho_p(double p) const { return rho_.eval(p, 1); }
  double rho_pp(double p) const { return rho_.eval(p, 2); }
  double beta(double s) const { return beta_.eval(s, 0); }
  double beta_prime(double s) const { return beta_.eval(s, 1); }
  /// beta evaluated on the streamline p, i.e. beta(-p).
  double beta_on(double p) const { return beta(-p); }

  double evaluate(ProfileTarget t, double at) const {
    switch (t) {
      case ProfileTarget::rho: return rho(at);
      case ProfileTarget::rho_p: return rho_p(at);
      case ProfileTarget::rho_pp: return rho_pp(at);
      case ProfileTarget::beta: return beta(at);
      case ProfileTarget::beta_prime: return beta_prime(at);
    }
    return 0.0;
  }

  ProfileBounds supremum_bounds() const { return supremum_bounds(p0_, 0.0); }

  /// Suprema restricted to streamlines p in [p_lo, p_hi] (s = -p for beta).
  ProfileBounds supremum_bounds(double p_lo, double p_hi) const {
    ProfileBounds b;
    b.sup_beta_prime = sup_of(beta_, 1, -p_hi, -p_lo, +1, false);
    b.sup_abs_beta = sup_of(beta_, 0, -p_hi, -p_lo, +1, true);
    b.sup_abs_rho_p = sup_of(rho_, 1, p_lo, p_hi, +1, true);
    b.sup_rho_pp_plus = std::max(0.0, sup_of(rho_, 2, p_lo, p_hi, +1, false));
    return b;
  }

  StabilityReport validate_stable() const {
    StabilityReport r;
    const std::size_t n = rho_.dense_points();
    r.min_rho = std::numeric_limits<double>::infinity();
    r.max_rho_p = -std::numeric_limits<double>::infinity();
    double worst_rho_at = p0_;
    for (std::size_t k = 0; k < n; ++k) {
      const double p = p0_ + (-p0_) * static_cast<double>(k) / static_cast<double>(n - 1);
      const double v = rho(p);
      const double d = rho_p(p);
      if (v < r.min_rho) { r.min_rho = v; worst_rho_at = p; }
      if (d > r.max_rho_p) { r.max_rho_p = d; r.worst_p = p; }
    }
    if (!(r.min_rho > 0.0)) {
      r.pass = false;
      r.worst_p = worst_rho_at;
      r.message = "density not positive at p = " + std::to_string(worst_rho_at);
    } else if (r.max_rho_p > 1e-12) {
      r.pass = false;
      r.message = "unstable stratification: rho_p = " + std::to_string(r.max_rho_p) +
                  " > 0 at p = " + std::to_string(r.worst_p);
    }
    return r;
  }

  /// E(s) - E(0) = -int_0^s beta(t) dt by composite Simpson.
  double energy_increment(double s) const {
    s = beta_.clamp_to_domain(s);
    if (s == 0.0) return 0.0;
    std::size_t n = beta_.dense_points() - 1;
    if (n % 2) ++n;
    const double h = s / static_cast<double>(n);
    double acc = beta(0.0) + beta(s);
    for (std::size_t k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * beta(h * static_cast<double>(k));
    return -acc * h / 3.0;
  }

private:
  // Supremum of sign*f^(order) (or its absolute value) over [a, b]. Exact via
  // critical points when the differentiated polynomial has degree <= 2 (the
  // profile itself degree <= 3); dense sampling otherwise.
  static double sup_of(const Profile1D& f, int order, double a, double b, int sign,
                       bool absolute) {
    a = f.clamp_to_domain(a);
    b = f.clamp_to_domain(b);
    auto value = [&](double x) {
      const double v = sign * f.eval(x, order);
      return absolute ? std::abs(v) : v;
    };
    double best = std::max(value(a), value(b));
    if (f.kind() == Profile1D::Kind::poly && f.degree() <= 3) {
      // Critical points of f^(order) are roots of f^(order+1), degree <= 1.
      const auto& c = f.coeffs();
      auto coef = [&](int k) { return k < static_cast<int>(c.size()) ? c[k] : 0.0; };
      // f^(order+1)(x) = u + v x with the coefficients below.
      double u = 0.0, v = 0.0;
      if (order == 0) { u = coef(1); v = 2 * coef(2); }  // plus 3 c3 x^2
      if (order == 1) { u = 2 * coef(2); v = 6 * coef(3); }
      if (order == 2) { u = 6 * coef(3); v = 0.0; }
      std::vector<double> crit;
      if (order == 0 && coef(3) != 0.0) {
        const double A = 3 * coef(3), B = v, C = u;
        const double disc = B * B - 4 * A * C;
        if (disc >= 0) {
          crit.push_back((-B + std::sqrt(disc)) / (2 * A));
          crit.push_back((-B - std::sqrt(disc)) / (2 * A));
        }
      } else if (v != 0.0) {
        crit.push_back(-u / v);
      }
      for (double x : crit)
        if (x > a && x < b) best = std::max(best, value(x));
      return best;
    }
    const std::size_t n = f.dense_points();
    auto x_at = [&](std::size_t k) {
      return a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    };
    std::size_t arg = 0;
    double sampled = value(a);
    for (std::size_t k = 1; k < n; ++k) {
      const double v = value(x_at(k));
      if (v > sampled) { sampled = v; arg = k; }
    }
    best = std::max(best, sampled);
    // Golden-section polish around the best sample, so the result does not
    // depend on where the sampling points happen to fall.
    double lo = x_at(arg == 0 ? 0 : arg - 1), hi = x_at(std::min(arg + 1, n - 1));
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      if (f1 < f2) { lo = x1; x1 = x2; f1 = f2; x2 = lo + r * (hi - lo); f2 = value(x2); }
      else { hi = x2; x2 = x1; f2 = f1; x1 = hi - r * (hi - lo); f1 = value(x1); }
    }
    return std::max({best, f1, f2});
  }

  double p0_;
  Profile1D rho_;
  Profile1D beta_;
};

}  // namespace stratwave
