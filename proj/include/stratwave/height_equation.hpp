#pragma once

// Pointwise form of the height equation and its partial derivatives with
// respect to the nodal derivative values. Everything that discretizes the
// equation (residual, Newton Jacobian, laminar polish, bifurcation search)
// goes through these two kernels so the discretizations agree exactly.

namespace stratwave {

struct LocalJet {
  double hq = 0.0, hp = 0.0, hqq = 0.0, hpp = 0.0, hqp = 0.0, h = 0.0;
};

/// (1+hq^2) hpp + hqq hp^2 - 2 hq hp hqp - g (h-d) hp^3 rho_p + hp^3 beta(-p)
struct InteriorLocal {
  double value, d_hq, d_hp, d_hqq, d_hpp, d_hqp, d_h, d_d;
};

inline InteriorLocal interior_local(const LocalJet& x, double d, double rho_p, double beta,
                                    double g) {
  const double hp2 = x.hp * x.hp;
  const double hp3 = hp2 * x.hp;
  const double strat = g * (x.h - d) * rho_p;
  InteriorLocal r{};
  r.value = (1.0 + x.hq * x.hq) * x.hpp + x.hqq * hp2 - 2.0 * x.hq * x.hp * x.hqp -
            strat * hp3 + hp3 * beta;
  r.d_hq = 2.0 * x.hq * x.hpp - 2.0 * x.hp * x.hqp;
  r.d_hp = 2.0 * x.hqq * x.hp - 2.0 * x.hq * x.hqp - 3.0 * strat * hp2 + 3.0 * hp2 * beta;
  r.d_hqq = hp2;
  r.d_hpp = 1.0 + x.hq * x.hq;
  r.d_hqp = -2.0 * x.hq * x.hp;
  r.d_h = -g * rho_p * hp3;
  r.d_d = g * rho_p * hp3;
  return r;
}

/// 1 + hq^2 + hp^2 (2 g rho h - Q) on the free surface p = 0.
struct TopLocal {
  double value, d_hq, d_hp, d_h, d_Q;
};

inline TopLocal top_local(const LocalJet& x, double rho_top, double g, double Q) {
  const double bern = 2.0 * g * rho_top * x.h - Q;
  TopLocal r{};
  r.value = 1.0 + x.hq * x.hq + x.hp * x.hp * bern;
  r.d_hq = 2.0 * x.hq;
  r.d_hp = 2.0 * x.hp * bern;
  r.d_h = 2.0 * g * rho_top * x.hp * x.hp;
  r.d_Q = -x.hp * x.hp;
  return r;
}

}  // namespace stratwave
