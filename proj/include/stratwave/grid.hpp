#pragma once

// Grid and finite-difference calculus on the period rectangle
// [-L/2, L/2) x [p0, 0], periodic in q, bounded in p.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "stratwave/error.hpp"

namespace stratwave {

struct Grid {
  double L = 1.0;
  double p0 = -1.0;
  int Nq = 8;
  int Np = 8;
  double dq = 0.125;
  double dp = 1.0 / 7.0;

  double q(int i) const { return -0.5 * L + i * dq; }
  double p(int j) const { return j == Np - 1 ? 0.0 : p0 + j * dp; }
  int wrap(int i) const { return ((i % Nq) + Nq) % Nq; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(wrap(i)) * static_cast<std::size_t>(Np) +
           static_cast<std::size_t>(j);
  }
  std::size_t size() const { return static_cast<std::size_t>(Nq) * Np; }
  int top() const { return Np - 1; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.L == b.L && a.p0 == b.p0 && a.Nq == b.Nq && a.Np == b.Np;
  }
};

inline Grid make_grid(double L, double p0, int Nq, int Np) {
  if (!(L > 0.0) || !std::isfinite(L))
    throw InvalidParameter("grid: period L must be positive, got " + std::to_string(L));
  if (!(p0 < 0.0) || !std::isfinite(p0))
    throw InvalidParameter("grid: mass flux p0 must be negative, got " + std::to_string(p0));
  if (Nq < 8 || Nq % 2 != 0)
    throw InvalidParameter("grid: Nq must be even and >= 8, got " + std::to_string(Nq));
  if (Np < 8)
    throw InvalidParameter("grid: Np must be >= 8, got " + std::to_string(Np));
  Grid g;
  g.L = L;
  g.p0 = p0;
  g.Nq = Nq;
  g.Np = Np;
  g.dq = L / Nq;
  g.dp = std::abs(p0) / (Np - 1);
  return g;
}

/// Grid for Dirichlet problems on the closed rectangle: the column i = 0
/// (equivalently i = Nq) is the boundary q = +-L/2, so there are Nq-1
/// interior columns and Nq may be odd.
inline Grid make_box_grid(double L, double p0, int Nq, int Np) {
  if (!(L > 0.0) || !(p0 < 0.0)) throw InvalidParameter("box grid: need L > 0 and p0 < 0");
  if (Nq < 2 || Np < 3) throw InvalidParameter("box grid: need Nq >= 2 and Np >= 3");
  Grid g;
  g.L = L;
  g.p0 = p0;
  g.Nq = Nq;
  g.Np = Np;
  g.dq = L / Nq;
  g.dp = std::abs(p0) / (Np - 1);
  return g;
}

/// Nodal values on a Grid, stored q-major: value(i, j) = values[i*Np + j].
/// The seam column q = L/2 is not stored; q-indices wrap modulo Nq.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}
  ScalarField(const Grid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidParameter("field: value count does not match grid");
  }

  template <class F>
  static ScalarField from_function(const Grid& grid, F&& f) {
    ScalarField out(grid);
    for (int i = 0; i < grid.Nq; ++i)
      for (int j = 0; j < grid.Np; ++j) out(i, j) = f(grid.q(i), grid.p(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  std::vector<double> row(int j) const {
    std::vector<double> out(grid_.Nq);
    for (int i = 0; i < grid_.Nq; ++i) out[i] = (*this)(i, j);
    return out;
  }

  double sup_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

private:
  Grid grid_;
  std::vector<double> values_;
};

enum class Deriv { q, p, qq, pp, qp };

/// One tap of a finite-difference stencil. `i` is unwrapped; use Grid::wrap.
struct Tap {
  int i;
  int j;
  double w;
};

/// Fixed-capacity stencil (the widest is the one-sided mixed stencil, 2x4).
struct Stencil {
  std::array<Tap, 8> taps{};
  int size = 0;
  void add(int i, int j, double w) { taps[size++] = {i, j, w}; }
  auto begin() const { return taps.begin(); }
  auto end() const { return taps.begin() + size; }
};

namespace detail {

// 1D p-direction weights at row j (offsets relative to j, divided by dp^order).
struct PWeights {
  std::array<int, 4> off{};
  std::array<double, 4> w{};
  int n = 0;
};

inline PWeights p_first(const Grid& g, int j) {
  const double s = 1.0 / (2.0 * g.dp);
  if (j == 0) return {{0, 1, 2, 0}, {-3 * s, 4 * s, -s, 0}, 3};
  if (j == g.Np - 1) return {{0, -1, -2, 0}, {3 * s, -4 * s, s, 0}, 3};
  return {{-1, 1, 0, 0}, {-s, s, 0, 0}, 2};
}

inline PWeights p_second(const Grid& g, int j) {
  const double s = 1.0 / (g.dp * g.dp);
  if (j == 0) return {{0, 1, 2, 3}, {2 * s, -5 * s, 4 * s, -s}, 4};
  if (j == g.Np - 1) return {{0, -1, -2, -3}, {2 * s, -5 * s, 4 * s, -s}, 4};
  return {{-1, 0, 1, 0}, {s, -2 * s, s, 0}, 3};
}

}  // namespace detail

/// Second-order stencil of the requested derivative at node (i, j).
/// Central in q (periodic), central in p with one-sided second-order
/// closures on the rows j = 0 and j = Np-1. The mixed stencil is the tensor
/// product of the q and p first-derivative stencils.
inline Stencil stencil(const Grid& g, Deriv which, int i, int j) {
  Stencil s;
  switch (which) {
    case Deriv::q: {
      const double c = 1.0 / (2.0 * g.dq);
      s.add(i - 1, j, -c);
      s.add(i + 1, j, c);
      break;
    }
    case Deriv::qq: {
      const double c = 1.0 / (g.dq * g.dq);
      s.add(i - 1, j, c);
      s.add(i, j, -2.0 * c);
      s.add(i + 1, j, c);
      break;
    }
    case Deriv::p: {
      auto pw = detail::p_first(g, j);
      for (int k = 0; k < pw.n; ++k) s.add(i, j + pw.off[k], pw.w[k]);
      break;
    }
    case Deriv::pp: {
      auto pw = detail::p_second(g, j);
      for (int k = 0; k < pw.n; ++k) s.add(i, j + pw.off[k], pw.w[k]);
      break;
    }
    case Deriv::qp: {
      const double c = 1.0 / (2.0 * g.dq);
      auto pw = detail::p_first(g, j);
      for (int k = 0; k < pw.n; ++k) {
        s.add(i - 1, j + pw.off[k], -c * pw.w[k]);
        s.add(i + 1, j + pw.off[k], c * pw.w[k]);
      }
      break;
    }
  }
  return s;
}

inline double apply_stencil(const ScalarField& f, const Stencil& s) {
  double acc = 0.0;
  for (const Tap& t : s) acc += t.w * f(t.i, t.j);
  return acc;
}

inline double derivative_at(const ScalarField& f, Deriv which, int i, int j) {
  return apply_stencil(f, stencil(f.grid(), which, i, j));
}

inline ScalarField derivative(const ScalarField& f, Deriv which) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int i = 0; i < g.Nq; ++i)
    for (int j = 0; j < g.Np; ++j) out(i, j) = derivative_at(f, which, i, j);
  return out;
}

/// Nodal derivative values of a field gathered in one pass.
struct NodalDerivatives {
  ScalarField q, p, qq, pp, qp;
};

inline NodalDerivatives all_derivatives(const ScalarField& f) {
  return {derivative(f, Deriv::q), derivative(f, Deriv::p), derivative(f, Deriv::qq),
          derivative(f, Deriv::pp), derivative(f, Deriv::qp)};
}

struct SupSeminorms {
  double f = 0.0;
  double fq = 0.0;
  double fp = 0.0;
  double fqq = 0.0;
  double fqp = 0.0;
};

inline SupSeminorms sup_seminorms(const ScalarField& f) {
  return {f.sup_abs(), derivative(f, Deriv::q).sup_abs(),
          derivative(f, Deriv::p).sup_abs(), derivative(f, Deriv::qq).sup_abs(),
          derivative(f, Deriv::qp).sup_abs()};
}

/// Mean over q of row j (the discrete average over one period).
inline double row_mean(const ScalarField& f, int j) {
  double s = 0.0;
  for (int i = 0; i < f.grid().Nq; ++i) s += f(i, j);
  return s / f.grid().Nq;
}

// ---------------------------------------------------------------------------
// Serialization. Binary: 8-byte magic "SWFIELD1", L and p0 as IEEE doubles,
// Nq and Np as uint64, then Nq*Np doubles in q-major order, all little endian.
// CSV: first line "L,p0,Nq,Np", then one line per q-index with Np values.
// Doubles are written in shortest round-trip form, so both are bit exact.

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}
inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw InvalidParameter("field io: truncated binary stream");
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
  return v;
}
inline void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline std::string fmt_double(double x) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}
inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double x = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw InvalidParameter("field io: bad number '" + std::string(s) + "'");
  return x;
}
inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline constexpr char kFieldMagic[9] = "SWFIELD1";

inline void write_field_binary(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid();
  os.write(kFieldMagic, 8);
  detail::put_f64(os, g.L);
  detail::put_f64(os, g.p0);
  detail::put_u64(os, static_cast<std::uint64_t>(g.Nq));
  detail::put_u64(os, static_cast<std::uint64_t>(g.Np));
  for (double v : f.values()) detail::put_f64(os, v);
}

inline ScalarField read_field_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kFieldMagic, 8) != 0)
    throw InvalidParameter("field io: bad magic");
  const double L = detail::get_f64(is);
  const double p0 = detail::get_f64(is);
  const auto nq = static_cast<int>(detail::get_u64(is));
  const auto np = static_cast<int>(detail::get_u64(is));
  if (!is) throw InvalidParameter("field io: truncated header");
  Grid g = make_box_grid(L, p0, nq, np);
  std::vector<double> vals(g.size());
  for (double& v : vals) v = detail::get_f64(is);
  if (!is) throw InvalidParameter("field io: truncated data");
  return ScalarField(g, std::move(vals));
}

inline void write_field_csv(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid();
  os << "L,p0,Nq,Np\n"
     << detail::fmt_double(g.L) << ',' << detail::fmt_double(g.p0) << ',' << g.Nq << ','
     << g.Np << '\n';
  for (int i = 0; i < g.Nq; ++i) {
    for (int j = 0; j < g.Np; ++j) {
      if (j) os << ',';
      os << detail::fmt_double(f(i, j));
    }
    os << '\n';
  }
}

inline ScalarField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("L,p0,Nq,Np", 0) != 0)
    throw InvalidParameter("field io: missing csv header");
  if (!std::getline(is, line)) throw InvalidParameter("field io: missing grid line");
  auto head = detail::split(line, ',');
  if (head.size() != 4) throw InvalidParameter("field io: bad grid line");
  Grid g = make_box_grid(detail::parse_double(head[0]), detail::parse_double(head[1]),
                     static_cast<int>(detail::parse_double(head[2])),
                     static_cast<int>(detail::parse_double(head[3])));
  ScalarField f(g);
  for (int i = 0; i < g.Nq; ++i) {
    if (!std::getline(is, line)) throw InvalidParameter("field io: truncated csv");
    auto cells = detail::split(line, ',');
    if (static_cast<int>(cells.size()) != g.Np)
      throw InvalidParameter("field io: wrong column count");
    for (int j = 0; j < g.Np; ++j) f(i, j) = detail::parse_double(cells[j]);
  }
  return f;
}

}  // namespace stratwave
