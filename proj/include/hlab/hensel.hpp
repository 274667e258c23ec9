#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/local_element.hpp"
#include "hlab/polynomial.hpp"
#include "hlab/residue.hpp"

namespace hlab {

using Matrix = std::vector<std::vector<LocalElement>>;
using ResidueMatrix = std::vector<std::vector<std::uint64_t>>;

namespace detail {

/// Row echelon form over F_p; returns the pivot column of each pivot row.
inline std::vector<std::size_t> pivot_columns(ResidueMatrix rows, std::uint64_t p) {
  std::vector<std::size_t> pivots;
  if (rows.empty()) return pivots;
  const std::size_t ncols = rows.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t sel = r;
    while (sel < rows.size() && rows[sel][c] % p == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[sel], rows[r]);
    const std::uint64_t inv = fp::inv(rows[r][c], p);
    for (auto& x : rows[r]) x = fp::mul(x, inv, p);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == r || rows[k][c] == 0) continue;
      const std::uint64_t f = rows[k][c];
      for (std::size_t j = 0; j < ncols; ++j) rows[k][j] = fp::sub(rows[k][j], fp::mul(f, rows[r][j], p), p);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Solves J x = rhs over A by Gaussian elimination, pivoting on the first
/// unit entry of each column.
inline Point solve_unit_pivot(Matrix jac, Point rhs) {
  const std::size_t k = rhs.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t sel = c;
    while (sel < k && !jac[sel][c].is_unit()) ++sel;
    if (sel == k) throw Error(ErrorKind::SingularPoint, "no unit pivot in column " + std::to_string(c));
    std::swap(jac[sel], jac[c]);
    std::swap(rhs[sel], rhs[c]);
    const LocalElement inv = jac[c][c].invert();
    for (auto& x : jac[c]) x *= inv;
    rhs[c] *= inv;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c || jac[r][c].is_zero_at_precision()) continue;
      const LocalElement f = jac[r][c];
      for (std::size_t j = 0; j < k; ++j) jac[r][j] -= f * jac[c][j];
      rhs[r] -= f * rhs[c];
    }
  }
  return rhs;
}

inline int min_valuation(const Point& values, int prec) {
  int v = prec;
  for (const auto& x : values) v = std::min(v, x.valuation());
  return v;
}

}  // namespace detail

inline std::size_t rank_mod_p(const ResidueMatrix& m, std::uint64_t p) { return detail::pivot_columns(m, p).size(); }

/// Defect valuations min_j v(F_j(x_k)) after each Newton step k (k = 0 is the start).
struct NewtonTrace {
  std::vector<int> defect_valuations;
};

/// Evaluates the residual vector at a full point.
using ResidualFn = std::function<Point(const Point&)>;
/// Evaluates the square Jacobian with respect to the unknown coordinates.
using JacobianFn = std::function<Matrix(const Point&)>;

/// Newton iteration x <- x - J(x)^{-1} F(x) on the coordinates listed in
/// `unknowns`, the others held fixed. Requires F(x0) = 0 mod m and J(x0)
/// invertible mod m; precision doubles per step.
inline Point newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Point x,
                          const std::vector<std::size_t>& unknowns, NewtonTrace* trace = nullptr) {
  if (x.empty()) throw Error(ErrorKind::ArityMismatch, "empty starting point");
  const RingSpec ring = x.front().ring();
  const std::uint64_t p = ring.p;
  Point f = residual(x);
  if (f.size() != unknowns.size())
    throw Error(ErrorKind::ArityMismatch, std::to_string(f.size()) + " equations for " +
                                              std::to_string(unknowns.size()) + " unknowns");
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f[j].is_unit()) throw Error(ErrorKind::NoRoot, "equation " + std::to_string(j) + " does not vanish mod m at the start");
  {
    Matrix jac = jacobian(x);
    ResidueMatrix res(jac.size());
    for (std::size_t r = 0; r < jac.size(); ++r)
      for (const auto& e : jac[r]) res[r].push_back(e.residue());
    if (rank_mod_p(res, p) < unknowns.size())
      throw Error(ErrorKind::SingularPoint, "Jacobian determinant is not a unit");
  }
  int steps = 1;
  while ((1 << (steps - 1)) < ring.prec) ++steps;  // ceil(log2 N) + 1
  if (trace) trace->defect_valuations = {detail::min_valuation(f, ring.prec)};
  for (int k = 0; k < steps; ++k) {
    if (detail::min_valuation(f, ring.prec) == ring.prec) break;
    Point delta = detail::solve_unit_pivot(jacobian(x), f);
    for (std::size_t i = 0; i < unknowns.size(); ++i) x[unknowns[i]] -= delta[i];
    f = residual(x);
    if (trace) trace->defect_valuations.push_back(detail::min_valuation(f, ring.prec));
  }
  return x;
}

/// Lifts a simple root mod m of a polynomial system along the listed
/// coordinates; the remaining coordinates of x0 stay fixed.
inline Point newton_lift_partial(const std::vector<Polynomial>& system, const Point& x0,
                                 const std::vector<std::size_t>& unknowns, NewtonTrace* trace = nullptr) {
  for (const auto& f : system)
    if (f.arity() != x0.size()) throw Error(ErrorKind::ArityMismatch, "system arity does not match the point");
  for (const auto& x : x0) require_same_ring(x.ring(), x0.front().ring());
  std::vector<std::vector<Polynomial>> partials(system.size());
  for (std::size_t j = 0; j < system.size(); ++j)
    for (std::size_t i : unknowns) partials[j].push_back(system[j].derivative(i));
  ResidualFn residual = [&](const Point& x) {
    Point out;
    for (const auto& f : system) out.push_back(f.eval(x));
    return out;
  };
  JacobianFn jacobian = [&](const Point& x) {
    Matrix jac(system.size());
    for (std::size_t j = 0; j < system.size(); ++j)
      for (const auto& d : partials[j]) jac[j].push_back(d.eval(x));
    return jac;
  };
  return newton_solve(residual, jacobian, x0, unknowns, trace);
}

/// Classical Hensel lifting of a square system: k equations in k unknowns.
inline Point newton_lift(const std::vector<Polynomial>& system, const Point& x0, NewtonTrace* trace = nullptr) {
  if (system.size() != x0.size())
    throw Error(ErrorKind::ArityMismatch, "newton_lift needs a square system");
  std::vector<std::size_t> all(x0.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return newton_lift_partial(system, x0, all, trace);
}

/// A morphism A^n -> A^m presented as y_j = u_j * prod_i x_i^{e_ij}.
struct MonomialChart {
  std::size_t n = 0;
  std::size_t m = 0;
  /// exponents[j][i] = e_ij, one row per target coordinate.
  std::vector<std::vector<std::uint32_t>> exponents;
  /// u_j, polynomials in the n source coordinates.
  std::vector<Polynomial> units;

  /// Monomial chart with constant unit factors 1 over variables x1..xn.
  static MonomialChart monomial(std::vector<std::vector<std::uint32_t>> exps) {
    MonomialChart c;
    c.m = exps.size();
    c.n = exps.empty() ? 0 : exps.front().size();
    c.exponents = std::move(exps);
    for (std::size_t j = 0; j < c.m; ++j) c.units.push_back(Polynomial::constant(1, default_vars(c.n)));
    c.validate();
    return c;
  }

  static std::vector<std::string> default_vars(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
    return v;
  }

  void validate() const {
    if (exponents.size() != m || units.size() != m)
      throw Error(ErrorKind::ArityMismatch, "chart needs one exponent row and one unit per target coordinate");
    for (const auto& row : exponents)
      if (row.size() != n) throw Error(ErrorKind::ArityMismatch, "exponent row length differs from source dimension");
    for (const auto& u : units)
      if (u.arity() != n) throw Error(ErrorKind::ArityMismatch, "unit polynomial arity differs from source dimension");
  }
};

/// f(a) for a chart; every u_j(a) must be a unit.
inline Point chart_image(const MonomialChart& chart, const Point& a) {
  chart.validate();
  if (a.size() != chart.n) throw Error(ErrorKind::ArityMismatch, "source point has wrong dimension");
  if (a.empty()) throw Error(ErrorKind::ArityMismatch, "chart with empty source");
  Point out;
  for (std::size_t j = 0; j < chart.m; ++j) {
    LocalElement u = chart.units[j].eval(a);
    if (!u.is_unit()) throw Error(ErrorKind::UnitViolation, "u_" + std::to_string(j + 1) + " is not a unit at the point");
    for (std::size_t i = 0; i < chart.n; ++i)
      if (chart.exponents[j][i]) u *= a[i].pow(chart.exponents[j][i]);
    out.push_back(u);
  }
  return out;
}

struct LogJacobian {
  /// n x m matrix over F_p, rows indexed by source coordinates.
  ResidueMatrix matrix;
  std::size_t rank = 0;
};

/// Logarithmic Jacobian (x_i / f_j) df_j/dx_i at a residue point; its
/// entries are e_ij + x_i (du_j/dx_i) / u_j.
inline LogJacobian log_jacobian(const MonomialChart& chart, const std::vector<std::uint64_t>& point, std::uint64_t p) {
  chart.validate();
  if (point.size() != chart.n) throw Error(ErrorKind::ArityMismatch, "residue point has wrong dimension");
  LogJacobian lj;
  lj.matrix.assign(chart.n, std::vector<std::uint64_t>(chart.m, 0));
  for (std::size_t j = 0; j < chart.m; ++j) {
    const std::uint64_t u = chart.units[j].eval_mod(point, p);
    if (u == 0) throw Error(ErrorKind::UnitViolation, "u_" + std::to_string(j + 1) + " vanishes at the residue point");
    const std::uint64_t uinv = fp::inv(u, p);
    for (std::size_t i = 0; i < chart.n; ++i) {
      std::uint64_t entry = chart.exponents[j][i] % p;
      if (point[i] % p) {
        const std::uint64_t du = chart.units[j].derivative(i).eval_mod(point, p);
        entry = fp::add(entry, fp::mul(fp::mul(point[i] % p, du, p), uinv, p), p);
      }
      lj.matrix[i][j] = entry;
    }
  }
  lj.rank = rank_mod_p(lj.matrix, p);
  return lj;
}

/// Full rank m, the relative dimension of the target.
inline bool log_smooth_at(const MonomialChart& chart, const std::vector<std::uint64_t>& point, std::uint64_t p) {
  if (chart.m == 0) return true;
  return log_jacobian(chart, point, p).rank == chart.m;
}

inline std::vector<std::uint64_t> residue_point(const Point& a) {
  std::vector<std::uint64_t> out;
  for (const auto& x : a) out.push_back(x.residue());
  return out;
}

struct LiftProblem {
  MonomialChart chart;
  Point a0;
  Point b;
};

struct LogHenselResult {
  Point a;
  /// Digits of the output that do not depend on unknown digits of the input.
  int effective_precision = 0;
};

/// Finds a with f(a) = b, a = a0 mod m and mres(a_i) = mres(a0_i), given that
/// f is log-smooth at a0 mod m and mres(b_j) = mres(f_j(a0)).
///
/// Substitutes x_i = x_i(a0)(1 + eps_i), divides equation j by f_j(a0) and
/// lifts the resulting smooth system in eps from the root eps = 0 mod m. Its
/// Jacobian at eps = 0 is the log-Jacobian of f at a0.
inline LogHenselResult log_hensel_solve(const LiftProblem& problem) {
  const MonomialChart& chart = problem.chart;
  chart.validate();
  const Point& a0 = problem.a0;
  const Point& b = problem.b;
  if (a0.size() != chart.n || b.size() != chart.m)
    throw Error(ErrorKind::ArityMismatch, "a0 or b has the wrong dimension for the chart");
  if (a0.empty()) throw Error(ErrorKind::ArityMismatch, "chart with empty source");
  const RingSpec ring = a0.front().ring();
  for (const auto& x : a0) require_same_ring(x.ring(), ring);
  for (const auto& y : b) require_same_ring(y.ring(), ring);
  const int N = ring.prec;

  for (std::size_t i = 0; i < a0.size(); ++i)
    if (a0[i].is_zero_at_precision())
      throw Error(ErrorKind::PrecisionExhausted, "coordinate " + std::to_string(i + 1) + " of a0 is zero at precision");

  const auto residues = residue_point(a0);
  const LogJacobian lj = log_jacobian(chart, residues, ring.p);
  if (lj.rank < chart.m)
    throw Error(ErrorKind::NotLogSmooth, "log-Jacobian has rank " + std::to_string(lj.rank) + " < " + std::to_string(chart.m));
  if (chart.m == 0) return {a0, N};

  const Point fa0 = chart_image(chart, a0);
  int max_v = 0;
  for (const auto& y : fa0) {
    if (y.is_zero_at_precision()) throw Error(ErrorKind::PrecisionExhausted, "f(a0) is zero at precision");
    max_v = std::max(max_v, y.valuation());
  }
  if (N <= max_v + 1)
    throw Error(ErrorKind::PrecisionExhausted, "precision " + std::to_string(N) + " does not exceed valuation " +
                                                   std::to_string(max_v) + " + 1");
  for (std::size_t j = 0; j < chart.m; ++j)
    if (b[j].is_zero_at_precision() || !(mres(b[j]) == mres(fa0[j])))
      throw Error(ErrorKind::ResidueMismatch, "b_" + std::to_string(j + 1) + " and f_" + std::to_string(j + 1) +
                                                  "(a0) have different multiplicative residues");

  // b'_j = b_j / f_j(a0), a unit congruent to 1
  Point target;
  Point inv_u0;
  for (std::size_t j = 0; j < chart.m; ++j) {
    target.push_back(b[j].unit_part() * fa0[j].unit_part().invert());
    inv_u0.push_back(chart.units[j].eval(a0).invert());
  }

  std::vector<std::vector<Polynomial>> du(chart.m);
  for (std::size_t j = 0; j < chart.m; ++j)
    for (std::size_t i = 0; i < chart.n; ++i) du[j].push_back(chart.units[j].derivative(i));

  // square subsystem: eps_i for the pivot columns of the log-Jacobian, the rest stay 0
  ResidueMatrix ljt(chart.m, std::vector<std::uint64_t>(chart.n));
  for (std::size_t j = 0; j < chart.m; ++j)
    for (std::size_t i = 0; i < chart.n; ++i) ljt[j][i] = lj.matrix[i][j];
  const std::vector<std::size_t> unknowns = detail::pivot_columns(ljt, ring.p);

  const LocalElement one = LocalElement::one(ring);
  auto source = [&](const Point& eps) {
    Point x;
    for (std::size_t i = 0; i < chart.n; ++i) x.push_back(a0[i] * (one + eps[i]));
    return x;
  };
  auto monomial = [&](const Point& eps, std::size_t j, std::optional<std::size_t> skip) {
    LocalElement acc = one;
    for (std::size_t i = 0; i < chart.n; ++i) {
      std::uint32_t e = chart.exponents[j][i];
      if (skip && *skip == i) e = e ? e - 1 : 0;
      if (e) acc *= (one + eps[i]).pow(e);
    }
    return acc;
  };

  ResidualFn residual = [&](const Point& eps) {
    const Point x = source(eps);
    Point out;
    for (std::size_t j = 0; j < chart.m; ++j)
      out.push_back(chart.units[j].eval(x) * inv_u0[j] * monomial(eps, j, std::nullopt) - target[j]);
    return out;
  };
  JacobianFn jacobian = [&](const Point& eps) {
    const Point x = source(eps);
    Matrix jac(chart.m);
    for (std::size_t j = 0; j < chart.m; ++j) {
      const LocalElement uj = chart.units[j].eval(x);
      const LocalElement mono = monomial(eps, j, std::nullopt);
      for (std::size_t i : unknowns) {
        LocalElement d = a0[i] * du[j][i].eval(x) * mono;
        if (const std::uint32_t e = chart.exponents[j][i])
          d += uj * LocalElement::embed_integer(e, ring) * monomial(eps, j, i);
        jac[j].push_back(d * inv_u0[j]);
      }
    }
    return jac;
  };

  const Point eps = newton_solve(residual, jacobian, Point(chart.n, LocalElement::zero(ring)), unknowns);
  return {source(eps), N - max_v};
}

/// Searches residue data (valuations up to `search_bound`, unit residues in
/// F_p^x) for a log-smooth a0 whose image has the multiplicative residues
/// of b, then lifts it with log_hensel_solve. Search order is lexicographic
/// in the valuation vector, then in the unit residues.
inline std::optional<Point> surjectivity_probe(const MonomialChart& chart, const Point& b, int search_bound) {
  chart.validate();
  if (b.size() != chart.m) throw Error(ErrorKind::ArityMismatch, "target point has the wrong dimension");
  if (chart.n == 0 || chart.m == 0) throw Error(ErrorKind::InvalidArgument, "probe needs nonempty source and target");
  if (search_bound < 0) throw Error(ErrorKind::InvalidArgument, "negative search bound");
  const RingSpec ring = b.front().ring();
  const std::uint64_t p = ring.p;
  std::vector<MultRes> want;
  for (const auto& y : b) {
    require_same_ring(y.ring(), ring);
    want.push_back(mres(y));
  }

  std::vector<int> vals(chart.n, 0);
  const int vmax = std::min(search_bound, ring.prec - 1);
  for (;;) {
    bool valuation_ok = true;
    for (std::size_t j = 0; j < chart.m && valuation_ok; ++j) {
      std::int64_t v = 0;
      for (std::size_t i = 0; i < chart.n; ++i) v += std::int64_t{chart.exponents[j][i]} * vals[i];
      valuation_ok = v == want[j].valuation();
    }
    if (valuation_ok) {
      std::vector<std::uint64_t> units(chart.n, 1);
      for (;;) {
        std::vector<std::uint64_t> res(chart.n);
        for (std::size_t i = 0; i < chart.n; ++i) res[i] = vals[i] == 0 ? units[i] : 0;
        bool match = true;
        for (std::size_t j = 0; j < chart.m && match; ++j) {
          std::uint64_t lead = chart.units[j].eval_mod(res, p);
          for (std::size_t i = 0; i < chart.n; ++i) lead = fp::mul(lead, fp::pow(units[i], chart.exponents[j][i], p), p);
          match = lead == want[j].unit();
        }
        if (match && log_smooth_at(chart, res, p)) {
          Point a0;
          for (std::size_t i = 0; i < chart.n; ++i)
            a0.push_back(LocalElement::embed_integer(static_cast<std::int64_t>(units[i]), ring) *
                         LocalElement::uniformizer_power(vals[i], ring));
          return log_hensel_solve({chart, a0, b}).a;
        }
        std::size_t k = chart.n;
        while (k > 0 && units[k - 1] == p - 1) units[--k] = 1;
        if (k == 0) break;
        ++units[k - 1];
      }
    }
    std::size_t k = chart.n;
    while (k > 0 && vals[k - 1] == vmax) vals[--k] = 0;
    if (k == 0) break;
    ++vals[k - 1];
  }
  return std::nullopt;
}

}  // namespace hlab
