#pragma once

#include <string>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/formula.hpp"
#include "hlab/hensel.hpp"
#include "hlab/polynomial.hpp"

namespace hlab {

namespace detail {

inline TermPtr residue_one() { return term::lit(1, Sort::Residue); }
inline TermPtr residue_zero() { return term::lit(0, Sort::Residue); }

// "1 +mod 0 = 1", a residue-sort atom that always holds
inline FormulaPtr residue_true() {
  return formula::atom(term::mod_add(residue_one(), residue_zero()), residue_one());
}

// Residue term whose s_A value is the given non-negative polynomial at
// s_A of the named residue variables.
inline TermPtr residue_image(const Polynomial& poly, const std::vector<std::string>& names) {
  TermPtr sum;
  for (auto it = poly.terms().rbegin(); it != poly.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    TermPtr mono;
    auto times = [&](TermPtr f) { mono = mono ? term::mul(mono, f) : f; };
    if (c > 1) {
      TermPtr coef = residue_one();
      for (std::int64_t i = 1; i < c; ++i) coef = term::mod_add(coef, residue_one());
      times(coef);
    }
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::uint32_t k = 0; k < e[i]; ++k) times(term::var(names[i]));
    if (!mono) mono = residue_one();
    sum = sum ? term::mod_add(sum, mono) : mono;
  }
  return sum ? sum : residue_zero();
}

inline void split_signs(const Polynomial& f, Polynomial& pos, Polynomial& neg) {
  pos = Polynomial(f.vars());
  neg = Polynomial(f.vars());
  for (const auto& [e, c] : f.terms()) {
    if (c > 0) pos.add_term(e, c);
    else neg.add_term(e, -c);
  }
}

}  // namespace detail

/// s_A(t) = 0, written "t +mod 0 = 0".
inline FormulaPtr residue_zero_test(const TermPtr& t) {
  return formula::atom(term::mod_add(t, detail::residue_zero()), detail::residue_zero());
}

/// s_A(a) = s_A(b), written "a = b or (a +mod 0 = 0 and b +mod 0 = 0)".
inline FormulaPtr residue_s_equality(const TermPtr& a, const TermPtr& b) {
  return formula::disj(formula::atom(a, b), formula::conj(residue_zero_test(a), residue_zero_test(b)));
}

/// The L_MR formula expressing F(s_A(y_1), ..., s_A(y_n)) = 0 in the residue
/// field, where names[i] is the residue variable standing for F.vars()[i].
inline FormulaPtr residue_field_equation(const Polynomial& f, const std::vector<std::string>& names) {
  if (names.size() != f.arity()) throw Error(ErrorKind::ArityMismatch, "one residue name per polynomial variable");
  if (f.is_zero()) return detail::residue_true();
  Polynomial pos, neg;
  detail::split_signs(f, pos, neg);
  if (neg.is_zero()) return residue_zero_test(detail::residue_image(pos, names));
  if (pos.is_zero()) return residue_zero_test(detail::residue_image(neg, names));
  return residue_s_equality(detail::residue_image(pos, names), detail::residue_image(neg, names));
}

/// Rewrites a pure L_Rings formula, read over the residue field, into an L_MR
/// formula: x becomes %x, field quantifiers become residue quantifiers, and
/// every equality becomes a statement about s_A.
inline FormulaPtr interpret_residue_field(const Formula& f) {
  if (!is_pure_rings(f)) throw Error(ErrorKind::SortError, "input is not a pure ring-language formula");
  switch (f.kind) {
    case Formula::Kind::Atom: {
      std::vector<std::string> vars;
      collect_vars(*f.lhs, vars);
      collect_vars(*f.rhs, vars);
      Polynomial diff = to_polynomial(*f.lhs, vars) - to_polynomial(*f.rhs, vars);
      std::vector<std::string> names;
      for (const auto& v : vars) names.push_back("%" + v);
      return residue_field_equation(diff, names);
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return formula::quantifier(f.kind, "%" + f.var, interpret_residue_field(*f.body()));
    default: {
      std::vector<FormulaPtr> args;
      for (const auto& a : f.args) args.push_back(interpret_residue_field(*a));
      return formula::connective(f.kind, std::move(args));
    }
  }
}

/// L_MR formula in free residue variables %l1..%lm that holds exactly when
/// (l_1, ..., l_m) = (mres(f_1(a)), ..., mres(f_m(a))) for some a with every
/// u_j(a) a unit. Source residues are %c1..%cn, unit residues %d1..%dm.
inline FormulaPtr chart_residue_image(const MonomialChart& chart) {
  chart.validate();
  const auto vars = MonomialChart::default_vars(chart.n);
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= chart.n; ++i) names.push_back("%c" + std::to_string(i));
  FormulaPtr body;
  for (std::size_t j = 0; j < chart.m; ++j) {
    const std::string d = "%d" + std::to_string(j + 1);
    // s(d_j) = u_j(s(c)), a nonzero field element
    std::vector<std::string> with_d = vars;
    with_d.push_back("unit");
    std::vector<std::string> with_d_names = names;
    with_d_names.push_back(d);
    Polynomial relation = chart.units[j].over(with_d) - Polynomial::variable(chart.n, with_d);
    FormulaPtr clause = formula::conj(residue_field_equation(relation, with_d_names),
                                      formula::negation(residue_zero_test(term::var(d))));
    TermPtr image = term::var(d);
    for (std::size_t i = 0; i < chart.n; ++i)
      for (std::uint32_t k = 0; k < chart.exponents[j][i]; ++k) image = term::mul(image, term::var(names[i]));
    clause = formula::conj(clause, formula::atom(image, term::var("%l" + std::to_string(j + 1))));
    body = body ? formula::conj(body, clause) : clause;
  }
  if (!body) body = detail::residue_true();
  for (std::size_t j = chart.m; j-- > 0;) body = formula::exists("%d" + std::to_string(j + 1), body);
  for (std::size_t i = chart.n; i-- > 0;) body = formula::exists(names[i], body);
  return body;
}

}  // namespace hlab
