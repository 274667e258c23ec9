#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/polynomial.hpp"

namespace hlab {

/// First sort: elements of A. Second sort: elements of MR(A).
enum class Sort { Ring, Residue };

inline Sort sort_of_name(const std::string& name) { return !name.empty() && name[0] == '%' ? Sort::Residue : Sort::Ring; }

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Ring terms use Var, Lit, Add, Sub, Neg, Mul. Residue terms use Var, Lit
/// (0 and 1 only), Mul, ModAdd and Mres, whose argument is a ring term.
struct Term {
  enum class Op { Var, Lit, Add, Sub, Neg, Mul, ModAdd, Mres };

  Op op = Op::Lit;
  Sort sort = Sort::Ring;
  std::string name;
  std::int64_t value = 0;
  std::vector<TermPtr> args;
};

namespace term {

inline TermPtr make(Term::Op op, Sort sort, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->sort = sort;
  t->args = std::move(args);
  return t;
}

inline TermPtr var(const std::string& name) {
  auto t = std::make_shared<Term>();
  t->op = Term::Op::Var;
  t->sort = sort_of_name(name);
  t->name = name;
  return t;
}

inline TermPtr lit(std::int64_t v, Sort sort = Sort::Ring) {
  auto t = std::make_shared<Term>();
  t->op = Term::Op::Lit;
  t->sort = sort;
  t->value = v;
  return t;
}

inline TermPtr add(TermPtr a, TermPtr b) { return make(Term::Op::Add, Sort::Ring, {std::move(a), std::move(b)}); }
inline TermPtr sub(TermPtr a, TermPtr b) { return make(Term::Op::Sub, Sort::Ring, {std::move(a), std::move(b)}); }
inline TermPtr neg(TermPtr a) { return make(Term::Op::Neg, Sort::Ring, {std::move(a)}); }
inline TermPtr mul(TermPtr a, TermPtr b) {
  Sort s = a->sort;
  return make(Term::Op::Mul, s, {std::move(a), std::move(b)});
}
inline TermPtr mod_add(TermPtr a, TermPtr b) { return make(Term::Op::ModAdd, Sort::Residue, {std::move(a), std::move(b)}); }
inline TermPtr mres(TermPtr a) { return make(Term::Op::Mres, Sort::Residue, {std::move(a)}); }

}  // namespace term

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies, Iff, Exists, Forall };

  Kind kind = Kind::Atom;
  /// Sort of the compared terms (atoms) or of the bound variable (quantifiers).
  Sort sort = Sort::Ring;
  TermPtr lhs, rhs;
  std::string var;
  std::vector<FormulaPtr> args;

  bool is_quantifier() const { return kind == Kind::Exists || kind == Kind::Forall; }
  const FormulaPtr& body() const { return args.front(); }
};

namespace formula {

inline FormulaPtr atom(TermPtr lhs, TermPtr rhs) {
  if (lhs->sort != rhs->sort) throw Error(ErrorKind::SortError, "equality between terms of different sorts");
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->sort = lhs->sort;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

inline FormulaPtr connective(Formula::Kind kind, std::vector<FormulaPtr> args) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->args = std::move(args);
  return f;
}

inline FormulaPtr negation(FormulaPtr a) { return connective(Formula::Kind::Not, {std::move(a)}); }
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return connective(Formula::Kind::And, {std::move(a), std::move(b)}); }
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return connective(Formula::Kind::Or, {std::move(a), std::move(b)}); }
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return connective(Formula::Kind::Implies, {std::move(a), std::move(b)}); }
inline FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return connective(Formula::Kind::Iff, {std::move(a), std::move(b)}); }

inline FormulaPtr quantifier(Formula::Kind kind, const std::string& var, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->var = var;
  f->sort = sort_of_name(var);
  f->args = {std::move(body)};
  return f;
}

inline FormulaPtr exists(const std::string& var, FormulaPtr body) { return quantifier(Formula::Kind::Exists, var, std::move(body)); }
inline FormulaPtr forall(const std::string& var, FormulaPtr body) { return quantifier(Formula::Kind::Forall, var, std::move(body)); }

}  // namespace formula

inline bool same_term(const Term& a, const Term& b) {
  if (a.op != b.op || a.sort != b.sort || a.name != b.name || a.value != b.value || a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_term(*a.args[i], *b.args[i])) return false;
  return true;
}

inline bool same_formula(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.sort != b.sort || a.var != b.var || a.args.size() != b.args.size()) return false;
  if (a.kind == Formula::Kind::Atom) return same_term(*a.lhs, *b.lhs) && same_term(*a.rhs, *b.rhs);
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_formula(*a.args[i], *b.args[i])) return false;
  return true;
}

inline void collect_vars(const Term& t, std::vector<std::string>& out) {
  if (t.op == Term::Op::Var && std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
  for (const auto& a : t.args) collect_vars(*a, out);
}

inline bool term_mentions(const Term& t, const std::string& var) {
  if (t.op == Term::Op::Var) return t.name == var;
  return std::any_of(t.args.begin(), t.args.end(), [&](const TermPtr& a) { return term_mentions(*a, var); });
}

/// Free variables in order of first occurrence.
inline std::vector<std::string> free_vars(const Formula& f) {
  std::vector<std::string> out;
  if (f.kind == Formula::Kind::Atom) {
    collect_vars(*f.lhs, out);
    collect_vars(*f.rhs, out);
    return out;
  }
  for (const auto& a : f.args)
    for (auto& v : free_vars(*a))
      if ((!f.is_quantifier() || v != f.var) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

inline bool is_free_in(const Formula& f, const std::string& var) {
  if (f.kind == Formula::Kind::Atom) return term_mentions(*f.lhs, var) || term_mentions(*f.rhs, var);
  if (f.is_quantifier() && f.var == var) return false;
  return std::any_of(f.args.begin(), f.args.end(), [&](const FormulaPtr& a) { return is_free_in(*a, var); });
}

/// Whether the formula uses only the ring sort.
inline bool is_pure_rings(const Formula& f) {
  if (f.kind == Formula::Kind::Atom) return f.sort == Sort::Ring;
  if (f.is_quantifier() && f.sort != Sort::Ring) return false;
  return std::all_of(f.args.begin(), f.args.end(), [](const FormulaPtr& a) { return is_pure_rings(*a); });
}

/// Expands a ring term into a polynomial over `vars`.
inline Polynomial to_polynomial(const Term& t, const std::vector<std::string>& vars) {
  if (t.sort != Sort::Ring) throw Error(ErrorKind::SortError, "residue-sort term where a ring term is required");
  switch (t.op) {
    case Term::Op::Var: {
      auto it = std::find(vars.begin(), vars.end(), t.name);
      if (it == vars.end()) throw Error(ErrorKind::UnboundVariable, t.name);
      return Polynomial::variable(static_cast<std::size_t>(it - vars.begin()), vars);
    }
    case Term::Op::Lit: return Polynomial::constant(t.value, vars);
    case Term::Op::Add: return to_polynomial(*t.args[0], vars) + to_polynomial(*t.args[1], vars);
    case Term::Op::Sub: return to_polynomial(*t.args[0], vars) - to_polynomial(*t.args[1], vars);
    case Term::Op::Neg: return -to_polynomial(*t.args[0], vars);
    case Term::Op::Mul: return to_polynomial(*t.args[0], vars) * to_polynomial(*t.args[1], vars);
    default: throw Error(ErrorKind::SortError, "residue operator in a ring term");
  }
}

inline Polynomial to_polynomial(const Term& t) {
  std::vector<std::string> vars;
  collect_vars(t, vars);
  return to_polynomial(t, vars);
}

// Printing. Precedence: sums 1, products 2, unary minus 3, primaries 4.
namespace detail {

inline int term_level(const Term& t) {
  switch (t.op) {
    case Term::Op::Add:
    case Term::Op::Sub:
    case Term::Op::ModAdd: return 1;
    case Term::Op::Mul: return 2;
    case Term::Op::Neg: return 3;
    default: return 4;
  }
}

inline std::string print_term(const Term& t, int required) {
  std::string s;
  switch (t.op) {
    case Term::Op::Var: s = t.name; break;
    case Term::Op::Lit: s = std::to_string(t.value); break;
    case Term::Op::Mres: s = "mres(" + print_term(*t.args[0], 0) + ")"; break;
    case Term::Op::Neg: s = "-" + print_term(*t.args[0], 3); break;
    default: {
      const char* op = t.op == Term::Op::Add ? " + " : t.op == Term::Op::Sub ? " - " : t.op == Term::Op::ModAdd ? " +mod " : " * ";
      const int level = term_level(t);
      s = print_term(*t.args[0], level) + op + print_term(*t.args[1], level + 1);
    }
  }
  return term_level(t) < required ? "(" + s + ")" : s;
}

// Quantifiers 0, iff 1, implies 2, or 3, and 4, not 5, atoms 6. A quantifier
// body extends as far right as possible, so quantifiers below a connective
// are always parenthesized.
inline int formula_level(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 0;
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Not: return 5;
    case Formula::Kind::Atom: return 6;
  }
  return 6;
}

inline std::string print_formula(const Formula& f, int required) {
  std::string s;
  switch (f.kind) {
    case Formula::Kind::Atom: s = print_term(*f.lhs, 0) + " = " + print_term(*f.rhs, 0); break;
    case Formula::Kind::Not: s = "not " + print_formula(*f.args[0], 5); break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      s = std::string(f.kind == Formula::Kind::Exists ? "exists " : "forall ") + f.var + ". " + print_formula(*f.args[0], 0);
      break;
    case Formula::Kind::Implies: s = print_formula(*f.args[0], 3) + " -> " + print_formula(*f.args[1], 2); break;
    default: {
      const int level = formula_level(f);
      const char* op = f.kind == Formula::Kind::Iff ? " <-> " : f.kind == Formula::Kind::Or ? " or " : " and ";
      s = print_formula(*f.args[0], level) + op + print_formula(*f.args[1], level + 1);
    }
  }
  return formula_level(f) < required ? "(" + s + ")" : s;
}

}  // namespace detail

inline std::string to_string(const Term& t) { return detail::print_term(t, 0); }
inline std::string to_string(const Formula& f) { return detail::print_formula(f, 0); }

}  // namespace hlab
