#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/formula.hpp"

namespace hlab {

namespace detail {

struct Token {
  enum class Kind { Int, Name, ResName, Sym, End };
  Kind kind;
  std::string text;
  std::size_t offset;
};

inline bool is_reserved(std::string_view w) {
  return w == "exists" || w == "forall" || w == "and" || w == "or" || w == "not" || w == "mres" || w == "mod";
}

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto word_end = [&](std::size_t j) {
    while (j < src.size() && (std::islower(static_cast<unsigned char>(src[j])) || std::isdigit(static_cast<unsigned char>(src[j])))) ++j;
    return j;
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Token::Kind::Int, std::string(src.substr(i, j - i)), i});
      i = j;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t j = word_end(i);
      out.push_back({Token::Kind::Name, std::string(src.substr(i, j - i)), i});
      i = j;
    } else if (c == '%') {
      if (i + 1 >= src.size() || !std::islower(static_cast<unsigned char>(src[i + 1])))
        throw ParseError(ErrorKind::SyntaxError, i, "residue variable must be % followed by a lowercase letter");
      std::size_t j = word_end(i + 1);
      out.push_back({Token::Kind::ResName, std::string(src.substr(i, j - i)), i});
      i = j;
    } else if (src.substr(i, 3) == "<->") {
      out.push_back({Token::Kind::Sym, "<->", i});
      i += 3;
    } else if (src.substr(i, 2) == "->") {
      out.push_back({Token::Kind::Sym, "->", i});
      i += 2;
    } else if (src.substr(i, 4) == "+mod" && word_end(i + 1) == i + 4) {
      out.push_back({Token::Kind::Sym, "+mod", i});
      i += 4;
    } else if (std::string_view("+-*=().").find(c) != std::string_view::npos) {
      out.push_back({Token::Kind::Sym, std::string(1, c), i});
      ++i;
    } else {
      throw ParseError(ErrorKind::SyntaxError, i, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::Kind::End, "", src.size()});
  return out;
}

// Terms are parsed untyped first; sorts are assigned per atom afterwards,
// since an integer literal takes the sort of the side it is compared with.
enum class Inferred { Any, Ring, Residue };

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  FormulaPtr parse_formula_to_end() {
    FormulaPtr f = formula();
    expect_end();
    return f;
  }

  TermPtr parse_term_to_end() {
    TermPtr t = term();
    expect_end();
    return typed(t, resolve(*t));
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_sym(std::string_view s) const { return peek().kind == Token::Kind::Sym && peek().text == s; }
  bool at_word(std::string_view w) const { return peek().kind == Token::Kind::Name && peek().text == w; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(ErrorKind::SyntaxError, peek().offset, msg); }

  void expect_sym(std::string_view s) {
    if (!at_sym(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  void expect_end() {
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
  }

  FormulaPtr formula() { return iff(); }

  FormulaPtr iff() {
    FormulaPtr f = implies();
    while (at_sym("<->")) {
      ++pos_;
      f = formula::iff(f, implies());
    }
    return f;
  }

  FormulaPtr implies() {
    FormulaPtr f = disjunction();
    if (at_sym("->")) {
      ++pos_;
      f = formula::implies(f, implies());
    }
    return f;
  }

  FormulaPtr disjunction() {
    FormulaPtr f = conjunction();
    while (at_word("or")) {
      ++pos_;
      f = formula::disj(f, conjunction());
    }
    return f;
  }

  FormulaPtr conjunction() {
    FormulaPtr f = unary();
    while (at_word("and")) {
      ++pos_;
      f = formula::conj(f, unary());
    }
    return f;
  }

  FormulaPtr unary() {
    if (at_word("not")) {
      ++pos_;
      return formula::negation(unary());
    }
    if (at_word("exists") || at_word("forall")) {
      const bool ex = peek().text == "exists";
      ++pos_;
      if (peek().kind != Token::Kind::Name && peek().kind != Token::Kind::ResName) fail("expected a variable after quantifier");
      if (peek().kind == Token::Kind::Name && is_reserved(peek().text)) fail("'" + peek().text + "' is reserved");
      std::string var = peek().text;
      ++pos_;
      expect_sym(".");
      FormulaPtr body = formula();
      return ex ? formula::exists(var, body) : formula::forall(var, body);
    }
    if (at_sym("(")) {
      // either a parenthesized formula or an atom whose left term starts with '('
      const std::size_t save = pos_;
      try {
        return atom();
      } catch (const ParseError& e) {
        if (e.kind() == ErrorKind::SortError) throw;
        pos_ = save;
      }
      ++pos_;
      FormulaPtr f = formula();
      expect_sym(")");
      return f;
    }
    return atom();
  }

  FormulaPtr atom() {
    const std::size_t at = peek().offset;
    TermPtr lhs = term();
    expect_sym("=");
    TermPtr rhs = term();
    Inferred l = resolve(*lhs), r = resolve(*rhs);
    if ((l == Inferred::Ring && r == Inferred::Residue) || (l == Inferred::Residue && r == Inferred::Ring))
      throw ParseError(ErrorKind::SortError, at, "equality between a ring term and a residue term");
    Inferred s = l != Inferred::Any ? l : r != Inferred::Any ? r : Inferred::Ring;
    return formula::atom(typed(lhs, s, at), typed(rhs, s, at));
  }

  TermPtr term() {
    TermPtr t = product();
    for (;;) {
      if (at_sym("+")) {
        ++pos_;
        t = raw(Term::Op::Add, {t, product()});
      } else if (at_sym("-")) {
        ++pos_;
        t = raw(Term::Op::Sub, {t, product()});
      } else if (at_sym("+mod")) {
        ++pos_;
        t = raw(Term::Op::ModAdd, {t, product()});
      } else {
        return t;
      }
    }
  }

  TermPtr product() {
    TermPtr t = signed_factor();
    while (at_sym("*")) {
      ++pos_;
      t = raw(Term::Op::Mul, {t, signed_factor()});
    }
    return t;
  }

  TermPtr signed_factor() {
    if (at_sym("-")) {
      ++pos_;
      return raw(Term::Op::Neg, {signed_factor()});
    }
    return primary();
  }

  TermPtr primary() {
    const Token& tok = peek();
    if (tok.kind == Token::Kind::Int) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
      if (ec != std::errc()) fail("integer literal out of range");
      ++pos_;
      auto t = std::make_shared<Term>();
      t->op = Term::Op::Lit;
      t->value = v;
      offsets_.emplace_back(t.get(), tok.offset);
      return t;
    }
    if (tok.kind == Token::Kind::ResName) {
      ++pos_;
      return term::var(tok.text);
    }
    if (tok.kind == Token::Kind::Name) {
      if (tok.text == "mres") {
        const std::size_t at = tok.offset;
        ++pos_;
        expect_sym("(");
        TermPtr arg = term();
        expect_sym(")");
        auto t = raw(Term::Op::Mres, {arg});
        offsets_.emplace_back(t.get(), at);
        return t;
      }
      if (is_reserved(tok.text)) fail("'" + tok.text + "' is reserved");
      ++pos_;
      return term::var(tok.text);
    }
    if (at_sym("(")) {
      ++pos_;
      TermPtr t = term();
      expect_sym(")");
      return t;
    }
    fail(tok.kind == Token::Kind::End ? "unexpected end of input" : "unexpected '" + tok.text + "'");
  }

  TermPtr raw(Term::Op op, std::vector<TermPtr> args) {
    auto t = std::make_shared<Term>();
    t->op = op;
    t->args = std::move(args);
    offsets_.emplace_back(t.get(), peek().offset);
    return t;
  }

  std::size_t offset_of(const Term& t) const {
    for (const auto& [ptr, off] : offsets_)
      if (ptr == &t) return off;
    return 0;
  }

  [[noreturn]] void sort_fail(const Term& t, const std::string& msg) const {
    throw ParseError(ErrorKind::SortError, offset_of(t), msg);
  }

  Inferred resolve(const Term& t) const {
    auto combine = [&](Inferred a, Inferred b) {
      if (a == Inferred::Any) return b;
      if (b == Inferred::Any || a == b) return a;
      sort_fail(t, "operands of different sorts");
    };
    switch (t.op) {
      case Term::Op::Var: return t.sort == Sort::Residue ? Inferred::Residue : Inferred::Ring;
      case Term::Op::Lit: return Inferred::Any;
      case Term::Op::Add:
      case Term::Op::Sub:
      case Term::Op::Neg:
        for (const auto& a : t.args)
          if (resolve(*a) == Inferred::Residue) sort_fail(t, "ring operator applied to a residue term");
        return Inferred::Ring;
      case Term::Op::ModAdd:
        for (const auto& a : t.args)
          if (resolve(*a) == Inferred::Ring) sort_fail(t, "+mod applied to a ring term");
        return Inferred::Residue;
      case Term::Op::Mres:
        if (resolve(*t.args[0]) == Inferred::Residue) sort_fail(t, "mres applied to a residue-sort term");
        return Inferred::Residue;
      case Term::Op::Mul: return combine(resolve(*t.args[0]), resolve(*t.args[1]));
    }
    return Inferred::Any;
  }

  TermPtr typed(const TermPtr& t, Inferred want, std::size_t at = 0) const {
    const Sort s = want == Inferred::Residue ? Sort::Residue : Sort::Ring;
    switch (t->op) {
      case Term::Op::Var: return t;
      case Term::Op::Lit:
        if (s == Sort::Residue && t->value != 0 && t->value != 1)
          sort_fail(*t, "only 0 and 1 are residue-sort constants");
        return term::lit(t->value, s);
      case Term::Op::Add: return term::add(typed(t->args[0], Inferred::Ring, at), typed(t->args[1], Inferred::Ring, at));
      case Term::Op::Sub: return term::sub(typed(t->args[0], Inferred::Ring, at), typed(t->args[1], Inferred::Ring, at));
      case Term::Op::Neg: return term::neg(typed(t->args[0], Inferred::Ring, at));
      case Term::Op::ModAdd:
        return term::mod_add(typed(t->args[0], Inferred::Residue, at), typed(t->args[1], Inferred::Residue, at));
      case Term::Op::Mres: return term::mres(typed(t->args[0], Inferred::Ring, at));
      case Term::Op::Mul: {
        auto m = term::make(Term::Op::Mul, s, {typed(t->args[0], want, at), typed(t->args[1], want, at)});
        return m;
      }
    }
    return t;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<const Term*, std::size_t>> offsets_;
};

}  // namespace detail

/// Parses a formula of L_Rings, L_MR or L_RingsMR. Ring variables are
/// lowercase names, residue variables start with '%'.
inline FormulaPtr parse(std::string_view text) { return detail::Parser(text).parse_formula_to_end(); }

/// Parses a single term; a term with no residue parts is a ring term.
inline TermPtr parse_term(std::string_view text) { return detail::Parser(text).parse_term_to_end(); }

/// Parses a ring term such as "x*x - 7" into a polynomial. Variables are
/// ordered by first occurrence unless `vars` is given.
inline Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& vars = {}) {
  TermPtr t = parse_term(text);
  if (t->sort != Sort::Ring) throw Error(ErrorKind::SortError, "expected a ring term");
  if (vars.empty()) return to_polynomial(*t);
  std::vector<std::string> used;
  collect_vars(*t, used);
  for (const auto& v : used)
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) throw Error(ErrorKind::UnboundVariable, v);
  return to_polynomial(*t, vars);
}

}  // namespace hlab
