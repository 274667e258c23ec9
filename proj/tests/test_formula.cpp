#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "hlab/evaluator.hpp"
#include "hlab/parser.hpp"

using namespace hlab;

namespace {

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

EvalConfig config(RingSpec ring, int k = 1, int v = 2) {
  EvalConfig c;
  c.ring = ring;
  c.ring_depth = k;
  c.val_cap = v;
  return c;
}

// Random well-sorted ASTs for the printer round trip.
struct AstGen {
  std::mt19937_64 rng;
  explicit AstGen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TermPtr ring_term(int depth) {
    static const char* names[] = {"x", "y", "z1"};
    if (depth == 0 || pick(3) == 0) return pick(2) ? term::var(names[pick(3)]) : term::lit(pick(12));
    switch (pick(4)) {
      case 0: return term::add(ring_term(depth - 1), ring_term(depth - 1));
      case 1: return term::sub(ring_term(depth - 1), ring_term(depth - 1));
      case 2: return term::mul(ring_term(depth - 1), ring_term(depth - 1));
      default: return term::neg(ring_term(depth - 1));
    }
  }

  TermPtr residue_term(int depth) {
    static const char* names[] = {"%a", "%b"};
    if (depth == 0 || pick(3) == 0) {
      switch (pick(3)) {
        case 0: return term::var(names[pick(2)]);
        case 1: return term::lit(pick(2), Sort::Residue);
        default: return term::mres(ring_term(1));
      }
    }
    return pick(2) ? term::mul(residue_term(depth - 1), residue_term(depth - 1))
                   : term::mod_add(residue_term(depth - 1), residue_term(depth - 1));
  }

  FormulaPtr atom() {
    if (pick(2)) return formula::atom(ring_term(2), ring_term(2));
    // a residue atom needs a residue-only construct somewhere to keep its sort on reparse
    return formula::atom(term::mod_add(residue_term(1), residue_term(1)), residue_term(2));
  }

  FormulaPtr formula(int depth) {
    if (depth == 0) return atom();
    switch (pick(8)) {
      case 0: return formula::negation(formula(depth - 1));
      case 1: return formula::conj(formula(depth - 1), formula(depth - 1));
      case 2: return formula::disj(formula(depth - 1), formula(depth - 1));
      case 3: return formula::implies(formula(depth - 1), formula(depth - 1));
      case 4: return formula::iff(formula(depth - 1), formula(depth - 1));
      case 5: return formula::exists(pick(2) ? "x" : "%a", formula(depth - 1));
      case 6: return formula::forall(pick(2) ? "y" : "%b", formula(depth - 1));
      default: return atom();
    }
  }

  // Closed formulas of pure L_MR.
  FormulaPtr residue_sentence(int depth, int bound) {
    static const char* names[] = {"%a", "%b", "%c"};
    if (depth == 0 || (bound > 0 && pick(4) == 0)) {
      auto leaf = [&]() -> TermPtr {
        if (bound > 0 && pick(3)) return term::var(names[pick(bound)]);
        return term::lit(pick(2), Sort::Residue);
      };
      auto t = [&](auto&& self, int d) -> TermPtr {
        if (d == 0 || pick(2)) return leaf();
        return pick(2) ? term::mul(self(self, d - 1), self(self, d - 1)) : term::mod_add(self(self, d - 1), self(self, d - 1));
      };
      return formula::atom(t(t, 2), t(t, 2));
    }
    switch (pick(5)) {
      case 0: return formula::negation(residue_sentence(depth - 1, bound));
      case 1: return formula::conj(residue_sentence(depth - 1, bound), residue_sentence(depth - 1, bound));
      case 2: return formula::disj(residue_sentence(depth - 1, bound), residue_sentence(depth - 1, bound));
      default: {
        if (bound == 3) return residue_sentence(depth - 1, bound);
        auto body = residue_sentence(depth - 1, bound + 1);
        return pick(2) ? formula::exists(names[bound], body) : formula::forall(names[bound], body);
      }
    }
  }
};

}  // namespace

TEST(Parse, KnownValues) {
  auto f = parse("exists x. x*x = 2");
  EXPECT_EQ(f->kind, Formula::Kind::Exists);
  EXPECT_EQ(f->sort, Sort::Ring);
  EXPECT_EQ(f->var, "x");

  auto g = parse("exists %a. %a +mod %b = 0");
  EXPECT_EQ(g->kind, Formula::Kind::Exists);
  EXPECT_EQ(g->sort, Sort::Residue);
  EXPECT_EQ(g->body()->lhs->op, Term::Op::ModAdd);
  EXPECT_EQ(g->body()->rhs->sort, Sort::Residue);

  EXPECT_EQ(parse_error_kind("exists %a. %a *mod %b = 0"), ErrorKind::SyntaxError);

  auto h = parse("mres(x) = %a");
  EXPECT_EQ(h->kind, Formula::Kind::Atom);
  EXPECT_EQ(h->sort, Sort::Residue);
  EXPECT_EQ(h->lhs->op, Term::Op::Mres);
  EXPECT_EQ(h->lhs->args[0]->sort, Sort::Ring);
}

TEST(Parse, SortErrors) {
  EXPECT_EQ(parse_error_kind("mres(%a) = %a"), ErrorKind::SortError);
  EXPECT_EQ(parse_error_kind("x = %a"), ErrorKind::SortError);
  EXPECT_EQ(parse_error_kind("%a = 2"), ErrorKind::SortError);
  EXPECT_EQ(parse_error_kind("x +mod y = 0"), ErrorKind::SortError);
  EXPECT_EQ(parse_error_kind("%a + %b = 0"), ErrorKind::SortError);
  EXPECT_EQ(parse_error_kind("-%a = %a"), ErrorKind::SortError);
  EXPECT_EQ(parse_error_kind("x * %a = %a"), ErrorKind::SortError);
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
  EXPECT_EQ(parse_error_kind("exists x x = 1"), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error_kind("forall and. x = 1"), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error_kind("x = "), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error_kind("x = 1 and"), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error_kind("(x = 1"), ErrorKind::SyntaxError);
  EXPECT_EQ(parse_error_kind("x = 1 $"), ErrorKind::SyntaxError);
  try {
    parse("x = 1 ]");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 6u);
  }
}

TEST(Parse, PrecedenceAndParentheses) {
  auto f = parse("x = 0 or y = 0 and z = 0");
  EXPECT_EQ(f->kind, Formula::Kind::Or);
  auto g = parse("(x = 0 or y = 0) and z = 0");
  EXPECT_EQ(g->kind, Formula::Kind::And);
  auto h = parse("(x + 1) * y = 0 -> x = 0 -> y = 0");
  EXPECT_EQ(h->kind, Formula::Kind::Implies);
  EXPECT_EQ(h->args[1]->kind, Formula::Kind::Implies);
  EXPECT_EQ(h->args[0]->lhs->op, Term::Op::Mul);
  auto q = parse("exists x. x = 0 and y = 0");
  EXPECT_EQ(q->body()->kind, Formula::Kind::And);
  auto n = parse("not x = 0 <-> y = 1");
  EXPECT_EQ(n->kind, Formula::Kind::Iff);
  auto lit_only = parse("0 = 1");
  EXPECT_EQ(lit_only->sort, Sort::Ring);
  auto res_lit = parse("%a * 1 = %a");
  EXPECT_EQ(res_lit->lhs->args[1]->sort, Sort::Residue);
}

TEST(Printer, ParseOfPrintIsIdentity) {
  AstGen gen(11);
  for (int i = 0; i < 2000; ++i) {
    FormulaPtr f = gen.formula(4);
    const std::string text = to_string(*f);
    FormulaPtr g;
    ASSERT_NO_THROW(g = parse(text)) << text;
    EXPECT_TRUE(same_formula(*f, *g)) << text << "  reprinted  " << to_string(*g);
  }
}

TEST(Printer, Examples) {
  EXPECT_EQ(to_string(*parse("exists x.x*x=2")), "exists x. x * x = 2");
  EXPECT_EQ(to_string(*parse("(exists x. x = 0) and y = 1")), "(exists x. x = 0) and y = 1");
  EXPECT_EQ(to_string(*parse("x - (y - z) = -(x*y)")), "x - (y - z) = -(x * y)");
}

TEST(Kleene, Laws) {
  const TruthValue T = TruthValue::True, F = TruthValue::False, U = TruthValue::Unknown;
  EXPECT_EQ(k_not(U), U);
  EXPECT_EQ(k_or(T, U), T);
  EXPECT_EQ(k_and(F, U), F);
  EXPECT_EQ(k_and(T, U), U);
  EXPECT_EQ(k_or(F, U), U);
  EXPECT_EQ(k_implies(F, U), T);
  EXPECT_EQ(k_implies(U, T), T);
  EXPECT_EQ(k_iff(U, T), U);
  EXPECT_EQ(k_iff(F, F), T);
  for (TruthValue a : {T, F, U})
    for (TruthValue b : {T, F, U}) {
      EXPECT_EQ(k_not(k_and(a, b)), k_or(k_not(a), k_not(b)));
      EXPECT_EQ(k_and(a, b), k_and(b, a));
    }
}

TEST(Evaluate, KnownValues) {
  auto sq2 = parse("exists x. x*x = 2");
  auto zp = evaluate_explained(*sq2, {}, config(padic(7, 8)));
  EXPECT_EQ(zp.value, TruthValue::True);
  ASSERT_TRUE(zp.certificate);
  EXPECT_EQ(describe(zp), "true (certified: witness 3 mod 7, Hensel)");
  // the lifted root squares to 2 at full precision
  const auto& root = zp.certificate->lifted.front();
  EXPECT_EQ(root * root, embed_integer(2, padic(7, 8)));

  auto fpt = evaluate_explained(*sq2, {}, config(power_series(7, 8)));
  EXPECT_EQ(fpt.value, TruthValue::True);
  // 3 * 3 = 2 holds exactly in F_7, so no lift is needed
  EXPECT_EQ(describe(fpt), "true");

  EXPECT_EQ(evaluate(*parse("0 = 1"), config(padic(5, 8))), TruthValue::False);
  EXPECT_EQ(evaluate(*parse("1 = 1"), config(padic(5, 8))), TruthValue::True);
  for (RingSpec r : {padic(5, 8), power_series(5, 8), padic(2, 4)})
    EXPECT_EQ(evaluate(*parse("forall %a. %a * 1 = %a"), config(r)), TruthValue::True);
}

TEST(Evaluate, HonestUnknowns) {
  const EvalConfig z7 = config(padic(7, 8));
  // 3 is not a square mod 7, but the bounded search cannot refute existence
  EXPECT_EQ(evaluate(*parse("exists x. x*x = 3"), z7), TruthValue::Unknown);
  // no certificate without certification
  EvalConfig plain = z7;
  plain.certify = false;
  EXPECT_EQ(evaluate(*parse("exists x. x*x = 2"), plain), TruthValue::Unknown);
  // a*a = mres(7) has no solution but valuation parity lies beyond the syntactic check
  EXPECT_EQ(evaluate(*parse("exists %a. %a * %a = mres(7)"), z7), TruthValue::Unknown);
  EXPECT_EQ(evaluate(*parse("exists %a. %a * %a = %a and not %a = 1 and not %a = 0"), z7), TruthValue::Unknown);
  // 7*7 is zero at precision 2 without being exactly zero
  EXPECT_EQ(evaluate(*parse("exists x. x*x = 0 and not x = 0"), config(padic(7, 2), 2)), TruthValue::Unknown);
}

TEST(Evaluate, DeterminateResults) {
  const EvalConfig z7 = config(padic(7, 8));
  EXPECT_EQ(evaluate(*parse("forall x. x*x = x"), z7), TruthValue::False);
  EXPECT_EQ(evaluate(*parse("exists x. x + x = 6"), z7), TruthValue::True);
  EXPECT_EQ(evaluate(*parse("exists %a. %a +mod 1 = 0"), z7), TruthValue::True);
  EXPECT_EQ(evaluate(*parse("forall %a. %a +mod 0 = %a"), z7), TruthValue::False);
  EXPECT_EQ(evaluate(*parse("forall %a. %a +mod 0 = 0 or not %a +mod 0 = 0"), z7), TruthValue::True);
  // an s-only body is decided even with V = 0
  EXPECT_EQ(evaluate(*parse("exists %a. %a +mod %a = 1"), config(padic(2, 4), 1, 0)), TruthValue::False);
  // a class-dependent body needs V >= 1
  EXPECT_EQ(evaluate(*parse("forall %a. %a * 1 = %a"), config(padic(3, 4), 1, 0)), TruthValue::Unknown);
  EXPECT_EQ(evaluate(*parse("forall %a. %a * 1 = %a"), config(padic(3, 4), 1, 1)), TruthValue::True);
  EXPECT_EQ(evaluate(*parse("forall %a. exists %b. %a * %b = %b * %a"), z7), TruthValue::True);
  // false at %a = Zero, but the inner body is not class-determined in %b
  EXPECT_EQ(evaluate(*parse("forall %a. exists %b. %a * %b = 1"), z7), TruthValue::Unknown);
  // two-variable block certified along y
  auto two = evaluate_explained(*parse("exists x. exists y. x*x + y*y = 3"), {}, z7);
  EXPECT_EQ(two.value, TruthValue::True);
  ASSERT_TRUE(two.certificate);
  EXPECT_EQ(two.certificate->vars.size(), 2u);
}

TEST(Evaluate, AssignmentsAndErrors) {
  const RingSpec z5 = padic(5, 6);
  Assignment a;
  a.ring.emplace("x", embed_integer(10, z5));
  a.residue.emplace("%a", MultRes::pos(z5, 1, 2));
  EXPECT_EQ(evaluate(*parse("mres(x) = %a"), a, config(z5)), TruthValue::True);
  EXPECT_EQ(evaluate(*parse("mres(x*x) = %a * %a"), a, config(z5)), TruthValue::True);
  EXPECT_EQ(evaluate(*parse("mres(x + 1) = %a"), a, config(z5)), TruthValue::False);
  // a given value that is zero at precision has an unknown residue
  Assignment z;
  z.ring.emplace("x", embed_integer(0, z5));
  z.residue.emplace("%a", MultRes::zero(z5));
  EXPECT_EQ(evaluate(*parse("mres(x) = %a"), z, config(z5)), TruthValue::Unknown);
  EXPECT_EQ(evaluate(*parse("mres(x - x) = %a"), z, config(z5)), TruthValue::True);

  try {
    evaluate(*parse("x = 1"), config(z5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnboundVariable);
  }
  Assignment bad;
  bad.ring.emplace("%a", embed_integer(1, z5));
  EXPECT_THROW(evaluate(*parse("1 = 1"), bad, config(z5)), Error);
  Assignment other;
  other.ring.emplace("x", embed_integer(1, padic(7, 6)));
  EXPECT_THROW(evaluate(*parse("x = 1"), other, config(z5)), Error);
  EvalConfig deep = config(z5);
  deep.ring_depth = 7;
  EXPECT_THROW(evaluate(*parse("1 = 1"), deep), Error);
}

TEST(Evaluate, DepthTwoRepresentatives) {
  // x*x = 7 has no root mod 7, but x = 0 mod 7 is a root of x*x = 49 mod 49
  EvalConfig c = config(padic(7, 8), 2);
  EXPECT_EQ(evaluate(*parse("exists x. x*x = 49"), c), TruthValue::True);
  EXPECT_EQ(evaluate(*parse("exists x. x*x = 2"), c), TruthValue::True);
  EXPECT_EQ(describe(evaluate_explained(*parse("exists x. x*x = 2"), {}, c)), "true (certified: witness 10 mod 49, Hensel)");
}

TEST(TransferCheck, KnownValues) {
  EvalConfig c;
  auto r = transfer_check(*parse("exists x. x*x = 2"), 7, c);
  EXPECT_EQ(r.zp, TruthValue::True);
  EXPECT_EQ(r.fpt, TruthValue::True);
  EXPECT_EQ(r.agree, TruthValue::True);
  r = transfer_check(*parse("exists x. x*x + 1 = 0"), 13, c);
  EXPECT_EQ(r.agree, TruthValue::True);
  EXPECT_EQ(r.zp, TruthValue::True);
  for (std::uint32_t p : {2u, 3u, 53u}) EXPECT_EQ(transfer_check(*parse("1 = 1"), p, c).agree, TruthValue::True);
  // small primes do see the difference between the rings
  r = transfer_check(*parse("0 = 7"), 7, c);
  EXPECT_EQ(r.zp, TruthValue::False);
  EXPECT_EQ(r.fpt, TruthValue::True);
  EXPECT_EQ(r.agree, TruthValue::False);
  EXPECT_EQ(transfer_check(*parse("exists x. x*x = 3"), 7, c).agree, TruthValue::Unknown);
  EXPECT_THROW(transfer_check(*parse("x = 1"), 7, c), Error);
}

// Closed pure L_MR sentences evaluate the same over MR(Z_p) and MR(F_p[[t]]).
TEST(Properties, TauInvariance) {
  AstGen gen(5);
  int determinate = 0;
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    for (int i = 0; i < 150; ++i) {
      FormulaPtr f = gen.residue_sentence(3, 0);
      for (int v : {0, 1, 2}) {
        TruthValue a = evaluate(*f, config(padic(p, 6), 1, v));
        TruthValue b = evaluate(*f, config(power_series(p, 6), 1, v));
        EXPECT_EQ(a, b) << to_string(*f) << " p=" << p;
        if (is_determinate(a)) ++determinate;
      }
    }
  }
  EXPECT_GT(determinate, 100);
}

// Determinate answers on one-variable root problems match integer arithmetic.
TEST(Properties, RingSoundness) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> coef(-6, 6);
  for (std::uint32_t p : {3u, 5u, 7u}) {
    for (int i = 0; i < 120; ++i) {
      int c0 = coef(rng), c1 = coef(rng), c2 = coef(rng);
      std::string text = "exists x. x*x*" + std::to_string(c2 < 0 ? -c2 : c2) + (c2 < 0 ? " * -1" : "") + " + " +
                         std::to_string(c1 < 0 ? -c1 : c1) + "*x" + (c1 < 0 ? "*(0-1)" : "") + " = " +
                         std::to_string(c0 < 0 ? -c0 : c0) + (c0 < 0 ? " * -1" : "");
      auto f = parse(text);
      auto poly = to_polynomial(*f->body()->lhs, {"x"}) - to_polynomial(*f->body()->rhs, {"x"});
      auto out = evaluate_explained(*f, {}, config(padic(p, 8)));
      ASSERT_NE(out.value, TruthValue::False) << text;
      if (out.value != TruthValue::True) continue;
      if (out.certificate) {
        EXPECT_TRUE(poly.eval(out.certificate->lifted).is_zero_at_precision()) << text;
        EXPECT_TRUE(poly.derivative(0).eval(out.certificate->representatives).is_unit()) << text;
      } else {
        // an exact root among 0..p-1
        bool exact = false;
        for (std::int64_t x = 0; x < p; ++x) exact |= c2 * x * x + c1 * x - c0 == 0;
        EXPECT_TRUE(exact) << text;
      }
    }
  }
}
