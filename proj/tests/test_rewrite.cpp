#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <string>

#include "hlab/evaluator.hpp"
#include "hlab/parser.hpp"
#include "hlab/rewrite.hpp"
#include "support/oracles.hpp"

using namespace hlab;

using oracle::FieldOracle;
using oracle::RingFormulaGen;
using oracle::residue_with_s;

TEST(InterpretResidueField, Examples) {
  EXPECT_EQ(to_string(*interpret_residue_field(*parse("x = 0"))), "%x +mod 0 = 0");
  EXPECT_EQ(to_string(*interpret_residue_field(*parse("exists x. x*x = y"))),
            "exists %x. %x * %x = %y or %x * %x +mod 0 = 0 and %y +mod 0 = 0");
  EXPECT_EQ(to_string(*interpret_residue_field(*parse("x + 1 = x + 1"))), "1 +mod 0 = 1");
  EXPECT_EQ(to_string(*interpret_residue_field(*parse("3 = 0"))), "1 +mod 1 +mod 1 +mod 0 = 0");
  EXPECT_EQ(to_string(*interpret_residue_field(*parse("x*y = 2"))),
            "%x * %y = 1 +mod 1 or %x * %y +mod 0 = 0 and 1 +mod 1 +mod 0 = 0");
}

TEST(InterpretResidueField, RejectsMixedInput) {
  try {
    interpret_residue_field(*parse("mres(x) = %a"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SortError);
  }
  EXPECT_THROW(interpret_residue_field(*parse("exists %a. %a = 1")), Error);
}

TEST(InterpretResidueField, OutputIsPureResidueLanguage) {
  RingFormulaGen gen(3);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.formula(3, {"x", "y"});
    auto theta = interpret_residue_field(*f);
    // variables that cancel out of every atom disappear
    const auto before = free_vars(*f);
    for (const auto& v : free_vars(*theta)) {
      EXPECT_EQ(sort_of_name(v), Sort::Residue);
      EXPECT_NE(std::find(before.begin(), before.end(), v.substr(1)), before.end());
    }
    // printable and reparsable
    EXPECT_TRUE(same_formula(*theta, *parse(to_string(*theta))));
  }
}

// Truth over F_p matches the bounded truth of the rewritten formula over
// MR(Z_p) and MR(F_p[[t]]) for every residue assignment.
TEST(InterpretResidueField, RoundTripOverSmallFields) {
  RingFormulaGen gen(17);
  std::mt19937_64 rng(18);
  int checked = 0;
  for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
    for (int i = 0; i < 60; ++i) {
      auto f = gen.formula(3, {"x", "y"});
      auto theta = interpret_residue_field(*f);
      const auto free = free_vars(*f);
      FieldOracle oracle{p};
      std::vector<std::uint32_t> values(free.size(), 0);
      for (;;) {
        std::map<std::string, std::int64_t> env;
        for (std::size_t k = 0; k < free.size(); ++k) env[free[k]] = values[k];
        const bool expected = oracle.holds(*f, env);
        for (RingSpec ring : {padic(p, 4), power_series(p, 4)}) {
          EvalConfig cfg;
          cfg.ring = ring;
          cfg.val_cap = 1;
          Assignment a;
          for (std::size_t k = 0; k < free.size(); ++k) a.residue.emplace("%" + free[k], residue_with_s(values[k], ring, rng));
          TruthValue got = evaluate(*theta, a, cfg);
          EXPECT_EQ(got, expected ? TruthValue::True : TruthValue::False)
              << to_string(*f) << "  =>  " << to_string(*theta) << "  p=" << p;
          ++checked;
        }
        std::size_t k = 0;
        while (k < values.size() && ++values[k] == p) values[k++] = 0;
        if (k == values.size()) break;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

// The residue image of a chart, described in L_MR, matches images of actual points.
TEST(ChartResidueImage, MatchesPointImages) {
  std::mt19937_64 rng(21);
  const std::vector<std::string> v2{"x1", "x2"};
  auto x1 = Polynomial::variable(0, v2), x2 = Polynomial::variable(1, v2);
  MonomialChart product = MonomialChart::monomial({{1, 1}});
  MonomialChart square = MonomialChart::monomial({{2, 0}});
  MonomialChart twisted = MonomialChart::monomial({{1, 2}});
  twisted.units[0] = Polynomial::constant(1, v2) + x1 + x2 * x2;
  const int cap = 2;
  for (std::uint32_t p : {3u, 5u}) {
    for (const MonomialChart* chart : {&product, &square, &twisted}) {
      const RingSpec ring = padic(p, 10);
      // images of points u * p^v with random higher digits
      std::set<std::pair<std::int64_t, std::uint32_t>> reached;
      for (int v1 = 0; v1 <= cap; ++v1)
        for (int v2i = 0; v2i <= cap; ++v2i)
          for (std::uint32_t u1 = 1; u1 < p; ++u1)
            for (std::uint32_t u2 = 1; u2 < p; ++u2) {
              std::uniform_int_distribution<std::int64_t> hi(0, 50);
              Point a{embed_integer(static_cast<std::int64_t>(u1) + p * hi(rng), ring) * LocalElement::uniformizer_power(v1, ring),
                      embed_integer(static_cast<std::int64_t>(u2) + p * hi(rng), ring) * LocalElement::uniformizer_power(v2i, ring)};
              if (!chart->units[0].eval(a).is_unit()) continue;
              auto m = mres(chart_image(*chart, a)[0]);
              reached.insert({m.valuation(), m.unit()});
            }
      auto psi = chart_residue_image(*chart);
      EvalConfig cfg;
      cfg.ring = ring;
      cfg.val_cap = cap;
      for (int v = 0; v <= 4; ++v)
        for (std::uint32_t u = 1; u < p; ++u) {
          Assignment a;
          a.residue.emplace("%l1", MultRes::pos(ring, v, u));
          TruthValue t = evaluate(*psi, a, cfg);
          const bool hit = reached.count({v, u}) > 0;
          EXPECT_EQ(t == TruthValue::True, hit) << to_string(*psi) << " v=" << v << " u=" << u << " p=" << p;
          EXPECT_NE(t, TruthValue::False);
        }
    }
  }
}
