#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/evaluator.hpp"
#include "hlab/hensel.hpp"
#include "hlab/io.hpp"
#include "hlab/parser.hpp"
#include "hlab/polynomial.hpp"

namespace hlab {

inline constexpr const char* kReportSchema = "hlab-report-1";

/// A homogeneous form of degree d in n variables, to be solved in `ring`.
struct FormInstance {
  int d = 2;
  std::size_t n = 0;
  Polynomial form;
  RingSpec ring = padic(7, 8);

  /// Throws unless the form is homogeneous of degree d in n variables.
  /// Returns warnings, such as n <= d^2.
  std::vector<std::string> validate() const {
    hlab::validate(ring);
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "degree must be positive");
    if (form.arity() != n) throw Error(ErrorKind::ArityMismatch, "form has " + std::to_string(form.arity()) + " variables, expected " + std::to_string(n));
    if (form.is_zero() || !form.is_homogeneous(d))
      throw Error(ErrorKind::InvalidArgument, "form is not homogeneous of degree " + std::to_string(d));
    std::vector<std::string> warnings;
    if (n <= static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
      warnings.push_back("n = " + std::to_string(n) + " does not exceed d^2 = " + std::to_string(d * d));
    return warnings;
  }

  /// Sum of c_i x_i^d over variables x1..xn.
  static FormInstance diagonal(const std::vector<std::int64_t>& coefs, int d, const RingSpec& ring) {
    FormInstance f;
    f.d = d;
    f.n = coefs.size();
    f.ring = ring;
    const auto vars = MonomialChart::default_vars(f.n);
    f.form = Polynomial(vars);
    for (std::size_t i = 0; i < f.n; ++i) {
      std::vector<std::uint32_t> e(f.n, 0);
      e[i] = static_cast<std::uint32_t>(d);
      f.form.add_term(e, coefs[i]);
    }
    return f;
  }
};

struct SearchOptions {
  std::uint64_t budget = 1'000'000;
  std::uint64_t seed = 0;
  /// Exhaustive search when p^n is at most this.
  std::uint64_t exhaustive_limit = 10'000'000;
};

struct SearchResult {
  std::vector<std::uint64_t> point;
  bool exhaustive = false;
  std::uint64_t candidates = 0;
};

/// Finds x in F_p^n with x != 0, form(x) = 0 and a nonzero gradient.
///
/// Exhaustive search visits points by the index of their last nonzero
/// coordinate, then lexicographically, so sparse zeros come first. Larger
/// spaces are sampled with a seeded generator.
inline SearchResult chevalley_warning_search(const Polynomial& form, std::uint64_t p, const SearchOptions& opt = {}) {
  if (!is_prime(p)) throw Error(ErrorKind::InvalidArgument, std::to_string(p) + " is not prime");
  const std::size_t n = form.arity();
  if (n == 0) throw Error(ErrorKind::ArityMismatch, "form has no variables");
  std::vector<Polynomial> grad;
  for (std::size_t i = 0; i < n; ++i) grad.push_back(form.derivative(i));
  bool saw_singular = false;
  SearchResult out;
  auto smooth_zero = [&](const std::vector<std::uint64_t>& x) {
    ++out.candidates;
    if (form.eval_mod(x, p) != 0) return false;
    for (const auto& g : grad)
      if (g.eval_mod(x, p) != 0) return true;
    saw_singular = true;
    return false;
  };

  const long double space = std::pow(static_cast<long double>(p), static_cast<long double>(n));
  if (space <= static_cast<long double>(opt.exhaustive_limit)) {
    out.exhaustive = true;
    for (std::size_t last = 0; last < n; ++last) {
      std::vector<std::uint64_t> x(n, 0);
      x[last] = 1;
      for (;;) {
        if (smooth_zero(x)) {
          out.point = x;
          return out;
        }
        // odometer on x[0..last], the last coordinate fastest and never zero
        std::size_t k = last + 1;
        bool done = true;
        while (k-- > 0) {
          const std::uint64_t lo = k == last ? 1 : 0;
          if (++x[k] < p) {
            done = false;
            break;
          }
          x[k] = lo;
        }
        if (done) break;
      }
    }
    throw Error(saw_singular ? ErrorKind::SingularOnly : ErrorKind::Exhausted,
                saw_singular ? "every zero mod p is singular" : "no nonzero zero mod p");
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::uint64_t> digit(0, p - 1);
  std::vector<std::uint64_t> x(n);
  for (std::uint64_t s = 0; s < opt.budget; ++s) {
    bool nonzero = false;
    for (auto& c : x) {
      c = digit(rng);
      nonzero |= c != 0;
    }
    if (nonzero && smooth_zero(x)) {
      out.point = x;
      return out;
    }
  }
  throw Error(saw_singular ? ErrorKind::SingularOnly : ErrorKind::Exhausted,
              "no smooth zero among " + std::to_string(opt.budget) + " samples");
}

struct ExperimentReport {
  FormInstance instance;
  std::vector<std::string> warnings;
  SearchResult search;
  std::size_t lifted_coordinate = 0;
  Point witness;
  LocalElement form_value = LocalElement::zero(padic(2, 1));
  std::size_t unit_coordinate = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  double wall_ms = 0;

  /// Wall-clock time is left out so identical runs serialize identically.
  json to_json() const {
    return {{"schema", kReportSchema},
            {"kind", "axkochen"},
            {"instance",
             {{"d", instance.d}, {"n", instance.n}, {"form", to_string(instance.form)}, {"ring", ring_to_json(instance.ring)}}},
            {"warnings", warnings},
            {"outcome", "witness"},
            {"search", {{"strategy", search.exhaustive ? "exhaustive" : "random"}, {"candidates", search.candidates}}},
            {"residue_point", search.point},
            {"lifted_coordinate", lifted_coordinate},
            {"witness", point_to_json(witness)},
            {"verification",
             {{"form_value", element_to_json(form_value)},
              {"zero_at_precision", form_value.is_zero_at_precision()},
              {"unit_coordinate", unit_coordinate}}},
            {"seed", seed},
            {"budget", budget}};
  }
};

/// Independent check of a witness: form(w) zero at precision and some coordinate a unit.
inline bool verify_witness(const Polynomial& form, const Point& w, std::size_t* unit_coordinate = nullptr) {
  if (!form.eval(w).is_zero_at_precision()) return false;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i].is_unit()) {
      if (unit_coordinate) *unit_coordinate = i;
      return true;
    }
  return false;
}

/// Finds a smooth zero mod p and lifts it along one coordinate with a unit
/// partial derivative. The residue search does not depend on the ring kind,
/// so the same seed gives matching leading residues over Z_p and F_p[[t]].
inline ExperimentReport ax_kochen_witness(const FormInstance& instance, const SearchOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.instance = instance;
  report.warnings = instance.validate();
  if (instance.ring.prec < 2) throw Error(ErrorKind::InvalidArgument, "precision must be at least 2");
  report.seed = opt.seed;
  report.budget = opt.budget;
  const std::uint64_t p = instance.ring.p;
  report.search = chevalley_warning_search(instance.form, p, opt);

  const auto& x = report.search.point;
  std::size_t coord = x.size();
  for (std::size_t i = 0; i < x.size() && coord == x.size(); ++i)
    if (instance.form.derivative(i).eval_mod(x, p) != 0) coord = i;
  report.lifted_coordinate = coord;

  Point x0;
  for (auto c : x) x0.push_back(embed_integer(static_cast<std::int64_t>(c), instance.ring));
  report.witness = newton_lift_partial({instance.form}, x0, {coord});
  report.form_value = instance.form.eval(report.witness);
  if (!verify_witness(instance.form, report.witness, &report.unit_coordinate))
    throw Error(ErrorKind::PrecisionExhausted, "lifted witness failed verification");
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Sentences covering quadratic and cubic residue existence, unit equations
/// and residue-sort identities. None mentions a constant divisible by a prime
/// above 2 in a way that separates Z_p from F_p[[t]].
inline std::vector<std::string> default_battery() {
  return {
      "exists x. x*x = 2",
      "exists x. x*x + 1 = 0",
      "exists x. x*x + 2 = 0",
      "exists x. x*x - x + 1 = 0",
      "exists x. x*x*x = 2",
      "exists x. x*x*x + x + 1 = 0",
      "exists x. x*x*x*x = 2",
      "exists x. exists y. x*x + y*y + 1 = 0",
      "exists x. exists y. x*x - 2*y*y = 1",
      "exists x. exists y. x*y = 1",
      "exists x. exists y. x*x*x + y*y*y = 1",
      "exists x. 2*x = 1",
      "exists x. x*x*x - 2 = 0 and not x = 0",
      "forall x. x*x = x",
      "forall x. x + x = x",
      "not 1 = 0",
      "1 + 1 = 0",
      "exists x. mres(x) = mres(2)",
      "exists %a. %a +mod 1 = 0",
      "forall %a. %a * 1 = %a",
      "forall %a. %a +mod 0 = 0 or not %a +mod 0 = 0",
      "exists %a. %a * %a = mres(2)",
      "forall %a. exists %b. %a * %b = %b * %a",
      "exists %a. exists %b. %a +mod %b = 1 and not %a = 1",
  };
}

struct BatteryCell {
  std::size_t sentence = 0;
  std::uint32_t p = 0;
  TransferResult result;
};

struct BatteryTable {
  std::vector<std::string> sentences;
  std::vector<std::uint32_t> primes;
  std::vector<BatteryCell> cells;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t unknown = 0;
  /// Per sentence: the smallest tested prime from which on no determinate
  /// disagreement was seen; empty when the largest prime disagrees.
  std::vector<std::optional<std::uint32_t>> thresholds;

  json cell_json(const BatteryCell& c) const {
    return {{"schema", kReportSchema},
            {"kind", "transfer"},
            {"sentence", sentences[c.sentence]},
            {"p", c.p},
            {"zp", to_string(c.result.zp)},
            {"fpt", to_string(c.result.fpt)},
            {"agree", to_string(c.result.agree)},
            {"finding", c.result.agree == TruthValue::False}};
  }

  json summary_json() const {
    json th = json::array();
    for (const auto& t : thresholds) th.push_back(t ? json(*t) : json(nullptr));
    return {{"schema", kReportSchema}, {"kind", "transfer_summary"}, {"sentences", sentences.size()},
            {"primes", primes},        {"agree", agreements},            {"disagree", disagreements},
            {"unknown", unknown},      {"thresholds", th}};
  }
};

/// Runs transfer_check for every (sentence, prime) cell. A determinate
/// disagreement is a finding about the implementation, so it is counted,
/// not thrown.
inline BatteryTable transfer_battery(const std::vector<std::string>& sentences, const std::vector<std::uint32_t>& primes,
                                     const EvalConfig& cfg) {
  BatteryTable table;
  table.sentences = sentences;
  table.primes = primes;
  std::vector<FormulaPtr> parsed;
  for (const auto& s : sentences) parsed.push_back(parse(s));
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    std::optional<std::uint32_t> threshold;
    for (std::uint32_t p : primes) {
      BatteryCell cell{i, p, transfer_check(*parsed[i], p, cfg)};
      switch (cell.result.agree) {
        case TruthValue::True: ++table.agreements; break;
        case TruthValue::False: ++table.disagreements; break;
        default: ++table.unknown;
      }
      if (cell.result.agree == TruthValue::False) threshold.reset();
      else if (!threshold) threshold = p;
      table.cells.push_back(cell);
    }
    table.thresholds.push_back(threshold);
  }
  return table;
}

inline std::vector<std::uint32_t> primes_between(std::uint32_t lo, std::uint32_t hi) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t p = lo; p <= hi; ++p)
    if (is_prime(p)) out.push_back(p);
  return out;
}

struct ProbeSample {
  int valuation = 0;
  std::uint32_t unit = 0;
  bool zp_hit = false;
  bool fpt_hit = false;
  bool exhausted = false;
  std::string note;
};

struct ProbeReport {
  std::uint32_t p = 0;
  int bound = 0;
  int precision = 0;
  std::uint64_t seed = 0;
  std::vector<ProbeSample> samples;
  std::size_t agreements = 0;
  std::size_t mismatches = 0;
  std::size_t exhausted = 0;
  std::size_t hits = 0;

  json to_json(const MonomialChart& chart) const {
    json rows = json::array();
    for (const auto& s : samples) {
      json row = {{"val", s.valuation}, {"unit", s.unit}, {"zp", s.zp_hit}, {"fpt", s.fpt_hit}};
      if (s.exhausted) row["note"] = s.note;
      rows.push_back(row);
    }
    return {{"schema", kReportSchema}, {"kind", "probe"},   {"chart", chart_to_json(chart)},
            {"p", p},                  {"bound", bound},    {"prec", precision},
            {"seed", seed},            {"agree", agreements}, {"mismatch", mismatches},
            {"exhausted", exhausted},  {"hits", hits},      {"samples", rows}};
  }
};

/// Samples targets with identical digit data over Z_p and F_p[[t]] (so their
/// residues correspond under tau_p) and compares whether the probe finds a
/// preimage on each side.
inline ProbeReport surjectivity_transfer_probe(const MonomialChart& chart, std::uint32_t p, std::size_t samples, int bound,
                                               int prec = 8, std::uint64_t seed = 0) {
  chart.validate();
  if (chart.m != 1) throw Error(ErrorKind::InvalidArgument, "the transfer probe supports one target coordinate");
  if (prec < 2) throw Error(ErrorKind::InvalidArgument, "precision must be at least 2");
  const RingSpec zp = padic(p, prec), fpt = power_series(p, prec);
  ProbeReport report;
  report.p = p;
  report.bound = bound;
  report.precision = prec;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> val(0, std::min(bound, prec - 2));
  std::uniform_int_distribution<std::uint32_t> unit(1, p - 1), digit(0, p - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    ProbeSample row;
    row.valuation = val(rng);
    row.unit = unit(rng);
    std::vector<std::uint32_t> digits(static_cast<std::size_t>(prec), 0);
    digits[static_cast<std::size_t>(row.valuation)] = row.unit;
    for (std::size_t i = static_cast<std::size_t>(row.valuation) + 1; i < digits.size(); ++i) digits[i] = digit(rng);
    try {
      row.zp_hit = surjectivity_probe(chart, {LocalElement::from_digits(zp, digits)}, bound).has_value();
      row.fpt_hit = surjectivity_probe(chart, {LocalElement::from_digits(fpt, digits)}, bound).has_value();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PrecisionExhausted) throw;
      row.exhausted = true;
      row.note = e.what();
    }
    if (row.exhausted) ++report.exhausted;
    else if (row.zp_hit == row.fpt_hit) ++report.agreements;
    else ++report.mismatches;
    if (row.zp_hit) ++report.hits;
    report.samples.push_back(row);
  }
  return report;
}

}  // namespace hlab
