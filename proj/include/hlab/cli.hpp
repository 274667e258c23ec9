#pragma once

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hlab/evaluator.hpp"
#include "hlab/experiments.hpp"
#include "hlab/hensel.hpp"
#include "hlab/io.hpp"
#include "hlab/parser.hpp"
#include "hlab/residue.hpp"
#include "hlab/rewrite.hpp"

namespace hlab::cli {

enum ExitCode { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// Bad flags, bad values or a malformed config file.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string ring = "zp";
  std::uint32_t p = 7;
  int prec = 8;
  int depth = 1;
  int val_cap = 2;
  std::uint64_t seed = 0;
  std::uint64_t budget = 1'000'000;

  RingSpec ring_spec() const { return make_ring(ring == "fpt" ? RingKind::PowerSeries : RingKind::Padic, p, prec); }

  EvalConfig eval_config() const {
    EvalConfig cfg;
    cfg.ring = ring_spec();
    cfg.ring_depth = depth;
    cfg.val_cap = val_cap;
    return cfg;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError(where + ": expected a number, got '" + text + "'");
  return value;
}

}  // namespace detail

/// Reads key=value lines (p, prec, depth, val_cap, seed, budget, ring) on top
/// of base. Blank lines and '#' comments are skipped; an empty path means no file.
inline Settings load_config(const std::string& path, Settings base = {}) {
  if (path.empty()) return base;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = path + ":" + std::to_string(lineno);
    const std::string text = detail::trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    const std::string key = detail::trim(text.substr(0, eq));
    std::string value = detail::trim(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key == "p") base.p = detail::parse_number<std::uint32_t>(value, where);
    else if (key == "prec") base.prec = detail::parse_number<int>(value, where);
    else if (key == "depth") base.depth = detail::parse_number<int>(value, where);
    else if (key == "val_cap") base.val_cap = detail::parse_number<int>(value, where);
    else if (key == "seed") base.seed = detail::parse_number<std::uint64_t>(value, where);
    else if (key == "budget") base.budget = detail::parse_number<std::uint64_t>(value, where);
    else if (key == "ring") {
      if (value != "zp" && value != "fpt") throw UsageError(where + ": ring must be zp or fpt");
      base.ring = value;
    } else {
      throw UsageError(where + ": unknown key '" + key + "'");
    }
  }
  return base;
}

namespace detail {

// Flags shared by every subcommand; unset values fall back to the config file.
struct Common {
  std::optional<std::string> ring;
  std::optional<std::uint32_t> p;
  std::optional<int> prec;
  std::optional<int> depth;
  std::optional<int> val_cap;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::optional<std::string> config;
  std::vector<std::string> formulas;
  std::string file;
  std::string chart;
  bool json = false;

  Settings resolve() const {
    std::string path;
    if (config) path = *config;
    else if (const char* env = std::getenv("HLAB_CONFIG")) path = env;
    Settings s = load_config(path);
    if (ring) s.ring = *ring;
    if (p) s.p = *p;
    if (prec) s.prec = *prec;
    if (depth) s.depth = *depth;
    if (val_cap) s.val_cap = *val_cap;
    if (seed) s.seed = *seed;
    if (budget) s.budget = *budget;
    try {
      s.eval_config().validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return s;
  }
};

inline void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--ring", c.ring, "Ring: zp (p-adic integers) or fpt (power series over F_p)")
      ->check(CLI::IsMember({"zp", "fpt"}));
  sub.add_option("--p", c.p, "Residue characteristic, a prime (default 7)");
  sub.add_option("--prec", c.prec, "Working precision N (default 8)");
  sub.add_option("--depth", c.depth, "Ring quantifiers range over A / m^depth (default 1)");
  sub.add_option("--val-cap", c.val_cap, "Residue quantifiers range over valuations <= val-cap (default 2)");
  sub.add_option("--seed", c.seed, "Seed for every random choice (default 0)");
  sub.add_option("--budget", c.budget, "Search budget (default 10^6)");
  sub.add_option("--formula", c.formulas, "Formula text; may be repeated");
  sub.add_option("--file", c.file, "File with one formula per line")->check(CLI::ExistingFile);
  sub.add_option("--chart", c.chart, "Monomial chart as inline JSON or a JSON file");
  sub.add_flag("--json", c.json, "Machine-readable output");
  sub.add_option("--config", c.config, "Config file of key=value lines (default $HLAB_CONFIG)");
}

inline std::vector<std::string> formula_texts(const Common& c) {
  std::vector<std::string> out = c.formulas;
  if (!c.file.empty()) {
    std::ifstream in(c.file);
    std::string line;
    while (std::getline(in, line)) {
      const std::string text = trim(line);
      if (!text.empty() && text.front() != '#') out.push_back(text);
    }
  }
  return out;
}

inline MonomialChart load_chart(const std::string& spec) {
  if (spec.empty()) throw UsageError("--chart is required");
  std::string text = spec;
  if (trim(spec).front() != '{') {
    std::ifstream in(spec);
    if (!in) throw UsageError("cannot open chart file " + spec);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("chart is not valid JSON: ") + e.what());
  }
  return chart_from_json(j);
}

inline Point elements(const std::vector<std::string>& texts, const RingSpec& ring) {
  Point out;
  for (const auto& t : texts) out.push_back(LocalElement::embed_decimal(t, ring));
  return out;
}

inline std::string point_text(const Point& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + to_string(a[i]);
  return s + ")";
}

inline json certificate_json(const Certificate& c) {
  return {{"vars", c.vars},
          {"representatives", point_to_json(c.representatives)},
          {"lifted_var", c.lifted_var},
          {"lifted", point_to_json(c.lifted)},
          {"depth", c.depth}};
}

// "name=value": ring values are decimal integers, residue values "zero" or "v:u".
inline Assignment parse_assignment(const std::vector<std::string>& lets, const RingSpec& ring) {
  Assignment a;
  for (const auto& let : lets) {
    const auto eq = let.find('=');
    if (eq == std::string::npos) throw UsageError("--let expects name=value, got '" + let + "'");
    const std::string name = trim(let.substr(0, eq)), value = trim(let.substr(eq + 1));
    if (sort_of_name(name) == Sort::Ring) {
      a.ring.emplace(name, LocalElement::embed_decimal(value, ring));
    } else if (value == "zero") {
      a.residue.emplace(name, MultRes::zero(ring));
    } else {
      const auto colon = value.find(':');
      if (colon == std::string::npos) throw UsageError("residue value must be zero or v:u, got '" + value + "'");
      a.residue.emplace(name, MultRes::pos(ring, parse_number<std::int64_t>(value.substr(0, colon), "--let"),
                                           parse_number<std::uint32_t>(value.substr(colon + 1), "--let")));
    }
  }
  return a;
}

inline std::vector<std::uint32_t> parse_primes(const std::vector<std::string>& items) {
  std::vector<std::uint32_t> out;
  for (const auto& item : items) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<std::uint32_t>(item, "--primes"));
    } else {
      auto range = primes_between(parse_number<std::uint32_t>(item.substr(0, dots), "--primes"),
                                  parse_number<std::uint32_t>(item.substr(dots + 2), "--primes"));
      out.insert(out.end(), range.begin(), range.end());
    }
  }
  for (auto p : out)
    if (!is_prime(p)) throw UsageError("--primes: " + std::to_string(p) + " is not prime");
  return out;
}

}  // namespace detail

/// Parses argv, runs one subcommand and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Hensel lifting, residue monoids and transfer experiments over Z_p and F_p[[t]]", "hlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hlab 1.0");

  detail::Common c;
  auto* eval = app.add_subcommand("eval", "Bounded three-valued evaluation of a formula");
  auto* rewrite = app.add_subcommand("rewrite", "Rewrite a ring formula into the residue language, or describe a chart image");
  auto* lift = app.add_subcommand("lift", "Newton lift of a polynomial system from an approximate root");
  auto* loghensel = app.add_subcommand("loghensel", "Logarithmic Hensel lift through a monomial chart");
  auto* axkochen = app.add_subcommand("axkochen", "Nontrivial zero of a diagonal form, searched mod p and lifted");
  auto* transfer = app.add_subcommand("transfer", "Compare truth values over Z_p and F_p[[t]]");
  auto* probe = app.add_subcommand("probe", "Surjectivity probe of a one-target chart over both rings");
  auto* mres_cmd = app.add_subcommand("mres", "Multiplicative residue of a ring element");
  for (auto* sub : {eval, rewrite, lift, loghensel, axkochen, transfer, probe, mres_cmd}) detail::add_common(*sub, c);

  std::vector<std::string> lets;
  eval->add_option("--let", lets, "Free variable value: x=<integer>, %a=zero or %a=<val>:<unit>");
  bool no_certify = false;
  eval->add_flag("--no-certify", no_certify, "Skip Hensel certification of ring witnesses");

  std::vector<std::string> polys, x0, vars;
  lift->add_option("--poly", polys, "Polynomial of the system; may be repeated")->required();
  lift->add_option("--x0", x0, "Approximate root, comma separated")->delimiter(',')->required();
  lift->add_option("--vars", vars, "Variable order, comma separated (default: order of appearance)")->delimiter(',');

  std::vector<std::string> a0, b;
  loghensel->add_option("--a0", a0, "Log-smooth source point, comma separated")->delimiter(',')->required();
  loghensel->add_option("--b", b, "Target with the residues of f(a0), comma separated")->delimiter(',')->required();

  int degree = 2;
  std::vector<std::int64_t> coefs;
  std::size_t nvars = 0;
  axkochen->add_option("--d", degree, "Degree of the diagonal form (default 2)")->check(CLI::PositiveNumber);
  axkochen->add_option("--coefs", coefs, "Diagonal coefficients, comma separated (default all 1)")->delimiter(',');
  axkochen->add_option("--n", nvars, "Number of variables when --coefs is absent (default d^2 + 1)");

  std::vector<std::string> primes;
  transfer->add_option("--primes", primes, "Primes or ranges lo..hi, comma separated (default --p)")->delimiter(',');

  std::size_t samples = 100;
  int bound = 4;
  probe->add_option("--samples", samples, "Number of sampled targets (default 100)");
  probe->add_option("--bound", bound, "Valuation search bound (default 4)")->check(CLI::NonNegativeNumber);

  std::string integer;
  std::vector<std::uint32_t> digits;
  auto* int_opt = mres_cmd->add_option("--int", integer, "Decimal integer to embed");
  auto* digits_opt = mres_cmd->add_option("--digits", digits, "Little-endian digits, comma separated")->delimiter(',');
  int_opt->excludes(digits_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  auto fail = [&](ErrorKind kind, const std::string& what) {
    if (c.json) err << json({{"error", to_string(kind)}, {"message", what}}).dump() << "\n";
    else err << "hlab: " << what << "\n";
    return kDomainError;
  };

  try {
    const Settings s = c.resolve();
    const RingSpec ring = s.ring_spec();

    if (eval->parsed()) {
      const auto texts = detail::formula_texts(c);
      if (texts.empty()) throw UsageError("eval needs --formula or --file");
      EvalConfig cfg = s.eval_config();
      cfg.certify = !no_certify;
      const Assignment assignment = detail::parse_assignment(lets, ring);
      for (const auto& text : texts) {
        const EvalOutcome o = evaluate_explained(*parse(text), assignment, cfg);
        if (!c.json) {
          out << describe(o) << "\n";
          continue;
        }
        out << json({{"schema", kReportSchema},
                     {"kind", "eval"},
                     {"formula", text},
                     {"ring", ring_to_json(ring)},
                     {"depth", s.depth},
                     {"val_cap", s.val_cap},
                     {"value", to_string(o.value)},
                     {"certificate", o.certificate ? detail::certificate_json(*o.certificate) : json(nullptr)}})
                   .dump()
            << "\n";
      }
    } else if (rewrite->parsed()) {
      std::vector<std::pair<std::string, FormulaPtr>> results;
      for (const auto& text : detail::formula_texts(c)) results.emplace_back(text, interpret_residue_field(*parse(text)));
      if (!c.chart.empty()) results.emplace_back(c.chart, chart_residue_image(detail::load_chart(c.chart)));
      if (results.empty()) throw UsageError("rewrite needs --formula, --file or --chart");
      for (const auto& [input, output] : results) {
        if (c.json) out << json({{"schema", kReportSchema}, {"kind", "rewrite"}, {"input", input}, {"output", to_string(*output)}}).dump() << "\n";
        else out << to_string(*output) << "\n";
      }
    } else if (lift->parsed()) {
      std::vector<std::string> order = vars;
      if (order.empty())
        for (const auto& text : polys) {
          std::vector<std::string> used;
          collect_vars(*parse_term(text), used);
          for (const auto& v : used)
            if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
        }
      std::vector<Polynomial> system;
      for (const auto& text : polys) system.push_back(parse_polynomial(text, order));
      NewtonTrace trace;
      const Point x = newton_lift(system, detail::elements(x0, ring), &trace);
      if (c.json) {
        out << json({{"schema", kReportSchema}, {"kind", "lift"}, {"ring", ring_to_json(ring)}, {"vars", order},
                     {"x0", x0}, {"solution", point_to_json(x)}})
                   .dump()
            << "\n";
      } else {
        for (std::size_t i = 0; i < order.size(); ++i) out << order[i] << " = " << to_string(x[i]) << "\n";
      }
    } else if (loghensel->parsed()) {
      const MonomialChart chart = detail::load_chart(c.chart);
      const LogHenselResult r = log_hensel_solve({chart, detail::elements(a0, ring), detail::elements(b, ring)});
      if (c.json) {
        out << json({{"schema", kReportSchema}, {"kind", "loghensel"}, {"ring", ring_to_json(ring)},
                     {"chart", chart_to_json(chart)}, {"a", point_to_json(r.a)},
                     {"effective_precision", r.effective_precision}})
                   .dump()
            << "\n";
      } else {
        out << "a = " << detail::point_text(r.a) << "\n"
            << "effective precision " << r.effective_precision << "\n";
      }
    } else if (axkochen->parsed()) {
      if (coefs.empty()) coefs.assign(nvars ? nvars : static_cast<std::size_t>(degree * degree + 1), 1);
      SearchOptions opt;
      opt.seed = s.seed;
      opt.budget = s.budget;
      const ExperimentReport r = ax_kochen_witness(FormInstance::diagonal(coefs, degree, ring), opt);
      if (c.json) {
        out << r.to_json().dump() << "\n";
      } else {
        for (const auto& w : r.warnings) err << "warning: " << w << "\n";
        out << "form " << to_string(r.instance.form) << " over " << to_string(ring) << "\n"
            << "witness " << detail::point_text(r.witness) << "\n"
            << "form value " << to_string(r.form_value) << ", unit coordinate " << r.unit_coordinate + 1 << "\n";
      }
    } else if (transfer->parsed()) {
      auto sentences = detail::formula_texts(c);
      if (sentences.empty()) sentences = default_battery();
      const auto ps = primes.empty() ? std::vector<std::uint32_t>{s.p} : detail::parse_primes(primes);
      const BatteryTable table = transfer_battery(sentences, ps, s.eval_config());
      for (const auto& cell : table.cells) {
        if (c.json) {
          out << table.cell_json(cell).dump() << "\n";
        } else {
          out << "p=" << cell.p << "  zp=" << to_string(cell.result.zp) << "  fpt=" << to_string(cell.result.fpt)
              << "  agree=" << to_string(cell.result.agree) << "  " << table.sentences[cell.sentence] << "\n";
        }
      }
      if (c.json) out << table.summary_json().dump() << "\n";
      else
        out << table.agreements << " agree, " << table.disagreements << " disagree, " << table.unknown << " unknown\n";
    } else if (probe->parsed()) {
      const MonomialChart chart = detail::load_chart(c.chart);
      const ProbeReport r = surjectivity_transfer_probe(chart, s.p, samples, bound, s.prec, s.seed);
      if (c.json) {
        out << r.to_json(chart).dump() << "\n";
      } else {
        out << r.samples.size() << " samples over p=" << r.p << ": " << r.hits << " hits, " << r.agreements
            << " agree, " << r.mismatches << " mismatch, " << r.exhausted << " precision exhausted\n";
      }
    } else if (mres_cmd->parsed()) {
      if (integer.empty() && digits.empty()) throw UsageError("mres needs --int or --digits");
      json j = residue_to_json(integer.empty() ? mres(LocalElement::from_digits(ring, digits))
                                               : mres_of_integer(integer, ring));
      if (c.json) j = {{"residue", j}, {"ring", ring_to_json(ring)}};
      out << j.dump() << "\n";
    }
  } catch (const UsageError& e) {
    err << "hlab: " << e.what() << "\n" << "Run with --help for more information.\n";
    return kUsageError;
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  }
  return kOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hlab::cli
