#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/evaluator.hpp"
#include "hlab/hensel.hpp"
#include "hlab/local_element.hpp"
#include "hlab/parser.hpp"
#include "hlab/polynomial.hpp"
#include "hlab/residue.hpp"
#include "hlab/ring.hpp"

namespace hlab {

using json = nlohmann::ordered_json;

inline json ring_to_json(const RingSpec& r) {
  return {{"kind", r.kind == RingKind::Padic ? "padic" : "powerseries"}, {"p", r.p}, {"prec", r.prec}};
}

inline RingSpec ring_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "padic" && kind != "powerseries") throw Error(ErrorKind::InvalidArgument, "ring kind must be padic or powerseries");
    return make_ring(kind == "padic" ? RingKind::Padic : RingKind::PowerSeries, j.at("p").get<std::uint32_t>(),
                     j.at("prec").get<int>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad ring: ") + e.what());
  }
}

/// Elements serialize as their N little-endian base-p digits.
inline json element_to_json(const LocalElement& a) { return a.digits(); }

inline LocalElement element_from_json(const json& j, const RingSpec& ring) {
  if (j.is_number_integer()) return embed_integer(j.get<std::int64_t>(), ring);
  if (j.is_string()) return LocalElement::embed_decimal(j.get<std::string>(), ring);
  try {
    return LocalElement::from_digits(ring, j.get<std::vector<std::uint32_t>>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad element: ") + e.what());
  }
}

inline json point_to_json(const Point& a) {
  json out = json::array();
  for (const auto& x : a) out.push_back(element_to_json(x));
  return out;
}

/// Pos(v, u) serializes as {"val": v, "unit": u}, Zero as the string "zero".
inline json residue_to_json(const MultRes& a) {
  if (a.is_zero()) return "zero";
  return {{"val", a.valuation()}, {"unit", a.unit()}};
}

inline MultRes residue_from_json(const json& j, const RingSpec& ring) {
  if (j == "zero") return MultRes::zero(ring);
  try {
    return MultRes::pos(ring, j.at("val").get<std::int64_t>(), j.at("unit").get<std::uint32_t>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad residue: ") + e.what());
  }
}

/// Coefficients are decimal strings so 64-bit values survive JSON readers that use doubles.
inline json polynomial_to_json(const Polynomial& f) {
  json terms = json::array();
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it)
    terms.push_back({{"exp", it->first}, {"coef", std::to_string(it->second)}});
  return {{"vars", f.vars()}, {"terms", terms}};
}

inline Polynomial polynomial_from_json(const json& j, const std::vector<std::string>& default_vars = {}) {
  if (j.is_string()) return parse_polynomial(j.get<std::string>(), default_vars);
  try {
    Polynomial f(j.at("vars").get<std::vector<std::string>>());
    for (const auto& t : j.at("terms")) {
      const json& c = t.at("coef");
      std::int64_t coef = c.is_string() ? std::stoll(c.get<std::string>()) : c.get<std::int64_t>();
      f.add_term(t.at("exp").get<std::vector<std::uint32_t>>(), coef);
    }
    if (!default_vars.empty() && f.vars() != default_vars) return f.over(default_vars);
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad polynomial: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad polynomial coefficient: ") + e.what());
  }
}

inline json chart_to_json(const MonomialChart& c) {
  json units = json::array();
  for (const auto& u : c.units) units.push_back(polynomial_to_json(u));
  return {{"n", c.n}, {"m", c.m}, {"exponents", c.exponents}, {"units", units}};
}

/// Units may be given as polynomial objects or as strings over x1..xn; a
/// missing "units" array means all units are 1.
inline MonomialChart chart_from_json(const json& j) {
  try {
    MonomialChart c;
    c.exponents = j.at("exponents").get<std::vector<std::vector<std::uint32_t>>>();
    c.m = j.value("m", c.exponents.size());
    c.n = j.value("n", c.exponents.empty() ? std::size_t{0} : c.exponents.front().size());
    const auto vars = MonomialChart::default_vars(c.n);
    if (j.contains("units")) {
      for (const auto& u : j.at("units")) c.units.push_back(polynomial_from_json(u, vars));
    } else {
      for (std::size_t k = 0; k < c.m; ++k) c.units.push_back(Polynomial::constant(1, vars));
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad chart: ") + e.what());
  }
}

inline std::string truth_to_json(TruthValue t) { return to_string(t); }

}  // namespace hlab
