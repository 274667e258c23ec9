#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/local_element.hpp"

namespace hlab {

/// Sparse multivariate polynomial over Z with a fixed, ordered variable list.
/// Zero coefficients are never stored.
class Polynomial {
 public:
  using Exponent = std::vector<std::uint32_t>;
  using Terms = std::map<Exponent, std::int64_t>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  Polynomial(std::vector<std::string> vars, const Terms& terms) : vars_(std::move(vars)) {
    for (const auto& [e, c] : terms) add_term(e, c);
  }

  static Polynomial constant(std::int64_t c, std::vector<std::string> vars = {}) {
    Polynomial p(std::move(vars));
    p.add_term(Exponent(p.vars_.size(), 0), c);
    return p;
  }

  static Polynomial variable(std::size_t index, std::vector<std::string> vars) {
    if (index >= vars.size()) throw Error(ErrorKind::ArityMismatch, "variable index out of range");
    Polynomial p(std::move(vars));
    Exponent e(p.vars_.size(), 0);
    e[index] = 1;
    p.add_term(e, 1);
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t arity() const { return vars_.size(); }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, std::int64_t c) {
    if (e.size() != vars_.size())
      throw Error(ErrorKind::ArityMismatch, "exponent vector length " + std::to_string(e.size()) + " vs " +
                                                std::to_string(vars_.size()) + " variables");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second = checked_add(it->second, c);
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::int64_t coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0 : it->second;
  }

  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (auto x : e) s += static_cast<int>(x);
      d = std::max(d, s);
    }
    return d;
  }

  bool is_homogeneous(int degree) const {
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (auto x : e) s += static_cast<int>(x);
      if (s != degree) return false;
    }
    return true;
  }

  std::uint32_t degree_in(std::size_t var) const {
    std::uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  /// Same polynomial written over a larger variable list (every current variable must appear).
  Polynomial over(const std::vector<std::string>& vars) const {
    std::vector<std::size_t> where(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = std::find(vars.begin(), vars.end(), vars_[i]);
      if (it == vars.end()) throw Error(ErrorKind::ArityMismatch, "variable " + vars_[i] + " missing from target list");
      where[i] = static_cast<std::size_t>(it - vars.begin());
    }
    Polynomial out(vars);
    for (const auto& [e, c] : terms_) {
      Exponent f(vars.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) f[where[i]] = e[i];
      out.add_term(f, c);
    }
    return out;
  }

  Polynomial derivative(std::size_t var) const {
    if (var >= vars_.size()) throw Error(ErrorKind::ArityMismatch, "derivative variable out of range");
    Polynomial out(vars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponent f = e;
      f[var] -= 1;
      out.add_term(f, checked_mul(c, static_cast<std::int64_t>(e[var])));
    }
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    require_same_vars(a, b);
    Polynomial out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
  }

  friend Polynomial operator-(const Polynomial& a) {
    Polynomial out(a.vars_);
    for (const auto& [e, c] : a.terms_) out.add_term(e, checked_mul(c, -1));
    return out;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_same_vars(a, b);
    Polynomial out(a.vars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, checked_mul(ca, cb));
      }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  /// Exact truncated evaluation in the ring of the point.
  LocalElement eval(const Point& point) const {
    if (point.size() != vars_.size())
      throw Error(ErrorKind::ArityMismatch, "point has " + std::to_string(point.size()) + " coordinates, polynomial has " +
                                                std::to_string(vars_.size()) + " variables");
    if (point.empty()) throw Error(ErrorKind::ArityMismatch, "ring of an empty point is unknown; use eval(point, ring)");
    return eval(point, point.front().ring());
  }

  LocalElement eval(const Point& point, const RingSpec& ring) const {
    if (point.size() != vars_.size()) throw Error(ErrorKind::ArityMismatch, "point arity mismatch");
    for (const auto& x : point) require_same_ring(x.ring(), ring);
    // cache powers per variable
    std::vector<std::vector<LocalElement>> powers(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      std::uint32_t d = degree_in(i);
      powers[i].reserve(d + 1);
      powers[i].push_back(LocalElement::one(ring));
      for (std::uint32_t k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * point[i]);
    }
    LocalElement acc = LocalElement::zero(ring);
    for (const auto& [e, c] : terms_) {
      LocalElement term = LocalElement::embed_integer(c, ring);
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) term *= powers[i][e[i]];
      acc += term;
    }
    return acc;
  }

  /// Evaluation over the residue field F_p.
  std::uint64_t eval_mod(const std::vector<std::uint64_t>& point, std::uint64_t p) const {
    if (point.size() != vars_.size()) throw Error(ErrorKind::ArityMismatch, "point arity mismatch");
    std::uint64_t acc = 0;
    for (const auto& [e, c] : terms_) {
      std::uint64_t term = fp::reduce(c, p);
      for (std::size_t i = 0; i < e.size() && term; ++i)
        if (e[i]) term = fp::mul(term, fp::pow(point[i], e[i], p), p);
      acc = fp::add(acc, term, p);
    }
    return acc;
  }

 private:
  static void require_same_vars(const Polynomial& a, const Polynomial& b) {
    if (a.vars_ != b.vars_) throw Error(ErrorKind::ArityMismatch, "polynomials over different variable lists");
  }

  static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::InvalidArgument, "coefficient overflow");
    return r;
  }

  static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::InvalidArgument, "coefficient overflow");
    return r;
  }

  std::vector<std::string> vars_;
  Terms terms_;
};

inline LocalElement eval_polynomial(const Polynomial& poly, const Point& point) { return poly.eval(point); }

inline std::string to_string(const Polynomial& poly) {
  if (poly.is_zero()) return "0";
  std::string s;
  // highest-degree terms first reads more naturally
  for (auto it = poly.terms().rbegin(); it != poly.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::uint32_t k = 0; k < e[i]; ++k) mono += (mono.empty() ? "" : "*") + poly.vars()[i];
    std::int64_t mag = c < 0 ? -c : c;
    std::string body = mono.empty() ? std::to_string(mag) : (mag == 1 ? mono : std::to_string(mag) + "*" + mono);
    if (s.empty())
      s = (c < 0 ? "-" : "") + body;
    else
      s += (c < 0 ? " - " : " + ") + body;
  }
  return s;
}

/// x = f / g as a pair of regular functions.
struct RationalFunction {
  Polynomial numerator;
  Polynomial denominator;
};

/// Replaces rational functions by the regular functions whose residues
/// control theirs: each x = f / g contributes f and g.
inline std::vector<Polynomial> regular_functions(const std::vector<RationalFunction>& funcs) {
  std::vector<Polynomial> out;
  for (const auto& f : funcs) {
    if (f.denominator.is_zero()) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    out.push_back(f.numerator);
    out.push_back(f.denominator);
  }
  return out;
}

}  // namespace hlab
