#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/formula.hpp"
#include "hlab/hensel.hpp"
#include "hlab/local_element.hpp"
#include "hlab/residue.hpp"

namespace hlab {

/// Kleene truth values, ordered False < Unknown < True.
enum class TruthValue { False, Unknown, True };

inline TruthValue k_not(TruthValue a) {
  return a == TruthValue::True ? TruthValue::False : a == TruthValue::False ? TruthValue::True : TruthValue::Unknown;
}
inline TruthValue k_and(TruthValue a, TruthValue b) { return std::min(a, b); }
inline TruthValue k_or(TruthValue a, TruthValue b) { return std::max(a, b); }
inline TruthValue k_implies(TruthValue a, TruthValue b) { return k_or(k_not(a), b); }
inline TruthValue k_iff(TruthValue a, TruthValue b) { return k_and(k_implies(a, b), k_implies(b, a)); }
inline bool is_determinate(TruthValue a) { return a != TruthValue::Unknown; }

inline std::string to_string(TruthValue a) {
  return a == TruthValue::True ? "true" : a == TruthValue::False ? "false" : "unknown";
}

struct EvalConfig {
  RingSpec ring = padic(7, 8);
  /// Ring quantifiers range over the p^k representatives of A / m^k.
  int ring_depth = 1;
  /// Residue quantifiers range over Zero and Pos(v, u) with v <= val_cap.
  int val_cap = 2;
  bool certify = true;

  void validate() const {
    hlab::validate(ring);
    if (ring_depth < 1 || ring_depth > ring.prec)
      throw Error(ErrorKind::InvalidArgument, "depth must satisfy 1 <= k <= precision");
    if (val_cap < 0) throw Error(ErrorKind::InvalidArgument, "val_cap must be non-negative");
    if (std::pow(static_cast<long double>(ring.p), ring_depth) > 1e7L)
      throw Error(ErrorKind::InvalidArgument, "p^k exceeds 10^7 representatives per ring quantifier");
  }
};

/// Values for free variables. Ring values are taken as given at precision N.
struct Assignment {
  std::map<std::string, LocalElement> ring;
  std::map<std::string, MultRes> residue;
};

/// A residue-level root with a unit partial derivative, and its Newton lift.
struct Certificate {
  std::vector<std::string> vars;
  Point representatives;
  std::string lifted_var;
  /// The lifted point, over the variables of the certified atom.
  Point lifted;
  int depth = 1;
};

struct EvalOutcome {
  TruthValue value = TruthValue::Unknown;
  std::optional<Certificate> certificate;
};

inline std::string describe(const Certificate& c) {
  std::string witness;
  if (c.representatives.size() == 1) {
    witness = to_string(c.representatives.front());
  } else {
    witness = "(";
    for (std::size_t i = 0; i < c.vars.size(); ++i) witness += (i ? ", " : "") + c.vars[i];
    witness += ") = (";
    for (std::size_t i = 0; i < c.representatives.size(); ++i) witness += (i ? ", " : "") + to_string(c.representatives[i]);
    witness += ")";
  }
  const RingSpec& r = c.representatives.front().ring();
  std::string modulus;
  if (r.kind == RingKind::Padic) {
    std::uint64_t m = 1;
    for (int i = 0; i < c.depth; ++i) m *= r.p;
    modulus = std::to_string(m);
  } else {
    modulus = c.depth == 1 ? "t" : "t^" + std::to_string(c.depth);
  }
  return "witness " + witness + " mod " + modulus + ", Hensel";
}

inline std::string describe(const EvalOutcome& o) {
  if (o.value == TruthValue::True && o.certificate) return "true (certified: " + describe(*o.certificate) + ")";
  return to_string(o.value);
}

namespace detail {

// How a formula depends on a residue variable: only through s_A, only
// through its class (Zero, positive valuation, or unit u), or otherwise.
enum class Dependence { SOnly = 0, ClassOnly = 1, Sensitive = 2 };

inline void factors(const Term& t, std::vector<const Term*>& out) {
  if (t.op == Term::Op::Mul) {
    factors(*t.args[0], out);
    factors(*t.args[1], out);
  } else {
    out.push_back(&t);
  }
}

inline std::size_t exposed_count(const Term& t, const std::string& var) {
  std::vector<const Term*> fs;
  factors(t, fs);
  std::size_t n = 0;
  for (const Term* f : fs)
    if (f->op == Term::Op::Var && f->name == var) ++n;
  return n;
}

inline bool is_zero_test(const Formula& f, const Term*& subject) {
  if (f.kind != Formula::Kind::Atom || f.sort != Sort::Residue) return false;
  const Term& l = *f.lhs;
  if (l.op != Term::Op::ModAdd || l.args[1]->op != Term::Op::Lit || l.args[1]->value != 0) return false;
  if (f.rhs->op != Term::Op::Lit || f.rhs->value != 0) return false;
  subject = l.args[0].get();
  return true;
}

// "T1 = T2 or (T1 +mod 0 = 0 and T2 +mod 0 = 0)" expresses s(T1) = s(T2).
inline bool is_s_equality(const Formula& f) {
  if (f.kind != Formula::Kind::Or) return false;
  const Formula& eq = *f.args[0];
  const Formula& both = *f.args[1];
  if (eq.kind != Formula::Kind::Atom || eq.sort != Sort::Residue || both.kind != Formula::Kind::And) return false;
  const Term *a = nullptr, *b = nullptr;
  if (!is_zero_test(*both.args[0], a) || !is_zero_test(*both.args[1], b)) return false;
  return (same_term(*a, *eq.lhs) && same_term(*b, *eq.rhs)) || (same_term(*a, *eq.rhs) && same_term(*b, *eq.lhs));
}

inline Dependence dependence(const Formula& f, const std::string& var) {
  if (!is_free_in(f, var)) return Dependence::SOnly;
  switch (f.kind) {
    case Formula::Kind::Atom: {
      if (f.sort == Sort::Ring) return Dependence::SOnly;
      const std::size_t l = exposed_count(*f.lhs, var), r = exposed_count(*f.rhs, var);
      if (l == 0 && r == 0) return Dependence::SOnly;
      return l == r ? Dependence::ClassOnly : Dependence::Sensitive;
    }
    case Formula::Kind::Or:
      if (is_s_equality(f)) return Dependence::SOnly;
      [[fallthrough]];
    default: {
      Dependence d = Dependence::SOnly;
      for (const auto& a : f.args) d = std::max(d, dependence(*a, var));
      return d;
    }
  }
}

}  // namespace detail

/// Bounded three-valued evaluator. One instance per formula: compiled atoms
/// are cached by node address.
class Evaluator {
 public:
  explicit Evaluator(EvalConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    reps_per_var_ = 1;
    for (int i = 0; i < cfg_.ring_depth; ++i) reps_per_var_ *= cfg_.ring.p;
  }

  EvalOutcome run(const Formula& f, const Assignment& assignment) {
    ring_env_.clear();
    res_env_.clear();
    certificate_.reset();
    for (const auto& [name, value] : assignment.ring) {
      if (sort_of_name(name) != Sort::Ring) throw Error(ErrorKind::SortError, name + " is not a ring-sort variable");
      if (value.ring() != cfg_.ring) throw Error(ErrorKind::RingMismatch, "value for " + name + " is in " + to_string(value.ring()));
      ring_env_.push_back({name, value, false, 0, 0});
    }
    for (const auto& [name, value] : assignment.residue) {
      if (sort_of_name(name) != Sort::Residue) throw Error(ErrorKind::SortError, name + " is not a residue-sort variable");
      if (value.ring() != cfg_.ring) throw Error(ErrorKind::RingMismatch, "residue for " + name + " is over " + to_string(value.ring()));
      res_env_.push_back({name, value});
    }
    for (const auto& v : free_vars(f)) {
      const bool bound = sort_of_name(v) == Sort::Ring ? assignment.ring.count(v) > 0 : assignment.residue.count(v) > 0;
      if (!bound) throw Error(ErrorKind::UnboundVariable, v);
    }
    EvalOutcome out;
    out.value = eval(f);
    if (out.value == TruthValue::True) out.certificate = certificate_;
    return out;
  }

 private:
  struct RingSlot {
    std::string name;
    LocalElement value;
    bool exact;
    long double magnitude;
    int degree;
  };
  struct ResSlot {
    std::string name;
    MultRes value;
  };
  struct Compiled {
    Polynomial poly;
    std::vector<Polynomial> partials;
  };
  enum class ZeroStatus { Nonzero, ExactZero, Indeterminate };

  const RingSlot& ring_slot(const std::string& name) const {
    for (auto it = ring_env_.rbegin(); it != ring_env_.rend(); ++it)
      if (it->name == name) return *it;
    throw Error(ErrorKind::UnboundVariable, name);
  }

  const MultRes& res_value(const std::string& name) const {
    for (auto it = res_env_.rbegin(); it != res_env_.rend(); ++it)
      if (it->name == name) return it->value;
    throw Error(ErrorKind::UnboundVariable, name);
  }

  static Compiled compile(const Term& lhs, const Term* rhs) {
    std::vector<std::string> vars;
    collect_vars(lhs, vars);
    if (rhs) collect_vars(*rhs, vars);
    Compiled c;
    c.poly = rhs ? to_polynomial(lhs, vars) - to_polynomial(*rhs, vars) : to_polynomial(lhs, vars);
    for (std::size_t i = 0; i < vars.size(); ++i) c.partials.push_back(c.poly.derivative(i));
    return c;
  }

  const Compiled& compiled_atom(const Formula& f) {
    auto it = atoms_.find(&f);
    if (it == atoms_.end()) it = atoms_.emplace(&f, compile(*f.lhs, f.rhs.get())).first;
    return it->second;
  }

  const Compiled& compiled_term(const Term& t) {
    auto it = terms_.find(&t);
    if (it == terms_.end()) it = terms_.emplace(&t, compile(t, nullptr)).first;
    return it->second;
  }

  Point current_point(const Polynomial& poly) const {
    Point pt;
    for (const auto& v : poly.vars()) pt.push_back(ring_slot(v).value);
    return pt;
  }

  // Zero at precision is exact zero when every input is an exact
  // representative and the value is too small to be a nonzero multiple of p^N.
  bool provably_exact_zero(const Polynomial& poly) const {
    std::vector<const RingSlot*> slots;
    for (std::size_t i = 0; i < poly.arity(); ++i) {
      slots.push_back(&ring_slot(poly.vars()[i]));
      if (!slots.back()->exact && poly.degree_in(i) > 0) return false;
    }
    if (cfg_.ring.kind == RingKind::Padic) {
      long double bound = 0;
      for (const auto& [e, c] : poly.terms()) {
        long double term = std::fabs(static_cast<long double>(c));
        for (std::size_t i = 0; i < e.size(); ++i) term *= std::pow(slots[i]->magnitude, static_cast<long double>(e[i]));
        bound += term;
      }
      return bound < std::pow(static_cast<long double>(cfg_.ring.p), cfg_.ring.prec);
    }
    long long degree = 0;
    for (const auto& [e, c] : poly.terms()) {
      long long d = 0;
      for (std::size_t i = 0; i < e.size(); ++i) d += static_cast<long long>(e[i]) * slots[i]->degree;
      degree = std::max(degree, d);
    }
    return degree < cfg_.ring.prec;
  }

  ZeroStatus status(const Polynomial& poly, LocalElement& value) const {
    value = poly.arity() == 0 ? poly.eval({}, cfg_.ring) : poly.eval(current_point(poly));
    if (!value.is_zero_at_precision()) return ZeroStatus::Nonzero;
    return provably_exact_zero(poly) ? ZeroStatus::ExactZero : ZeroStatus::Indeterminate;
  }

  TruthValue ring_atom(const Formula& f) {
    LocalElement value = LocalElement::zero(cfg_.ring);
    switch (status(compiled_atom(f).poly, value)) {
      case ZeroStatus::Nonzero: return TruthValue::False;
      case ZeroStatus::ExactZero: return TruthValue::True;
      default: return TruthValue::Unknown;
    }
  }

  std::optional<MultRes> residue_term(const Term& t) {
    switch (t.op) {
      case Term::Op::Var: return res_value(t.name);
      case Term::Op::Lit: return t.value == 0 ? MultRes::zero(cfg_.ring) : MultRes::one(cfg_.ring);
      case Term::Op::Mul: {
        auto a = residue_term(*t.args[0]);
        if (a && a->is_zero()) return a;
        auto b = residue_term(*t.args[1]);
        if (b && b->is_zero()) return b;
        if (!a || !b) return std::nullopt;
        return *a * *b;
      }
      case Term::Op::ModAdd: {
        auto a = residue_term(*t.args[0]);
        auto b = residue_term(*t.args[1]);
        if (!a || !b) return std::nullopt;
        return plus_mod(*a, *b);
      }
      case Term::Op::Mres: {
        LocalElement value = LocalElement::zero(cfg_.ring);
        switch (status(compiled_term(*t.args[0]).poly, value)) {
          case ZeroStatus::Nonzero: return mres(value);
          case ZeroStatus::ExactZero: return MultRes::zero(cfg_.ring);
          default: return std::nullopt;
        }
      }
      default: throw Error(ErrorKind::SortError, "ring operator in a residue term");
    }
  }

  TruthValue residue_atom(const Formula& f) {
    auto a = residue_term(*f.lhs);
    auto b = residue_term(*f.rhs);
    if (!a || !b) return TruthValue::Unknown;
    return *a == *b ? TruthValue::True : TruthValue::False;
  }

  LocalElement representative(std::uint64_t index, RingSlot& slot) const {
    std::vector<std::uint32_t> digits(static_cast<std::size_t>(cfg_.ring.prec), 0);
    int top = 0;
    std::uint64_t rest = index;
    for (std::size_t i = 0; rest > 0; ++i) {
      digits[i] = static_cast<std::uint32_t>(rest % cfg_.ring.p);
      if (digits[i]) top = static_cast<int>(i);
      rest /= cfg_.ring.p;
    }
    slot.exact = true;
    slot.magnitude = static_cast<long double>(index);
    slot.degree = top;
    return LocalElement::from_digits(cfg_.ring, digits);
  }

  void push_rep(const std::string& name, std::uint64_t index) {
    RingSlot slot{name, LocalElement::zero(cfg_.ring), true, 0, 0};
    slot.value = representative(index, slot);
    ring_env_.push_back(std::move(slot));
  }

  // A root mod m^k that is simple along one of the block variables lifts to an exact root.
  bool try_certify(const Formula& atom, const std::vector<std::string>& block, const LocalElement& value) {
    if (value.valuation() < cfg_.ring_depth) return false;
    const Compiled& c = compiled_atom(atom);
    const auto& vars = c.poly.vars();
    Point pt = current_point(c.poly);
    for (const auto& name : block) {
      auto it = std::find(vars.begin(), vars.end(), name);
      if (it == vars.end()) continue;
      const std::size_t i = static_cast<std::size_t>(it - vars.begin());
      if (!c.partials[i].eval(pt).is_unit()) continue;
      Point lifted = newton_lift_partial({c.poly}, pt, {i});
      Certificate cert;
      cert.vars = block;
      for (const auto& b : block) cert.representatives.push_back(ring_slot(b).value);
      cert.lifted_var = name;
      cert.lifted = std::move(lifted);
      cert.depth = cfg_.ring_depth;
      certificate_ = std::move(cert);
      return true;
    }
    return false;
  }

  TruthValue ring_exists(const Formula& f) {
    if (!is_free_in(*f.body(), f.var)) return eval(*f.body());
    std::vector<std::string> block{f.var};
    const Formula* body = f.body().get();
    while (body->kind == Formula::Kind::Exists && body->sort == Sort::Ring) {
      block.push_back(body->var);
      body = body->body().get();
    }
    const bool atom_body = body->kind == Formula::Kind::Atom && body->sort == Sort::Ring;
    if (!atom_body) {
      block = {f.var};
      body = f.body().get();
    }
    std::vector<std::uint64_t> idx(block.size(), 0);
    const std::size_t base = ring_env_.size();
    for (;;) {
      ring_env_.resize(base, RingSlot{"", LocalElement::zero(cfg_.ring), false, 0, 0});
      for (std::size_t i = 0; i < block.size(); ++i) push_rep(block[i], idx[i]);
      bool found = false;
      if (atom_body) {
        LocalElement value = LocalElement::zero(cfg_.ring);
        ZeroStatus s = status(compiled_atom(*body).poly, value);
        found = s == ZeroStatus::ExactZero || (cfg_.certify && try_certify(*body, block, value));
      } else {
        found = eval(*body) == TruthValue::True;
      }
      if (found) {
        ring_env_.resize(base, RingSlot{"", LocalElement::zero(cfg_.ring), false, 0, 0});
        return TruthValue::True;
      }
      std::size_t k = block.size();
      while (k > 0 && ++idx[k - 1] == reps_per_var_) idx[--k] = 0;
      if (k == 0) break;
    }
    ring_env_.resize(base, RingSlot{"", LocalElement::zero(cfg_.ring), false, 0, 0});
    // no witness among representatives does not refute existence
    return TruthValue::Unknown;
  }

  TruthValue ring_forall(const Formula& f) {
    if (!is_free_in(*f.body(), f.var)) return eval(*f.body());
    for (std::uint64_t i = 0; i < reps_per_var_; ++i) {
      push_rep(f.var, i);
      TruthValue t = eval(*f.body());
      ring_env_.pop_back();
      if (t == TruthValue::False) return TruthValue::False;
    }
    return TruthValue::Unknown;
  }

  bool residue_enumeration_complete(const Formula& f) {
    auto it = complete_.find(&f);
    if (it != complete_.end()) return it->second;
    auto d = detail::dependence(*f.body(), f.var);
    bool ok = d == detail::Dependence::SOnly || (d == detail::Dependence::ClassOnly && cfg_.val_cap >= 1);
    complete_.emplace(&f, ok);
    return ok;
  }

  TruthValue residue_quantifier(const Formula& f) {
    if (!is_free_in(*f.body(), f.var)) return eval(*f.body());
    const bool ex = f.kind == Formula::Kind::Exists;
    const TruthValue decisive = ex ? TruthValue::True : TruthValue::False;
    bool saw_unknown = false;
    auto visit = [&](const MultRes& value) {
      res_env_.push_back({f.var, value});
      TruthValue t = eval(*f.body());
      res_env_.pop_back();
      if (t == TruthValue::Unknown) saw_unknown = true;
      return t == decisive;
    };
    if (visit(MultRes::zero(cfg_.ring))) return decisive;
    for (int v = 0; v <= cfg_.val_cap; ++v)
      for (std::uint32_t u = 1; u < cfg_.ring.p; ++u)
        if (visit(MultRes::pos(cfg_.ring, v, u))) return decisive;
    if (saw_unknown || !residue_enumeration_complete(f)) return TruthValue::Unknown;
    return k_not(decisive);
  }

  TruthValue eval(const Formula& f) {
    switch (f.kind) {
      case Formula::Kind::Atom: return f.sort == Sort::Ring ? ring_atom(f) : residue_atom(f);
      case Formula::Kind::Not: return k_not(eval(*f.args[0]));
      case Formula::Kind::And: {
        TruthValue a = eval(*f.args[0]);
        if (a == TruthValue::False) return a;
        return k_and(a, eval(*f.args[1]));
      }
      case Formula::Kind::Or: {
        TruthValue a = eval(*f.args[0]);
        if (a == TruthValue::True) return a;
        return k_or(a, eval(*f.args[1]));
      }
      case Formula::Kind::Implies: {
        TruthValue a = eval(*f.args[0]);
        if (a == TruthValue::False) return TruthValue::True;
        return k_implies(a, eval(*f.args[1]));
      }
      case Formula::Kind::Iff: return k_iff(eval(*f.args[0]), eval(*f.args[1]));
      case Formula::Kind::Exists:
        return f.sort == Sort::Ring ? ring_exists(f) : residue_quantifier(f);
      case Formula::Kind::Forall:
        return f.sort == Sort::Ring ? ring_forall(f) : residue_quantifier(f);
    }
    return TruthValue::Unknown;
  }

  EvalConfig cfg_;
  std::uint64_t reps_per_var_ = 1;
  std::vector<RingSlot> ring_env_;
  std::vector<ResSlot> res_env_;
  std::unordered_map<const Formula*, Compiled> atoms_;
  std::unordered_map<const Term*, Compiled> terms_;
  std::unordered_map<const Formula*, bool> complete_;
  std::optional<Certificate> certificate_;
};

inline EvalOutcome evaluate_explained(const Formula& f, const Assignment& assignment, const EvalConfig& cfg) {
  return Evaluator(cfg).run(f, assignment);
}

inline TruthValue evaluate(const Formula& f, const Assignment& assignment, const EvalConfig& cfg) {
  return evaluate_explained(f, assignment, cfg).value;
}

inline TruthValue evaluate(const Formula& f, const EvalConfig& cfg) { return evaluate(f, Assignment{}, cfg); }

struct TransferResult {
  TruthValue zp = TruthValue::Unknown;
  TruthValue fpt = TruthValue::Unknown;
  /// True or False when both sides are determinate, Unknown otherwise.
  TruthValue agree = TruthValue::Unknown;
};

/// Evaluates a sentence over Z_p and F_p[[t]] with the same depth, cap and precision.
inline TransferResult transfer_check(const Formula& sentence, std::uint32_t p, const EvalConfig& cfg) {
  if (!free_vars(sentence).empty())
    throw Error(ErrorKind::UnboundVariable, "transfer_check needs a sentence; free: " + free_vars(sentence).front());
  EvalConfig zp = cfg, fpt = cfg;
  zp.ring = padic(p, cfg.ring.prec);
  fpt.ring = power_series(p, cfg.ring.prec);
  TransferResult r;
  r.zp = evaluate(sentence, zp);
  r.fpt = evaluate(sentence, fpt);
  if (is_determinate(r.zp) && is_determinate(r.fpt)) r.agree = r.zp == r.fpt ? TruthValue::True : TruthValue::False;
  return r;
}

}  // namespace hlab
