#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/local_element.hpp"
#include "hlab/polynomial.hpp"

namespace hlab {

/// An element of MR(A) = A / (1 + m_A): either zero, or the pair
/// (valuation, leading unit digit), which is a complete invariant of the
/// class for Z_p and F_p[[t]].
class MultRes {
 public:
  static MultRes zero(const RingSpec& ring) { return MultRes(ring); }

  static MultRes pos(const RingSpec& ring, std::int64_t valuation, std::uint32_t unit) {
    if (valuation < 0) throw Error(ErrorKind::InvalidArgument, "negative valuation");
    if (unit == 0 || unit >= ring.p)
      throw Error(ErrorKind::InvalidArgument, "unit residue " + std::to_string(unit) + " not in [1, p-1]");
    MultRes r(ring);
    r.zero_ = false;
    r.valuation_ = valuation;
    r.unit_ = unit;
    return r;
  }

  static MultRes one(const RingSpec& ring) { return pos(ring, 0, 1); }

  const RingSpec& ring() const { return ring_; }
  bool is_zero() const { return zero_; }
  /// Meaningful only for nonzero residues.
  std::int64_t valuation() const { return valuation_; }
  std::uint32_t unit() const { return unit_; }
  bool is_invertible() const { return !zero_ && valuation_ == 0; }

  friend bool operator==(const MultRes& a, const MultRes& b) {
    return a.ring_ == b.ring_ && a.zero_ == b.zero_ && a.valuation_ == b.valuation_ && a.unit_ == b.unit_;
  }

 private:
  explicit MultRes(const RingSpec& ring) : ring_(ring) {}

  RingSpec ring_;
  bool zero_ = true;
  std::int64_t valuation_ = 0;
  std::uint32_t unit_ = 0;
};

/// Element of the residue field A/m.
struct ResidueFieldElem {
  std::uint32_t value = 0;
  friend bool operator==(const ResidueFieldElem&, const ResidueFieldElem&) = default;
};

/// Multiplicative residue of a. Zero at precision is indeterminate: the
/// element may be a nonzero element of large valuation.
inline MultRes mres(const LocalElement& a) {
  if (a.is_zero_at_precision())
    throw Error(ErrorKind::IndeterminateResidue, "element is zero modulo m^" + std::to_string(a.precision()));
  return MultRes::pos(a.ring(), a.valuation(), a.unit_digits().front());
}

/// mres(0) for an element the caller knows to be exactly zero.
inline MultRes mres_of_exact_zero(const RingSpec& ring) { return MultRes::zero(ring); }

/// mres of an integer given in decimal. The integer is known exactly, so its
/// residue is determinate at any precision: in Z_p the valuation is v_p(n),
/// and in F_p[[t]] n is the constant n mod p.
inline MultRes mres_of_integer(std::string_view text, const RingSpec& ring) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  std::string digits(text.substr(i));
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw Error(ErrorKind::InvalidArgument, "bad integer literal '" + std::string(text) + "'");
  auto divmod = [&](std::string& n) {
    std::uint64_t rem = 0;
    std::string q;
    for (char c : n) {
      rem = rem * 10 + static_cast<std::uint64_t>(c - '0');
      if (!q.empty() || rem / ring.p) q.push_back(static_cast<char>('0' + rem / ring.p));
      rem %= ring.p;
    }
    n = q.empty() ? "0" : q;
    return rem;
  };
  if (digits.find_first_not_of('0') == std::string::npos) return MultRes::zero(ring);
  std::int64_t v = 0;
  std::uint64_t unit = divmod(digits);
  if (ring.kind == RingKind::Padic)
    while (unit == 0) {
      ++v;
      unit = divmod(digits);
    }
  if (unit == 0) return MultRes::zero(ring);
  if (negative) unit = ring.p - unit;
  return MultRes::pos(ring, v, static_cast<std::uint32_t>(unit));
}

inline MultRes mr_mul(const MultRes& a, const MultRes& b) {
  require_same_ring(a.ring(), b.ring());
  if (a.is_zero() || b.is_zero()) return MultRes::zero(a.ring());
  return MultRes::pos(a.ring(), a.valuation() + b.valuation(),
                      static_cast<std::uint32_t>(fp::mul(a.unit(), b.unit(), a.ring().p)));
}

inline MultRes operator*(const MultRes& a, const MultRes& b) { return mr_mul(a, b); }

/// s_A : MR(A) -> A/m.
inline ResidueFieldElem s_A(const MultRes& a) {
  if (a.is_zero() || a.valuation() > 0) return {0};
  return {a.unit()};
}

/// The unique gamma in MR(A)^x u {0} with s_A(gamma) = s_A(a) + s_A(b).
inline MultRes plus_mod(const MultRes& a, const MultRes& b) {
  require_same_ring(a.ring(), b.ring());
  const auto c = static_cast<std::uint32_t>(fp::add(s_A(a).value, s_A(b).value, a.ring().p));
  return c == 0 ? MultRes::zero(a.ring()) : MultRes::pos(a.ring(), 0, c);
}

/// Section of s_A: the invertible-or-zero residue lying over a field element.
inline MultRes lift_residue(const RingSpec& ring, std::uint32_t value) {
  return value % ring.p == 0 ? MultRes::zero(ring) : MultRes::pos(ring, 0, value % ring.p);
}

/// tau_p : MR(Z_p) -> MR(F_p[[t]]), mres(u p^m) |-> mres((u mod p) t^m).
inline MultRes tau_p(const MultRes& a) {
  if (a.ring().kind != RingKind::Padic) throw Error(ErrorKind::WrongRingKind, "tau_p expects a residue over Z_p");
  RingSpec target = twin(a.ring());
  return a.is_zero() ? MultRes::zero(target) : MultRes::pos(target, a.valuation(), a.unit());
}

inline MultRes tau_p_inverse(const MultRes& a) {
  if (a.ring().kind != RingKind::PowerSeries)
    throw Error(ErrorKind::WrongRingKind, "tau_p inverse expects a residue over F_p[[t]]");
  RingSpec target = twin(a.ring());
  return a.is_zero() ? MultRes::zero(target) : MultRes::pos(target, a.valuation(), a.unit());
}

/// Identifies residues across the two rings through tau_p.
inline MultRes to_ring_kind(const MultRes& a, RingKind kind) {
  if (a.ring().kind == kind) return a;
  return kind == RingKind::PowerSeries ? tau_p(a) : tau_p_inverse(a);
}

/// Whether a and a' agree modulo m and every f in funcs takes values with
/// the same multiplicative residue at a and a'. The two points may live in
/// Z_p and F_p[[t]] respectively; residues are then compared through tau_p.
inline bool same_residues(const Point& a, const Point& a2, const std::vector<Polynomial>& funcs) {
  if (a.size() != a2.size()) throw Error(ErrorKind::ArityMismatch, "points of different dimension");
  if (a.empty() && !funcs.empty()) throw Error(ErrorKind::ArityMismatch, "empty points");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].precision() != a2[i].precision() || a[i].ring().p != a2[i].ring().p)
      throw Error(ErrorKind::RingMismatch, "points at different precision or residue characteristic");
  }
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].residue() != a2[i].residue()) same = false;
  for (const auto& f : funcs) {
    LocalElement x = f.eval(a);
    LocalElement y = f.eval(a2);
    if (x.is_zero_at_precision() || y.is_zero_at_precision())
      throw Error(ErrorKind::IndeterminateResidue, "function " + to_string(f) + " vanishes at precision");
    if (!(to_ring_kind(mres(x), RingKind::Padic) == to_ring_kind(mres(y), RingKind::Padic))) same = false;
  }
  return same;
}

inline std::string to_string(const MultRes& a) {
  if (a.is_zero()) return "zero";
  return "(" + std::to_string(a.valuation()) + ", " + std::to_string(a.unit()) + ")";
}

}  // namespace hlab
