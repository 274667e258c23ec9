#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hlab/error.hpp"
#include "hlab/ring.hpp"

namespace hlab {

/// A truncated element of Z_p or F_p[[t]] in canonical form: a = u * p^v
/// (resp. u * t^v) with the unit u known modulo m^(N - v).
///
/// valuation() == N means the element is zero at precision, which is not
/// the same as being known to equal zero.
class LocalElement {
 public:
  using Digit = std::uint32_t;

  explicit LocalElement(const RingSpec& ring) : ring_(ring), valuation_(ring.prec) {}

  /// Builds from little-endian base-p digits; missing high digits are zero,
  /// digits past the precision are dropped.
  static LocalElement from_digits(const RingSpec& ring, std::vector<Digit> digits) {
    for (Digit d : digits)
      if (d >= ring.p) throw Error(ErrorKind::InvalidArgument, "digit " + std::to_string(d) + " out of range");
    digits.resize(static_cast<std::size_t>(ring.prec), 0);
    return normalize(ring, std::move(digits));
  }

  static LocalElement zero(const RingSpec& ring) { return LocalElement(ring); }
  static LocalElement one(const RingSpec& ring) { return embed_integer(1, ring); }

  /// The canonical map Z -> A. For F_p[[t]] this is n mod p as a constant.
  static LocalElement embed_integer(std::int64_t n, const RingSpec& ring) {
    std::vector<Digit> digits(static_cast<std::size_t>(ring.prec), 0);
    // magnitude as unsigned so INT64_MIN is handled
    std::uint64_t mag = n < 0 ? ~static_cast<std::uint64_t>(n) + 1 : static_cast<std::uint64_t>(n);
    if (ring.kind == RingKind::Padic) {
      for (std::size_t i = 0; i < digits.size() && mag; ++i) {
        digits[i] = static_cast<Digit>(mag % ring.p);
        mag /= ring.p;
      }
    } else {
      digits[0] = static_cast<Digit>(mag % ring.p);
    }
    LocalElement e = normalize(ring, std::move(digits));
    return n < 0 ? -e : e;
  }

  /// Horner evaluation of a decimal string, so magnitudes beyond 64 bits embed exactly.
  static LocalElement embed_decimal(std::string_view text, const RingSpec& ring) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
    if (i == text.size()) throw Error(ErrorKind::InvalidArgument, "empty integer literal");
    LocalElement acc = zero(ring);
    const LocalElement ten = embed_integer(10, ring);
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c < '0' || c > '9') throw Error(ErrorKind::InvalidArgument, "bad integer literal '" + std::string(text) + "'");
      acc = acc * ten + embed_integer(c - '0', ring);
    }
    return negative ? -acc : acc;
  }

  const RingSpec& ring() const { return ring_; }
  int precision() const { return ring_.prec; }
  int valuation() const { return valuation_; }
  bool is_zero_at_precision() const { return valuation_ == ring_.prec; }
  bool is_unit() const { return valuation_ == 0; }
  const std::vector<Digit>& unit_digits() const { return unit_digits_; }

  /// Full little-endian expansion of length N.
  std::vector<Digit> digits() const {
    std::vector<Digit> d(static_cast<std::size_t>(ring_.prec), 0);
    std::copy(unit_digits_.begin(), unit_digits_.end(), d.begin() + valuation_);
    return d;
  }

  /// Image in the residue field A/m.
  Digit residue() const { return valuation_ == 0 ? unit_digits_[0] : 0; }

  /// The unit u with a = u * p^v, padded with zero digits up to precision N.
  /// Zero at precision has no unit part.
  LocalElement unit_part() const {
    if (is_zero_at_precision()) throw Error(ErrorKind::IndeterminateResidue, "zero at precision has no unit part");
    return from_digits(ring_, unit_digits_);
  }

  /// p^k (resp. t^k); zero at precision once k >= N.
  static LocalElement uniformizer_power(int k, const RingSpec& ring) {
    std::vector<Digit> d(static_cast<std::size_t>(ring.prec), 0);
    if (k < ring.prec) d[static_cast<std::size_t>(k)] = 1;
    return normalize(ring, std::move(d));
  }

  friend bool operator==(const LocalElement& a, const LocalElement& b) {
    return a.ring_ == b.ring_ && a.valuation_ == b.valuation_ && a.unit_digits_ == b.unit_digits_;
  }

  friend LocalElement operator+(const LocalElement& a, const LocalElement& b) {
    require_same_ring(a.ring_, b.ring_);
    const RingSpec& r = a.ring_;
    auto x = a.digits();
    auto y = b.digits();
    std::vector<Digit> out(x.size());
    if (r.kind == RingKind::Padic) {
      std::uint64_t carry = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        std::uint64_t s = std::uint64_t{x[i]} + y[i] + carry;
        out[i] = static_cast<Digit>(s % r.p);
        carry = s / r.p;
      }
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<Digit>(fp::add(x[i], y[i], r.p));
    }
    return normalize(r, std::move(out));
  }

  friend LocalElement operator-(const LocalElement& a) {
    const RingSpec& r = a.ring_;
    if (a.is_zero_at_precision()) return a;
    auto x = a.digits();
    std::vector<Digit> out(x.size(), 0);
    if (r.kind == RingKind::Padic) {
      // p^N - a: first nonzero digit d -> p - d, later digits d -> p - 1 - d
      std::size_t i = static_cast<std::size_t>(a.valuation_);
      out[i] = r.p - x[i];
      for (++i; i < x.size(); ++i) out[i] = r.p - 1 - x[i];
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] == 0 ? 0 : r.p - x[i];
    }
    return normalize(r, std::move(out));
  }

  friend LocalElement operator-(const LocalElement& a, const LocalElement& b) { return a + (-b); }

  friend LocalElement operator*(const LocalElement& a, const LocalElement& b) {
    require_same_ring(a.ring_, b.ring_);
    const RingSpec& r = a.ring_;
    const int n = r.prec;
    const int v = std::min(n, a.valuation_ + b.valuation_);
    if (v == n) return zero(r);
    // multiply unit parts modulo m^(n - v), then shift
    const std::size_t len = static_cast<std::size_t>(n - v);
    std::vector<std::uint64_t> acc(len, 0);
    const auto& x = a.unit_digits_;
    const auto& y = b.unit_digits_;
    if (r.kind == RingKind::Padic) {
      for (std::size_t i = 0; i < len && i < x.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; i + j < len; ++j) {
          std::uint64_t t = acc[i + j] + carry + (j < y.size() ? std::uint64_t{x[i]} * y[j] : 0);
          acc[i + j] = t % r.p;
          carry = t / r.p;
        }
      }
    } else {
      for (std::size_t i = 0; i < len && i < x.size(); ++i)
        for (std::size_t j = 0; i + j < len && j < y.size(); ++j)
          acc[i + j] = (acc[i + j] + std::uint64_t{x[i]} * y[j]) % r.p;
    }
    std::vector<Digit> out(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < len; ++i) out[static_cast<std::size_t>(v) + i] = static_cast<Digit>(acc[i]);
    return normalize(r, std::move(out));
  }

  LocalElement& operator+=(const LocalElement& o) { return *this = *this + o; }
  LocalElement& operator-=(const LocalElement& o) { return *this = *this - o; }
  LocalElement& operator*=(const LocalElement& o) { return *this = *this * o; }

  LocalElement pow(std::uint64_t e) const {
    LocalElement result = one(ring_);
    LocalElement base = *this;
    while (e) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }

  /// Inverse of a unit at full precision, by Newton iteration b <- b(2 - ab).
  LocalElement invert() const {
    if (!is_unit())
      throw Error(ErrorKind::NotAUnit, "element of valuation " + std::to_string(valuation_) + " is not a unit");
    LocalElement b = embed_integer(static_cast<std::int64_t>(fp::inv(unit_digits_[0], ring_.p)), ring_);
    const LocalElement two = embed_integer(2, ring_);
    for (int known = 1; known < ring_.prec; known *= 2) b = b * (two - *this * b);
    return b;
  }

  /// Representative in [0, p^N) when it fits in 64 bits (Z_p only).
  std::optional<std::uint64_t> to_uint() const {
    if (ring_.kind != RingKind::Padic) return std::nullopt;
    constexpr unsigned __int128 limit = std::numeric_limits<std::uint64_t>::max();
    unsigned __int128 value = 0;
    auto d = digits();
    for (auto it = d.rbegin(); it != d.rend(); ++it) {
      value = value * ring_.p + *it;
      if (value > limit) return std::nullopt;
    }
    return static_cast<std::uint64_t>(value);
  }

 private:
  static LocalElement normalize(const RingSpec& ring, std::vector<Digit> digits) {
    LocalElement e(ring);
    auto first = std::find_if(digits.begin(), digits.end(), [](Digit d) { return d != 0; });
    e.valuation_ = static_cast<int>(first - digits.begin());
    e.unit_digits_.assign(first, digits.end());
    return e;
  }

  RingSpec ring_;
  int valuation_;
  std::vector<Digit> unit_digits_;
};

inline LocalElement embed_integer(std::int64_t n, const RingSpec& ring) {
  return LocalElement::embed_integer(n, ring);
}

/// Z_p: decimal representative when it fits, else a digit list.
/// F_p[[t]]: a polynomial in t.
inline std::string to_string(const LocalElement& a) {
  const RingSpec& r = a.ring();
  auto d = a.digits();
  if (r.kind == RingKind::Padic) {
    if (auto v = a.to_uint()) return std::to_string(*v);
    std::string s = "[";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + "]_" + std::to_string(r.p);
  }
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d[i]) continue;
    if (!s.empty()) s += " + ";
    if (i == 0) {
      s += std::to_string(d[i]);
    } else {
      if (d[i] != 1) s += std::to_string(d[i]) + "*";
      s += i == 1 ? "t" : "t^" + std::to_string(i);
    }
  }
  return s.empty() ? "0" : s;
}

using Point = std::vector<LocalElement>;

inline bool congruent_mod_m(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::ArityMismatch, "points of different length");
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] - b[i]).valuation() < 1) return false;
  return true;
}

}  // namespace hlab
