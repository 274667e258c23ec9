#pragma once

#include <cstdint>
#include <string>

#include "hlab/error.hpp"

namespace hlab {

enum class RingKind { Padic, PowerSeries };

/// One of the two henselian valuation rings Z_p or F_p[[t]], with every
/// element known modulo m^prec.
struct RingSpec {
  RingKind kind = RingKind::Padic;
  std::uint32_t p = 7;
  int prec = 8;

  friend bool operator==(const RingSpec&, const RingSpec&) = default;
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

inline void validate(const RingSpec& ring) {
  if (ring.p >= (1u << 31) || !is_prime(ring.p))
    throw Error(ErrorKind::InvalidArgument, "p = " + std::to_string(ring.p) + " is not a prime below 2^31");
  if (ring.prec < 1)
    throw Error(ErrorKind::InvalidArgument, "precision must be positive");
}

inline RingSpec make_ring(RingKind kind, std::uint32_t p, int prec) {
  RingSpec r{kind, p, prec};
  validate(r);
  return r;
}

inline RingSpec padic(std::uint32_t p, int prec) { return make_ring(RingKind::Padic, p, prec); }
inline RingSpec power_series(std::uint32_t p, int prec) { return make_ring(RingKind::PowerSeries, p, prec); }

/// The other protagonist with the same p and precision.
inline RingSpec twin(const RingSpec& ring) {
  RingSpec r = ring;
  r.kind = ring.kind == RingKind::Padic ? RingKind::PowerSeries : RingKind::Padic;
  return r;
}

inline std::string to_string(const RingSpec& ring) {
  std::string base = ring.kind == RingKind::Padic ? "Z_" + std::to_string(ring.p)
                                                  : "F_" + std::to_string(ring.p) + "[[t]]";
  return base + " mod m^" + std::to_string(ring.prec);
}

inline void require_same_ring(const RingSpec& a, const RingSpec& b) {
  if (!(a == b)) throw Error(ErrorKind::RingMismatch, to_string(a) + " vs " + to_string(b));
}

// Residue-field helpers; p < 2^31 so products fit in 64 bits.
namespace fp {

inline std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return (a + b) % p; }
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return (a + p - b) % p; }
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return (a * b) % p; }

inline std::uint64_t pow(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

/// Inverse of a nonzero residue; p is prime.
inline std::uint64_t inv(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw Error(ErrorKind::NotAUnit, "0 has no inverse in F_" + std::to_string(p));
  return pow(a, p - 2, p);
}

inline std::uint64_t reduce(std::int64_t n, std::uint64_t p) {
  std::int64_t r = n % static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
}

}  // namespace fp

}  // namespace hlab
