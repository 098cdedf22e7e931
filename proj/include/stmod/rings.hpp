#pragma once

#include <cstdint>
#include <string>

#include "stmod/errors.hpp"

namespace stmod {

// The two coefficient rings: Z/p^2 and F_p[e]/(e^2).
// Elements are encoded as v = lo + p*hi with lo, hi in [0, p).
// For Zpsq the encoding is the integer v mod p^2; for Eps it means lo + hi*e.
// In both rings the radical is generated by u (= p resp. e), u^2 = 0, and the
// encoding of u is the number p.
enum class RingKind { Zpsq, Eps };

class BaseRing {
 public:
  BaseRing(RingKind kind, std::uint64_t p) : kind_(kind), p_(p), psq_(p * p) {
    if (p < 2 || p > 46337 || !is_prime(p))
      throw BadInput("ring modulus must be a small prime, got " + std::to_string(p));
  }

  RingKind kind() const { return kind_; }
  std::uint64_t p() const { return p_; }
  std::uint64_t psq() const { return psq_; }
  std::uint64_t size() const { return psq_; }

  bool operator==(const BaseRing& o) const { return kind_ == o.kind_ && p_ == o.p_; }
  bool operator!=(const BaseRing& o) const { return !(*this == o); }

  std::uint64_t lo(std::uint64_t v) const { return v % p_; }
  std::uint64_t hi(std::uint64_t v) const { return v / p_; }
  std::uint64_t from_parts(std::uint64_t lo, std::uint64_t hi) const {
    return (lo % p_) + p_ * (hi % p_);
  }

  // Canonical image of an integer under Z -> R.
  std::uint64_t from_int(long long n) const {
    if (kind_ == RingKind::Zpsq) {
      long long m = n % static_cast<long long>(psq_);
      if (m < 0) m += static_cast<long long>(psq_);
      return static_cast<std::uint64_t>(m);
    }
    long long m = n % static_cast<long long>(p_);
    if (m < 0) m += static_cast<long long>(p_);
    return static_cast<std::uint64_t>(m);
  }

  std::uint64_t zero() const { return 0; }
  std::uint64_t one() const { return 1; }
  std::uint64_t radical() const { return p_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    check(a); check(b);
    if (kind_ == RingKind::Zpsq) return (a + b) % psq_;
    return from_parts(a % p_ + b % p_, a / p_ + b / p_);
  }

  std::uint64_t neg(std::uint64_t a) const {
    check(a);
    if (kind_ == RingKind::Zpsq) return a == 0 ? 0 : psq_ - a;
    return from_parts(p_ - a % p_, p_ - a / p_);
  }

  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    check(a); check(b);
    if (kind_ == RingKind::Zpsq) return (a * b) % psq_;
    std::uint64_t al = a % p_, ah = a / p_, bl = b % p_, bh = b / p_;
    return from_parts(al * bl, al * bh + ah * bl);
  }

  bool is_unit(std::uint64_t a) const { check(a); return a % p_ != 0; }
  bool in_radical(std::uint64_t a) const { check(a); return a % p_ == 0; }

  std::uint64_t inv(std::uint64_t a) const {
    check(a);
    if (!is_unit(a)) throw BadInput("ring element is not a unit");
    if (kind_ == RingKind::Zpsq) return inv_mod(a, psq_);
    std::uint64_t al = a % p_, ah = a / p_;
    std::uint64_t il = inv_mod(al, p_);
    // (al + ah e)^-1 = al^-1 - al^-2 ah e
    std::uint64_t ih = (p_ - (il * il % p_) * ah % p_) % p_;
    return from_parts(il, ih);
  }

  std::uint64_t residue(std::uint64_t a) const { check(a); return a % p_; }

  // Solve u*x = a when a is in the radical; x is determined mod the radical.
  std::uint64_t radical_quotient(std::uint64_t a) const {
    check(a);
    if (a % p_ != 0) throw BadInput("not a radical multiple");
    return a / p_;
  }

  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

  std::string name() const {
    return (kind_ == RingKind::Zpsq ? "Z/" + std::to_string(psq_)
                                    : "F" + std::to_string(p_) + "[e]/(e^2)");
  }

 private:
  void check(std::uint64_t v) const {
    if (v >= psq_) throw BadInput("ring element out of range");
  }

  static std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
    long long t = 0, nt = 1;
    long long r = static_cast<long long>(m), nr = static_cast<long long>(a % m);
    while (nr != 0) {
      long long q = r / nr;
      long long tmp = t - q * nt; t = nt; nt = tmp;
      tmp = r - q * nr; r = nr; nr = tmp;
    }
    if (r != 1) throw BadInput("element not invertible");
    if (t < 0) t += static_cast<long long>(m);
    return static_cast<std::uint64_t>(t);
  }

  RingKind kind_;
  std::uint64_t p_;
  std::uint64_t psq_;
};

}  // namespace stmod
