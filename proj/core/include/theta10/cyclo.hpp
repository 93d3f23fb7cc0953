#pragma once

// Exact arithmetic in the cyclotomic field Q(zeta_p), p an odd prime.
//
// Elements are stored densely in the power basis 1, z, ..., z^{p-2}; the
// relation z^{p-1} = -(1 + z + ... + z^{p-2}) keeps the form canonical, so
// equality is coefficient-wise.  All character values and operator entries
// in the library live here.

#include <gmpxx.h>

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace theta10 {

using Rat = mpq_class;

/// Raised when operands are structurally incompatible (conductor mismatch,
/// wrong subgroup, bad label).  Indicates a caller bug, not bad luck.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CycNum {
 public:
  CycNum() = default;
  explicit CycNum(int p);
  CycNum(int p, const Rat& r);
  CycNum(int p, long r) : CycNum(p, Rat(r)) {}

  /// Builds from p-1 canonical coefficients.
  static CycNum from_coeffs(int p, std::vector<Rat> coeffs);
  /// z^k for any integer k.
  static CycNum zeta_power(int p, long k);
  /// sum_k counts[k] z^k with counts indexed by k mod p (size p).
  static CycNum from_exponent_counts(int p, std::span<const long> counts);

  int conductor() const { return p_; }
  const std::vector<Rat>& coeffs() const { return c_; }

  bool is_zero() const;
  bool is_one() const;
  bool is_rational() const;
  /// The value as a rational; throws StructuralError if irrational.
  Rat to_rational() const;

  CycNum& operator+=(const CycNum& o);
  CycNum& operator-=(const CycNum& o);
  CycNum& operator*=(const CycNum& o);
  CycNum& operator*=(const Rat& r);
  CycNum operator-() const;

  friend CycNum operator+(CycNum a, const CycNum& b) { return a += b; }
  friend CycNum operator-(CycNum a, const CycNum& b) { return a -= b; }
  friend CycNum operator*(const CycNum& a, const CycNum& b);
  friend CycNum operator*(CycNum a, const Rat& r) { return a *= r; }
  friend CycNum operator*(const Rat& r, CycNum a) { return a *= r; }
  friend bool operator==(const CycNum& a, const CycNum& b);

  /// Galois automorphism z -> z^k, gcd(k, p) = 1.
  CycNum galois(long k) const;
  /// Complex conjugation (z -> z^{-1}).
  CycNum conj() const { return galois(-1); }

  std::complex<double> to_complex() const;
  /// Decimal rendering "re+imi", for reports only.
  std::string approx(int digits = 12) const;
  std::string to_string() const;

 private:
  void require_same(const CycNum& o) const;

  int p_ = 0;
  std::vector<Rat> c_;
};

CycNum cyc_mul(const CycNum& a, const CycNum& b);
/// Inverse by solving the (p-1)-dimensional multiplication system over Q.
CycNum cyc_inv(const CycNum& a);

/// psi(x) = z^x for x in F_p.
CycNum additive_character(int p, long x);

/// sum over x in F_q of psi(Tr(x^2)), q a power of p.
CycNum gauss_sum(int p, int q);

nlohmann::ordered_json to_json(const CycNum& a);
CycNum cyc_from_json(const nlohmann::ordered_json& j);

/// cos(2 pi k / m) when it is rational (m / gcd(k, m) in {1, 2, 3, 4, 6}).
Rat rational_cosine(long k, long m);
bool cosine_is_rational(long k, long m);

bool is_prime(long n);

}  // namespace theta10
