#pragma once

// Finite field tower F_p ⊂ F_q ⊂ F_{q^2} ⊂ F_{q^4}.
//
// Everything lives inside one big field F_p[x]/(f), deg f = 4r, with f the
// least monic irreducible polynomial in the order "coefficient vector read as
// a base-p integer, constant term least significant".  Elements of the big
// field are addressed by that same integer ("code").  The subfields F_q and
// F_{q^2} are cut out by Frobenius fixed points and get their own compact
// tables: F_q elements are small indices (residues when r = 1), and
// E = F_{q^2} elements are indices a + q*b for a*e1 + b*e2 with e1 = 1.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace theta10 {

using Fq = std::uint8_t;    // index of an F_q element
using EIdx = std::uint16_t; // index of an element of E = F_{q^2}

class FieldTower;

/// Compact arithmetic tables for F_q.  Index 0 is zero, index 1 is one; for
/// r = 1 the index of a residue is the residue itself.
class FiniteField {
 public:
  int p() const { return p_; }
  int r() const { return r_; }
  int q() const { return q_; }

  Fq add(Fq a, Fq b) const { return add_[a * q_ + b]; }
  Fq sub(Fq a, Fq b) const { return add_[a * q_ + neg_[b]]; }
  Fq neg(Fq a) const { return neg_[a]; }
  Fq mul(Fq a, Fq b) const { return mul_[a * q_ + b]; }
  Fq inv(Fq a) const;
  Fq div(Fq a, Fq b) const { return mul(a, inv(b)); }
  Fq pow(Fq a, long e) const;
  /// Image of an integer under Z -> F_p ⊂ F_q.
  Fq from_int(long n) const;
  Fq half() const { return inv_[from_int(2)]; }

  /// Absolute trace to F_p, as a residue in [0, p).
  int trace(Fq a) const { return trace_[a]; }
  /// Quadratic character: 1, -1, or 0 at zero.
  int chi(Fq a) const { return chi_[a]; }

  Fq primitive() const { return primitive_; }
  /// 1, g, ..., g^{r-1} for the primitive element g; an F_p-basis of F_q.
  std::vector<Fq> prime_basis() const;
  /// Coordinates over F_p (length r, constant first).
  std::vector<int> prime_coords(Fq a) const;

  std::uint32_t code(Fq a) const { return code_[a]; }

 private:
  friend class FieldTower;
  int p_ = 0, r_ = 0, q_ = 0;
  std::vector<Fq> add_, mul_, neg_, inv_;
  std::vector<int> trace_, chi_;
  std::vector<std::uint32_t> code_;
  Fq primitive_ = 1;
};

/// The quadratic space E = F_{q^2} with basis (e1, e2) = (1, e2) and the
/// norm form <x, y>_E = (x y^q + x^q y) / 2.
class QuadSpace {
 public:
  int q() const { return q_; }
  int size() const { return q_ * q_; }

  EIdx from_coords(Fq a, Fq b) const { return static_cast<EIdx>(a + q_ * b); }
  Fq coord_a(EIdx x) const { return static_cast<Fq>(x % q_); }
  Fq coord_b(EIdx x) const { return static_cast<Fq>(x / q_); }
  EIdx embed(Fq a) const { return from_coords(a, 0); }

  EIdx add(EIdx x, EIdx y) const;
  EIdx neg(EIdx x) const;
  EIdx sub(EIdx x, EIdx y) const { return add(x, neg(y)); }
  EIdx scale(Fq c, EIdx x) const;
  EIdx mul(EIdx x, EIdx y) const { return mul_[x * size() + y]; }
  EIdx inv(EIdx x) const;
  EIdx sigma(EIdx x) const { return conj_[x]; }
  Fq norm(EIdx x) const { return norm_[x]; }
  Fq form(EIdx x, EIdx y) const;

  std::uint32_t code(EIdx x) const { return code_[x]; }

 private:
  friend class FieldTower;
  int q_ = 0;
  const FiniteField* f_ = nullptr;
  std::vector<EIdx> mul_, conj_;
  std::vector<Fq> norm_;
  std::vector<std::uint32_t> code_;
};

/// 2x2 matrix over F_q, column-major action on E-coordinates (a, b).
struct Mat2 {
  std::array<Fq, 4> m{};  // row-major: m[0] m[1] / m[2] m[3]
  Fq at(int i, int j) const { return m[static_cast<std::size_t>(2 * i + j)]; }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// O(E), dihedral of order 2(q+1).  Element k < q+1 is t0^k; element
/// q+1+k is sigma * t0^k, where t0 is the distinguished generator of SO(E).
class OrthGroupE {
 public:
  int order() const { return static_cast<int>(mats_.size()); }
  int so_order() const { return order() / 2; }
  bool is_rotation(int k) const { return k < so_order(); }
  /// epsilon: +1 on SO(E), -1 off it.
  int sign(int k) const { return is_rotation(k) ? 1 : -1; }
  int identity() const { return 0; }
  int sigma() const { return so_order(); }
  int generator() const { return 1; }

  const Mat2& matrix(int k) const { return mats_[static_cast<std::size_t>(k)]; }
  EIdx apply(int k, EIdx x) const;
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a * order() + b)]; }
  int inv(int a) const { return inv_[static_cast<std::size_t>(a)]; }
  /// Norm-one element of F_{q^2} for a rotation.
  EIdx rotation_unit(int k) const { return units_[static_cast<std::size_t>(k)]; }

 private:
  friend class FieldTower;
  const QuadSpace* e_ = nullptr;
  std::vector<Mat2> mats_;
  std::vector<int> table_, inv_;
  std::vector<EIdx> units_;
};

class GFElem;

class FieldTower : public std::enable_shared_from_this<FieldTower> {
 public:
  /// Builds the tower for an odd prime power q; throws std::invalid_argument otherwise.
  static std::shared_ptr<const FieldTower> create(int q);

  int p() const { return p_; }
  int r() const { return r_; }
  int q() const { return q_; }
  int degree() const { return 4 * r_; }
  std::uint32_t order() const { return big_; }

  /// Monic modulus f: coefficients f_0 .. f_{d-1} (leading 1 omitted).
  const std::vector<int>& modulus() const { return modulus_; }
  std::string modulus_string() const;
  std::uint32_t generator_code() const { return exp_[1]; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t neg(std::uint32_t a) const;
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t pow(std::uint32_t a, long e) const;
  /// a^{q^k}.
  std::uint32_t frobenius(std::uint32_t a, int k = 1) const;
  bool in_level(std::uint32_t a, int level) const { return frobenius(a, level) == a; }
  /// Multiplicative order (a != 0).
  std::uint64_t mult_order(std::uint32_t a) const;
  std::vector<int> prime_coords(std::uint32_t a) const;

  const FiniteField& base() const { return fq_; }
  const QuadSpace& e_space() const { return e_; }
  const OrthGroupE& orth() const { return orth_; }

  GFElem element(int level, std::uint32_t code) const;
  GFElem kappa() const;

 private:
  FieldTower() = default;
  void build(int q);

  int p_ = 0, r_ = 0, q_ = 0;
  std::uint32_t big_ = 0;
  std::vector<int> modulus_;
  std::vector<std::uint32_t> exp_;      // exp_[i] = kappa^i, i < big_-1
  std::vector<std::int64_t> log_;       // log_[code], -1 at zero
  std::vector<std::uint32_t> pw_;       // p^i
  FiniteField fq_;
  QuadSpace e_;
  OrthGroupE orth_;
};

/// Element of F_{q^level} ⊂ F_{q^4}, level in {1, 2, 4}.
class GFElem {
 public:
  GFElem() = default;
  GFElem(const FieldTower* t, int level, std::uint32_t code);

  const FieldTower* tower() const { return t_; }
  int level() const { return level_; }
  std::uint32_t code() const { return code_; }
  bool is_zero() const { return code_ == 0; }

  friend GFElem operator+(const GFElem& a, const GFElem& b);
  friend GFElem operator-(const GFElem& a, const GFElem& b);
  friend GFElem operator*(const GFElem& a, const GFElem& b);
  GFElem inverse() const;
  GFElem pow(long e) const;
  /// x -> x^{q^k}; stays at the same level.
  GFElem frobenius(int k = 1) const;
  std::uint64_t order() const { return t_->mult_order(code_); }
  friend bool operator==(const GFElem& a, const GFElem& b) { return a.code_ == b.code_; }

 private:
  const FieldTower* t_ = nullptr;
  int level_ = 4;
  std::uint32_t code_ = 0;
};

/// <x, y>_E.
Fq norm_form(const FieldTower& t, EIdx x, EIdx y);
/// sigma(x) = x^q on E.
EIdx sigma(const FieldTower& t, EIdx x);

struct SOGroupE {
  std::vector<EIdx> elements;  // generator^k, k = 0..q
  EIdx generator = 0;
};
/// The norm-one subgroup of F_{q^2}^*, cyclic of order q+1.
SOGroupE so_e_elements(const FieldTower& t);

/// zeta = kappa^{q^2-1}, of multiplicative order q^2+1.
GFElem torus_eigenvalue(const FieldTower& t);

/// Minimal polynomial over F_q of a big-field element, monic, low degree first.
std::vector<Fq> minimal_polynomial(const FieldTower& t, std::uint32_t a);

}  // namespace theta10
