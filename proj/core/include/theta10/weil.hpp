#pragma once

// Schrödinger model of the Weil representation of Sp(V (x) E) on functions
// on L' (x) E, restricted to Sp(V) x O(E).
//
// Operators use the pull-back convention (M f)(x) = c(x) f(tau(x)), so the
// matrix of a monomial operator has entry c(x) at (x, tau(x)).  Elements
// outside the Siegel parabolic P1 are assembled from a Bruhat factorization
// g = p1 w p' with w in {s2, s2 s1 s2}; the Weyl parts are dense "cores"
// found by solving the intertwining equations against the Heisenberg group.

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "theta10/cyclo.hpp"
#include "theta10/gftower.hpp"
#include "theta10/sympgrp.hpp"

namespace theta10 {

/// An 8x8 matrix over F_q acting on V (x) E coordinates (row-major).
using Mat8 = std::array<Fq, 64>;

/// sign * z^e.
struct Phase {
  std::uint8_t e = 0;
  std::int8_t sign = 1;
  friend bool operator==(const Phase&, const Phase&) = default;
};

/// Index set of L' (x) E: x = x3 + q^2 x4, with x3, x4 E-indices.
class FuncSpace {
 public:
  explicit FuncSpace(int q) : q_(q), n2_(q * q), n_(q * q * q * q) {}
  int q() const { return q_; }
  int dim() const { return n_; }
  std::uint32_t index(EIdx x3, EIdx x4) const { return static_cast<std::uint32_t>(x3) + static_cast<std::uint32_t>(n2_) * x4; }
  EIdx x3(std::uint32_t x) const { return static_cast<EIdx>(x % static_cast<std::uint32_t>(n2_)); }
  EIdx x4(std::uint32_t x) const { return static_cast<EIdx>(x / static_cast<std::uint32_t>(n2_)); }
  /// Coordinates (a3, b3, a4, b4) = c[4..7] of the point.
  std::array<Fq, 4> coords(std::uint32_t x) const;
  std::uint32_t from_coords(const std::array<Fq, 4>& c) const;

 private:
  int q_, n2_, n_;
};

class MonomialOp {
 public:
  MonomialOp() = default;
  MonomialOp(int p, std::vector<std::uint32_t> perm, std::vector<Phase> mult);
  static MonomialOp identity(int p, int n);

  int conductor() const { return p_; }
  int dim() const { return static_cast<int>(perm_.size()); }
  std::uint32_t target(std::uint32_t x) const { return perm_[x]; }
  const Phase& mult(std::uint32_t x) const { return mult_[x]; }
  const std::vector<std::uint32_t>& perm() const { return perm_; }

  /// Operator product: (a * b) f = a (b f).
  friend MonomialOp operator*(const MonomialOp& a, const MonomialOp& b);
  friend bool operator==(const MonomialOp&, const MonomialOp&) = default;
  MonomialOp inverse() const;
  bool is_diagonal() const;
  bool is_identity() const;
  CycNum trace() const;

 private:
  int p_ = 0;
  std::vector<std::uint32_t> perm_;
  std::vector<Phase> mult_;
};

/// scalar * (z^{e(i,k)} or 0) for an n x n array of exponents.
struct DenseCore {
  static constexpr std::uint8_t kZero = 0xFF;
  int p = 0;
  int n = 0;
  std::vector<std::uint8_t> exps;
  CycNum scalar;
  std::uint8_t at(std::uint32_t i, std::uint32_t k) const { return exps[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + k]; }
  std::size_t nonzeros() const;
};

/// Dense matrix over Z[z]/(z^p - 1) with one common positive denominator.
class ZMat {
 public:
  ZMat() = default;
  ZMat(int p, int n);
  int conductor() const { return p_; }
  int dim() const { return n_; }
  std::int64_t* entry(std::uint32_t i, std::uint32_t j) { return &c_[(static_cast<std::size_t>(i) * n_ + j) * p_]; }
  const std::int64_t* entry(std::uint32_t i, std::uint32_t j) const { return &c_[(static_cast<std::size_t>(i) * n_ + j) * p_]; }
  const mpz_class& denominator() const { return den_; }
  void set_denominator(const mpz_class& d) { den_ = d; }
  CycNum value(std::uint32_t i, std::uint32_t j) const;
  friend ZMat operator*(const ZMat& a, const ZMat& b);
  friend bool operator==(const ZMat& a, const ZMat& b);

 private:
  int p_ = 0, n_ = 0;
  std::vector<std::int64_t> c_;
  mpz_class den_ = 1;
};

/// An operator on W: monomial, factored (left * core * right), or dense.
class WeilOp {
 public:
  enum class Kind { Monomial, Factored, Dense };

  WeilOp() = default;
  explicit WeilOp(MonomialOp m);
  WeilOp(MonomialOp left, std::shared_ptr<const DenseCore> core, MonomialOp right);
  explicit WeilOp(ZMat dense);

  Kind kind() const { return kind_; }
  int dim() const;
  int conductor() const;
  const MonomialOp& monomial() const { return left_; }
  const MonomialOp& left() const { return left_; }
  const MonomialOp& right() const { return right_; }
  const std::shared_ptr<const DenseCore>& core() const { return core_; }

  CycNum trace() const;
  CycNum entry(std::uint32_t i, std::uint32_t j) const;
  /// (op f)(x) for an integer-valued f.
  CycNum apply_at(const std::vector<std::int64_t>& f, std::uint32_t x) const;
  std::vector<CycNum> apply(const std::vector<CycNum>& f) const;
  ZMat to_dense() const;

  friend WeilOp operator*(const WeilOp& a, const WeilOp& b);
  friend bool operator==(const WeilOp& a, const WeilOp& b);

 private:
  Kind kind_ = Kind::Monomial;
  MonomialOp left_, right_;
  std::shared_ptr<const DenseCore> core_;
  ZMat dense_;
};

/// (u, z) in the Heisenberg group of V (x) E.
struct HeisElem {
  Vec8 u{};
  Fq z = 0;
  friend bool operator==(const HeisElem&, const HeisElem&) = default;
};

/// pi(l + x', z) f(x) = psi(z + a<l,x> + b<l,x'>) f(x + t x'); U1 acts by
/// psi(s/2 <v,v>_{g (x) 1}) with <,>_g the bridge form.
struct Convention {
  Fq a = 0, t = 0, b = 0;
  int a_sign = 1, t_sign = 1, b_sign = 1, bridge_sign = 1;  // b = b_sign / 2
  int passing_combinations = 0;
  std::string describe() const;
};

struct IntertwinerSolution {
  int dimension = 0;             // consistent components of the equation graph
  std::size_t unknowns = 0;
  std::shared_ptr<DenseCore> shape;  // scalar 1; set when dimension == 1
};

class WeilEngine;

/// Pointwise evaluation of rho(g (x) t) for g in P1:
/// (rho f)(x) = phase(x) f(target(x)).
class SiegelEvaluator {
 public:
  std::pair<Phase, std::uint32_t> at(std::uint32_t x) const;

 private:
  friend class WeilEngine;
  struct Levi {
    int chi = 1;
    std::array<Fq, 16> inv{};
  };
  const WeilEngine* engine_ = nullptr;
  BilForm3 form_;
  Levi levi_;
};

class WeilEngine {
 public:
  /// Builds the model and runs the convention calibration.
  explicit WeilEngine(std::shared_ptr<const SpGroup> group);
  static std::shared_ptr<WeilEngine> create(int q);

  const SpGroup& group() const { return *group_; }
  std::shared_ptr<const SpGroup> group_ptr() const { return group_; }
  const FiniteField& field() const { return group_->field(); }
  const FuncSpace& space() const { return space_; }
  int q() const { return group_->q(); }
  int p() const { return group_->tower().p(); }
  const Convention& convention() const { return conv_; }
  std::string convention_header() const;

  // Heisenberg group.
  Fq omega(const Vec8& u, const Vec8& v) const;
  HeisElem heis_mul(const HeisElem& a, const HeisElem& b) const;
  HeisElem heis_act(const Mat8& g, const HeisElem& h) const;
  MonomialOp heisenberg_op(const HeisElem& h) const;
  std::vector<HeisElem> heisenberg_generators() const;

  // V (x) E matrices.
  Mat8 tensor(const SpMat& g, int t) const;
  Mat8 mat8_mul(const Mat8& a, const Mat8& b) const;
  Fq det8(const Mat8& m) const;
  bool preserves_omega(const Mat8& m) const;

  // Monomial operators.
  /// g in U1: diagonal psi(s/2 <v,v>_{g (x) 1}).
  MonomialOp unip_op(const SpMat& g) const;
  /// The diagonal operator of an arbitrary symmetric form on L'.
  MonomialOp unip_op_from_form(const BilForm3& form) const;
  /// g in M1, t in O(E): chi(det) f((g (x) t)^{-1} v).
  MonomialOp levi_op(const SpMat& g, int t) const;
  /// g in P1: unip_op(g m^{-1}) * levi_op(m, t) with m the Levi part.
  MonomialOp siegel_op(const SpMat& g, int t) const;
  /// Same operator as siegel_op, evaluated one point at a time.
  SiegelEvaluator siegel_evaluator(const SpMat& g, int t) const;
  /// g = u m with u in U1 and m in M1.
  std::pair<SpMat, SpMat> siegel_split(const SpMat& g) const;
  MonomialOp orth_op(int t) const { return levi_op(group_->identity(), t); }
  /// (Lambda f)(v) = f((1 (x) sigma) v).
  MonomialOp lambda_op() const;

  WeilOp sp_op(const SpMat& g, int t) const;
  /// Weil character at g (x) t: chi(det(g (x) t - 1)) when invertible, else the trace.
  CycNum eta(const SpMat& g, int t) const;
  /// The determinant fast path only; nullopt when g (x) t - 1 is singular.
  std::optional<int> eta_fast(const SpMat& g, int t) const;

  /// Solutions X of X pi(h) = pi(G h) X, G preserving the form.
  IntertwinerSolution solve_intertwiner(const Mat8& g) const;
  int commutant_dimension() const;

  std::shared_ptr<const DenseCore> s2_core() const;
  std::shared_ptr<const DenseCore> w2_core() const;
  /// Largest q for which dense cores are built.
  static constexpr int kDenseLimit = 5;

 private:
  friend class SiegelEvaluator;
  using LeviData = SiegelEvaluator::Levi;
  LeviData levi_data(const SpMat& g, int t) const;
  std::uint32_t levi_target(const LeviData& d, std::uint32_t x) const;
  int unip_exponent(const BilForm3& form, int bridge_sign, std::uint32_t x) const;
  MonomialOp heisenberg_op_with(const HeisElem& h, Fq a, Fq t, Fq b) const;
  MonomialOp unip_op_with(const BilForm3& form, int bridge_sign) const;
  void calibrate();
  void ensure_cores() const;
  std::uint64_t lagrangian_key(const SpMat& g) const;
  int rank_lower_left(const SpMat& g) const;

  std::shared_ptr<const SpGroup> group_;
  FuncSpace space_;
  Convention conv_;
  Mat8 omega_{};  // J (x) G_E

  mutable std::once_flag cores_once_;
  mutable std::shared_ptr<const DenseCore> s2_core_, w2_core_;
  mutable std::unordered_map<std::uint64_t, SpMat> bruhat_;  // Lagrangian p1 w L -> p1
};

}  // namespace theta10
