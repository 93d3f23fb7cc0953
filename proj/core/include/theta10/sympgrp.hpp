#pragma once

// Sp(V) for V = F_q^4 with basis (v1, v2, v3, v4) and Gram matrix
//
//     0  0  0  1
//     0  0  1  0
//     0 -1  0  0
//    -1  0  0  0
//
// L = span(v1, v2), L' = span(v3, v4), L1 = span(v1).  Matrices act on
// column vectors.  V (x) E is handled in coordinates c[2*i + a] for the
// vector v_{i+1} (x) e_{a+1}; the L' (x) E block therefore sits in c[4..7]
// and is read as (x3, x4) in E x E.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "theta10/gftower.hpp"

namespace theta10 {

using Vec4 = std::array<Fq, 4>;
using Vec8 = std::array<Fq, 8>;

struct SpMat {
  std::array<Fq, 16> e{};  // row-major
  Fq at(int i, int j) const { return e[static_cast<std::size_t>(4 * i + j)]; }
  Fq& at(int i, int j) { return e[static_cast<std::size_t>(4 * i + j)]; }
  friend bool operator==(const SpMat&, const SpMat&) = default;
};

enum class Root { R1, R2, R3, R4, NegR1, NegR2, NegR3, NegR4 };

enum class SubgroupLabel { B0, U0, P1, U1, M1, P2, U2, U0Prime, U0DoublePrime, T0, TAniso, OLittle };

std::string label_name(SubgroupLabel l);
std::optional<SubgroupLabel> label_from_name(const std::string& name);

struct SubgroupSpec {
  SubgroupLabel label;
  std::vector<SpMat> elements;
};

/// Symmetric bilinear form on L' in the basis (v3, v4).
struct BilForm3 {
  Fq a33 = 0, a34 = 0, a44 = 0;
  friend bool operator==(const BilForm3&, const BilForm3&) = default;
};

/// A point of V (x) E.  Two readings: (w1, w2) in V x V meaning
/// w1 (x) e1 + w2 (x) e2, and, for points of L' (x) E, (x3, x4) in E x E
/// meaning v3 (x) x3 + v4 (x) x4.
struct TensorPoint {
  Vec8 c{};

  static TensorPoint from_vectors(const Vec4& w1, const Vec4& w2);
  std::pair<Vec4, Vec4> vectors() const;
  static TensorPoint from_lagrangian(const QuadSpace& e, EIdx x3, EIdx x4);
  bool in_lagrangian_dual() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
  std::pair<EIdx, EIdx> lagrangian_coords(const QuadSpace& e) const;
  friend bool operator==(const TensorPoint&, const TensorPoint&) = default;
};

/// Group context: the field, J, and matrix arithmetic.
class SpGroup {
 public:
  explicit SpGroup(std::shared_ptr<const FieldTower> tower);

  const FieldTower& tower() const { return *tower_; }
  std::shared_ptr<const FieldTower> tower_ptr() const { return tower_; }
  const FiniteField& field() const { return tower_->base(); }
  int q() const { return tower_->q(); }

  SpMat identity() const;
  SpMat minus_identity() const;
  const SpMat& gram() const { return gram_; }
  /// Validating constructor: throws StructuralError unless g^T J g = J.
  SpMat make(const std::array<Fq, 16>& entries) const;
  SpMat make_from_ints(const std::array<long, 16>& entries) const;

  bool is_symplectic(const SpMat& g) const;
  SpMat mul(const SpMat& a, const SpMat& b) const;
  SpMat inv(const SpMat& g) const;  // J^{-1} g^T J
  SpMat transpose(const SpMat& g) const;
  Vec4 apply(const SpMat& g, const Vec4& v) const;
  /// (g (x) 1) on V (x) E.
  Vec8 apply_tensor(const SpMat& g, const Vec8& u) const;
  /// <v, w>_V.
  Fq form(const Vec4& v, const Vec4& w) const;
  Fq det(const SpMat& g) const;
  /// det(g - lambda) for lambda in F_q.
  Fq det_shift(const SpMat& g, Fq lambda) const;
  std::uint64_t order_of(const SpMat& g) const;

  std::uint64_t key(const SpMat& g) const;
  SpMat from_key(std::uint64_t k) const;

  SpMat s1() const;
  SpMat s2() const;
  /// s2 s1 s2: sends L onto L'.
  SpMat w_long() const;

  /// |Sp(4, q)| = q^4 (q^2 - 1)(q^4 - 1).
  std::uint64_t order() const;

 private:
  std::shared_ptr<const FieldTower> tower_;
  SpMat gram_;
};

/// Matrix of the form on V.
std::array<std::array<int, 4>, 4> gram_matrix();

SpMat root_subgroup(const SpGroup& g, Root r, Fq param);
std::string root_name(Root r);

/// The U0 element with parameters (lambda, alpha, mu, beta).
SpMat u0_element(const SpGroup& g, Fq lambda, Fq alpha, Fq mu, Fq beta);
SpMat t0_element(const SpGroup& g, Fq a, Fq b);
/// The Levi element diag(A, K A^{-T} K) for A in GL(2, q) (row-major).
SpMat m1_element(const SpGroup& g, const std::array<Fq, 4>& a);

SubgroupSpec subgroup_elements(const SpGroup& g, SubgroupLabel label);
std::vector<SpMat> root_subgroup_elements(const SpGroup& g, Root r);

/// True when g - 1 vanishes on L and maps V into L.
bool in_u1(const SpGroup& g, const SpMat& m);
/// True when g stabilizes L (the Siegel parabolic P1).
bool in_p1(const SpGroup& g, const SpMat& m);

/// <x, y>_g = <(g - 1) x, y>_V on L'.  Throws StructuralError if g is not in U1.
BilForm3 u1_bilinear_bridge(const SpGroup& g, const SpMat& m);
SpMat u1_from_form(const SpGroup& g, const BilForm3& f);

/// Sp(4, q) generators in a fixed order: root elements, torus, s1, s2.
std::vector<SpMat> standard_generators(const SpGroup& g);
std::vector<SpMat> p1_generators(const SpGroup& g);
std::vector<SpMat> b0_generators(const SpGroup& g);

/// A group enumerated by BFS over right multiplication by generators.
class GroupTable {
 public:
  std::size_t size() const { return elems_.size(); }
  const SpMat& element(std::size_t i) const { return elems_[i]; }
  const std::vector<SpMat>& elements() const { return elems_; }
  const std::vector<SpMat>& generators() const { return gens_; }
  std::optional<std::uint32_t> find(const SpGroup& g, const SpMat& m) const;
  bool contains(const SpGroup& g, const SpMat& m) const { return find(g, m).has_value(); }
  /// Generator indices whose product (left to right) is element i.
  std::vector<int> word(std::size_t i) const;

 private:
  friend GroupTable generate_group(const SpGroup&, const std::vector<SpMat>&, std::size_t);
  std::vector<SpMat> gens_;
  std::vector<SpMat> elems_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::int8_t> via_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

/// Closure of the generators; throws std::length_error past max_elements.
GroupTable generate_group(const SpGroup& g, const std::vector<SpMat>& generators,
                          std::size_t max_elements = 20'000'000);

struct ClassRecord {
  SpMat representative;
  std::uint64_t size = 0;
  std::vector<int> word;
  std::uint32_t rep_index = 0;
};

struct ClassPartition {
  std::vector<ClassRecord> classes;
  std::vector<std::uint32_t> class_of;  // element index -> class id
};

/// Conjugation orbits, found by closing each unassigned element under
/// conjugation by the table's generators.
ClassPartition conjugacy_classes(const SpGroup& g, const GroupTable& table);

struct AnisotropicTorus {
  SpMat generator;                 // eigenvalues zeta, zeta^q, zeta^{-1}, zeta^{-q}
  std::vector<SpMat> elements;     // generator^j, j = 0 .. q^2
  GFElem zeta;
  std::vector<Fq> minimal_polynomial;  // of zeta over F_q, low degree first
  SpMat companion;                 // companion matrix of the minimal polynomial
  SpMat basis_change;              // P with P^{-1} C P = generator
  std::array<Fq, 16> invariant_form{};  // skew form preserved by the companion matrix
};

AnisotropicTorus anisotropic_torus(const SpGroup& g);

/// Number of Sp(V)-orbits on V (x) E under g (x) 1, via union-find.
std::uint64_t orbit_count_tensor(const SpGroup& g);

/// Function-space index of a point of L' (x) E: x3 + q^2 x4.
inline std::uint32_t lagrangian_index(int q, EIdx x3, EIdx x4) {
  return static_cast<std::uint32_t>(x3) + static_cast<std::uint32_t>(q * q) * x4;
}

struct OrbitPair {
  std::vector<std::uint32_t> first;   // SO(E)-orbit containing the smaller index
  std::vector<std::uint32_t> second;  // its image under 1 (x) sigma
};

struct DecomposableCensus {
  std::uint64_t decomposable = 0;          // |S|, zero included
  std::uint64_t nonzero_decomposable = 0;
  std::uint64_t indecomposable = 0;        // |S'|
  std::uint64_t s_orbits = 0;              // |S / SO(E)|
  std::uint64_t s_prime_orbits = 0;        // |S' / SO(E)|
  std::uint64_t self_conjugate_orbits = 0;
  std::vector<OrbitPair> pairs;            // ordered by smallest index
  std::vector<bool> is_decomposable;       // indexed by function-space index
};

DecomposableCensus decomposable_census(const SpGroup& g);

/// The stabilizer in M1 of the O(E)-orbit first u second of pair 0.
std::vector<SpMat> little_stabilizer(const SpGroup& g, const DecomposableCensus& census);

/// L' (x) E coordinates of (g (x) 1) applied to the point with index x.
std::uint32_t act_on_lagrangian(const SpGroup& g, const SpMat& m, std::uint32_t x);

}  // namespace theta10
