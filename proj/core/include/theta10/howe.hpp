#pragma once

// Decomposition of W under O(E) = SO(E) x| <sigma>.  O(E) acts on W by the
// permutation operators orth_op(t), so every isotypic projector is a linear
// combination sum_t c_t orth_op(t); for the rational components (trivial and
// nu, split by Lambda) the coefficients c_t are rational and the components
// get explicit bases, built orbit by orbit.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "theta10/cyclo.hpp"
#include "theta10/sympgrp.hpp"
#include "theta10/weil.hpp"

namespace theta10 {

/// theta(t0^j) = omega^{k j} for a primitive (q+1)-th root of unity omega.
struct SOChar {
  int k = 0;
  int q = 0;
  int order() const { return q + 1; }
  bool is_trivial() const { return k % order() == 0; }
  bool is_nu() const { return 2 * (k % order()) == order(); }
  bool is_real() const { return is_trivial() || is_nu(); }
  SOChar inverse() const { return SOChar{(order() - k % order()) % order(), q}; }
  std::string name() const;
  static SOChar trivial(int q) { return SOChar{0, q}; }
  static SOChar nu(int q) { return SOChar{(q + 1) / 2, q}; }
};

/// Sparse rational vector on the function-space index set.
using SparseVec = std::vector<std::pair<std::uint32_t, Rat>>;

struct IsoComponent {
  std::string label;
  SOChar theta;
  int sign = 0;  // +1 / -1 for a Lambda eigenspace, 0 for the whole W_theta
  int dim = 0;
  /// Trace-formula coefficients over O(E): tr(rho(g)|_W') = sum_t c_t eta(g, t).
  /// For real theta this is also the projector; for complex theta it is the
  /// real part of the character and is present only when the cosines are rational.
  std::optional<std::vector<Rat>> coeffs;
  std::vector<SparseVec> basis;  // rational components only
};

struct DeltaBasis {
  std::vector<std::vector<std::int64_t>> functions;  // delta_i = 1_{O_i} - 1_{O'_i}
  std::vector<std::uint32_t> representatives;        // v_i = min O_i, the dual coordinate
  std::vector<OrbitPair> pairs;
};

struct GramResult {
  std::vector<std::string> labels;
  std::vector<std::vector<Rat>> gram;
  Rat weil_norm;  // <chi_W, chi_W>
  bool identity = false;
};

class HoweDecomposition {
 public:
  explicit HoweDecomposition(std::shared_ptr<const WeilEngine> engine);

  const WeilEngine& engine() const { return *engine_; }
  const DecomposableCensus& census() const { return census_; }
  int q() const { return engine_->q(); }

  /// W_theta.  Explicit basis when theta is real.
  IsoComponent isotypic_projector(SOChar theta) const;
  /// Lambda-eigenspaces of W_theta for theta in {1, nu}; throws std::invalid_argument otherwise.
  std::pair<IsoComponent, IsoComponent> split_pm(SOChar theta) const;
  /// dim W_theta from the cycle type of T = orth_op(t0): cycles of length l with (q+1) | k l.
  int cycle_dimension(SOChar theta) const;

  /// P f for a component with projector coefficients.
  std::vector<Rat> project(const IsoComponent& c, const std::vector<Rat>& f) const;

  /// Fixed points of orth_op(t) on the index set.
  std::uint32_t fixed_points(int t) const;
  /// trace(Lambda P) for projector coefficients c.
  Rat lambda_trace(const std::vector<Rat>& coeffs) const;
  Rat lambda_trace_w() const;

  DeltaBasis delta_basis() const;

  /// Character of a component at g: sum_t c_t eta(g, t).
  CycNum character(const IsoComponent& c, const SpMat& g) const;

  /// The five distinct components W1+, W1-, Wnu+, Wnu-, W_theta (k = 1) at q = 3;
  /// at general q, all components with rational coefficients.
  std::vector<IsoComponent> distinct_components() const;

  /// Gram matrix of the component characters over the classes.
  GramResult multiplicity_gram(const ClassPartition& classes, std::uint64_t group_order, int jobs = 1) const;

  nlohmann::ordered_json dimension_table() const;

 private:
  std::vector<Rat> real_coefficients(SOChar theta, int sign) const;
  std::vector<SparseVec> extract_basis(const std::vector<Rat>& coeffs) const;

  std::shared_ptr<const WeilEngine> engine_;
  DecomposableCensus census_;
  std::vector<std::vector<std::uint32_t>> orth_perm_;  // t -> (x -> target of orth_op(t))
};

/// Closed forms for the component dimensions.
struct DimensionFormulas {
  static long w1(int q) { return static_cast<long>(q) * (q * q - q + 1); }
  static long w1_plus(int q) { return static_cast<long>(q) * (q * q + 1) / 2; }
  static long w1_minus(int q) { return static_cast<long>(q) * (q - 1) * (q - 1) / 2; }
  static long wnu_pm(int q) { return static_cast<long>(q - 1) * (q * q + 1) / 2; }
  static long wtheta(int q) { return static_cast<long>(q - 1) * (q * q + 1); }
};

/// Inner product (1/|G|) sum_C |C| a(C) conj(b(C)).
CycNum class_inner_product(const std::vector<CycNum>& a, const std::vector<CycNum>& b,
                           const std::vector<std::uint64_t>& class_sizes, std::uint64_t group_order);

}  // namespace theta10
