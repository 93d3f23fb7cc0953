#pragma once

// Verdicts on theta10 = W_1^-: fixed vectors of unipotent radicals,
// Whittaker multiplicities, the character and its norm, the U1-isotypic
// decomposition, and the little-groups description of the restriction to P1.
//
// Traces on W_1^- are taken two ways.  The delta route reads the coefficient
// of delta_i in rho(g) delta_i at the point v_i; the eta route averages the
// Weil character over O(E) with the sign character.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "theta10/cyclo.hpp"
#include "theta10/howe.hpp"
#include "theta10/sympgrp.hpp"
#include "theta10/weil.hpp"

namespace theta10 {

/// Character values on a list of elements or class representatives.
struct CharRow {
  std::vector<CycNum> values;
};

struct WhittakerEntry {
  Fq a = 0, b = 0;
  bool nondegenerate = false;
  Rat multiplicity;
};

struct U1Decomposition {
  int d = 0;
  bool invariant_lines = false;  // rho(g) delta_i = phi_i(g) delta_i for all g in U1
  bool distinct = false;
  bool single_m1_orbit = false;
  std::vector<std::vector<std::uint8_t>> characters;  // phi_i(g_k) = z^{characters[i][k]}
};

struct LittleGroupsReport {
  std::uint64_t p1_order = 0;
  std::uint64_t stabilizer_order = 0;
  std::uint64_t h_order = 0;  // |O U1|
  std::uint64_t index = 0;
  bool dihedral = false;
  bool epsilon_homomorphism = false;
  std::size_t classes = 0;
  std::size_t matching_classes = 0;
  CycNum induced_at_identity;
  Rat norm;
  bool match() const { return classes > 0 && matching_classes == classes; }
};

class Analysis {
 public:
  explicit Analysis(std::shared_ptr<const HoweDecomposition> howe);

  const HoweDecomposition& howe() const { return *howe_; }
  const WeilEngine& engine() const { return howe_->engine(); }
  const DeltaBasis& delta() const { return delta_; }
  const IsoComponent& theta10_component() const { return w1_minus_; }

  /// tr(rho(g)|_{W_1^-}) from the delta basis.
  CycNum delta_trace(const SpMat& g) const;
  /// theta10(g) = (1/(2q+2)) sum_t eps(t) eta(g, t).
  CycNum theta10(const SpMat& g) const;
  CharRow theta10_character(const std::vector<SpMat>& elements, int jobs = 1) const;

  /// (1/|H|) sum_h sum_t c_t eta(h, t): the dimension of the H-fixed vectors
  /// in the component with trace coefficients c.
  Rat fixed_subspace(const std::vector<Rat>& coeffs, const std::vector<SpMat>& subgroup, int jobs = 1) const;
  Rat fixed_subspace(const IsoComponent& c, const std::vector<SpMat>& subgroup, int jobs = 1) const;
  /// The same for W_1^- through delta traces; subgroup must lie in P1.
  Rat fixed_subspace_delta(const std::vector<SpMat>& subgroup) const;

  /// Multiplicity of xi_{a,b}(u) = psi(a alpha + b lambda) in W_1^-|_{U0}.
  Rat whittaker_multiplicity(Fq a, Fq b) const;
  std::vector<WhittakerEntry> whittaker_table() const;
  /// Abelianization coordinates (alpha, lambda) of a U0 element.
  static std::pair<Fq, Fq> u0_coordinates(const SpMat& u) { return {u.at(2, 3), u.at(1, 2)}; }

  U1Decomposition u1_decomposition() const;
  LittleGroupsReport little_groups_check() const;

 private:
  std::vector<CycNum> u0_trace_sums() const;  // S(alpha, lambda), index alpha + q lambda

  std::shared_ptr<const HoweDecomposition> howe_;
  DeltaBasis delta_;
  IsoComponent w1_minus_;
  std::vector<std::uint32_t> pair_of_point_;  // point -> pair index, or UINT32_MAX
};

/// (1/|G|) sum_C |C| |chi(C)|^2.
Rat norm_squared(const CharRow& chi, const std::vector<std::uint64_t>& class_sizes, std::uint64_t group_order);

}  // namespace theta10
