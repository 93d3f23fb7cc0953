#pragma once

// Deligne-Lusztig bookkeeping for the anisotropic torus T of order q^2 + 1.
// Virtual characters R_{T,theta} are never built; the facts used about them
// are named axioms, and every deduction step cites an axiom or a computed
// table.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "theta10/analysis.hpp"
#include "theta10/cyclo.hpp"

namespace theta10 {

/// theta(zeta^j) = omega^{k j} on T ~ Z/(q^2+1).
struct TorusChar {
  int k = 0;
  int n = 0;  // q^2 + 1
  bool regular = false;
};

struct WeylOrbitReport {
  int q = 0;
  int characters = 0;
  int regular = 0;
  std::vector<int> nonregular;             // exponents fixed by k -> q k
  std::vector<std::vector<int>> orbits;    // orbits of k -> q k, by least member
  bool frobenius_order_four = false;       // every regular orbit has size 4
  bool q4_acts_trivially = false;
};

WeylOrbitReport weyl_orbit_structure(int q);
std::vector<TorusChar> torus_characters(int q);

struct RtDimension {
  std::uint64_t group_order = 0;
  std::uint64_t u0_order = 0;
  std::uint64_t torus_order = 0;
  int eps_g = 1, eps_t = 1;
  long value = 0;
  long closed_form = 0;  // (q^2 - 1)^2
};

/// eps_G eps_T |G| / (|U0| |T|) for the anisotropic torus.
RtDimension rt_dimension(int q);

struct TorusRow {
  int j = 0;                   // s = t^j
  bool plus_minus_one = false;
  bool eigenvalues_distinct = false;
  bool no_eigenvalue_pm1 = false;
  std::vector<int> eta;         // eta(s, t) for t in O(E); 0 if the fast path was unavailable
  bool eta_pattern = false;     // +1 on SO(E), -1 off it
  CycNum theta10;
  bool pass() const;
};

struct TorusTable {
  int q = 0;
  std::vector<TorusRow> rows;  // all q^2 + 1 elements
  int regular_count = 0;
  bool all_pass = false;
};

TorusTable torus_values_check(const Analysis& analysis);

struct LedgerAxiom {
  std::string name;
  std::string statement;
};

const std::vector<LedgerAxiom>& ledger_axioms();
const LedgerAxiom& ledger_axiom(const std::string& name);

struct DeductionResult {
  bool unique = false;
  long m_trivial = 0;
  long m_mu = 0;
  std::string conclusion;
  nlohmann::ordered_json transcript = nlohmann::ordered_json::array();
};

/// Solves sum_theta theta(s) m_theta = theta10(s) over the regular elements of T.
DeductionResult unipotence_deduction(const TorusTable& table, long theta10_dim);

}  // namespace theta10
