#include <gtest/gtest.h>

#include <set>

#include "common.hpp"
#include "theta10/dlledger.hpp"

using namespace theta10;
namespace ts = testing_support;

TEST(Weyl, OrbitStructure) {
  const auto w3 = weyl_orbit_structure(3);
  EXPECT_EQ(w3.characters, 10);
  EXPECT_EQ(w3.regular, 8);
  EXPECT_EQ(w3.nonregular, (std::vector<int>{0, 5}));
  const auto w5 = weyl_orbit_structure(5);
  EXPECT_EQ(w5.characters, 26);
  EXPECT_EQ(w5.regular, 24);
  for (int q : {3, 5, 7}) {
    const auto w = weyl_orbit_structure(q);
    EXPECT_TRUE(w.frobenius_order_four);
    EXPECT_TRUE(w.q4_acts_trivially);
    const long n = static_cast<long>(q) * q + 1;
    for (long k = 0; k < n; ++k) EXPECT_EQ(static_cast<long>(q) * q % n * q % n * q % n * k % n, k);
    for (const auto& c : torus_characters(q)) EXPECT_EQ(c.regular, (static_cast<long>(q) * c.k) % n != c.k);
  }
}

TEST(RtDimension, ClosedFormAndMismatch) {
  for (int q : {3, 5, 7}) {
    const auto r = rt_dimension(q);
    const long q2 = static_cast<long>(q) * q;
    // |G| / (|U0| |T|) computed from the order formula.
    const long g = q2 * q2 * (q2 - 1) * (q2 * q2 - 1);
    EXPECT_EQ(r.value, g / (q2 * q2 * (q2 + 1)));
    EXPECT_EQ(r.value, r.closed_form);
    EXPECT_EQ(r.value, (q2 - 1) * (q2 - 1));
    EXPECT_NE(r.value, DimensionFormulas::w1_minus(q));
    EXPECT_EQ(r.eps_g * r.eps_t, 1);
  }
  EXPECT_EQ(rt_dimension(3).value, 64);
  EXPECT_EQ(rt_dimension(5).value, 576);
}

class Torus : public ::testing::TestWithParam<int> {};

TEST_P(Torus, ValuesOnRegularElements) {
  const int q = GetParam();
  const auto t = torus_values_check(ts::analysis(q));
  ASSERT_EQ(t.rows.size(), static_cast<std::size_t>(q * q + 1));
  EXPECT_EQ(t.regular_count, q * q - 1);
  EXPECT_TRUE(t.all_pass);
  int flagged = 0;
  for (const auto& r : t.rows) {
    if (r.plus_minus_one) {
      ++flagged;
      EXPECT_FALSE(r.eigenvalues_distinct);
      continue;
    }
    EXPECT_TRUE(r.eigenvalues_distinct);
    EXPECT_TRUE(r.no_eigenvalue_pm1);
    EXPECT_TRUE(r.theta10.is_one());
    int plus = 0, minus = 0;
    for (int v : r.eta) (v == 1 ? plus : minus) += 1;
    EXPECT_EQ(plus, q + 1);
    EXPECT_EQ(minus, q + 1);
    EXPECT_TRUE(r.pass());
  }
  EXPECT_EQ(flagged, 2);
}

INSTANTIATE_TEST_SUITE_P(OddQ, Torus, ::testing::Values(3, 5, 7));

TEST(Deduction, UniqueUnipotentVerdict) {
  for (int q : {3, 5}) {
    const auto t = torus_values_check(ts::analysis(q));
    const auto d = unipotence_deduction(t, DimensionFormulas::w1_minus(q));
    EXPECT_TRUE(d.unique);
    EXPECT_EQ(d.m_trivial, 1);
    EXPECT_EQ(d.m_mu, 0);
    EXPECT_NE(d.conclusion.find("unipotent"), std::string::npos);
  }
}

TEST(Deduction, EveryStepJustified) {
  const auto t = torus_values_check(ts::analysis(3));
  const auto d = unipotence_deduction(t, 6);
  std::set<std::string> axioms;
  for (const auto& a : ledger_axioms()) axioms.insert(a.name);
  EXPECT_EQ(axioms, (std::set<std::string>{"strong_orthogonality", "regular_implies_irreducible", "rt_dimension",
                                           "rss_specialization"}));
  std::set<std::string> cited;
  ASSERT_TRUE(d.transcript.is_array());
  for (const auto& s : d.transcript) {
    const std::string kind = s["justification"]["kind"];
    const std::string name = s["justification"]["name"];
    EXPECT_TRUE(kind == "axiom" || kind == "computation");
    if (kind == "axiom") {
      EXPECT_TRUE(axioms.count(name)) << name;
      cited.insert(name);
    }
    EXPECT_FALSE(s["claim"].get<std::string>().empty());
  }
  EXPECT_EQ(cited, axioms);
  EXPECT_THROW(ledger_axiom("no_such_axiom"), std::invalid_argument);
}

TEST(Deduction, MuAloneInfeasible) {
  // mu(t^j) = (-1)^j takes both signs on the regular exponents.
  const auto t = torus_values_check(ts::analysis(3));
  std::set<int> signs;
  for (const auto& r : t.rows)
    if (!r.plus_minus_one) signs.insert(r.j % 2 == 0 ? 1 : -1);
  EXPECT_EQ(signs.size(), 2u);
  const auto d = unipotence_deduction(t, 6);
  bool found = false;
  for (const auto& s : d.transcript) {
    if (!s["data"].contains("cases")) continue;
    for (const auto& c : s["data"]["cases"])
      if (c["support"] == "{mu}") {
        found = true;
        EXPECT_FALSE(c["feasible"].get<bool>());
      } else if (c["support"] == "{1}") {
        EXPECT_TRUE(c["feasible"].get<bool>());
      }
  }
  EXPECT_TRUE(found);
}

TEST(Deduction, FailsOnWrongValues) {
  auto t = torus_values_check(ts::analysis(3));
  for (auto& r : t.rows)
    if (!r.plus_minus_one && r.j % 2 == 1) r.theta10 = CycNum(3, 2L);
  const auto d = unipotence_deduction(t, 6);
  EXPECT_FALSE(d.unique);
}
