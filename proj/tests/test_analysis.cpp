#include <gtest/gtest.h>

#include <random>

#include "common.hpp"

using namespace theta10;
namespace ts = testing_support;

namespace {

constexpr SubgroupLabel kRadicals[] = {SubgroupLabel::U0DoublePrime, SubgroupLabel::U0Prime, SubgroupLabel::U1,
                                        SubgroupLabel::U2, SubgroupLabel::U0};

}  // namespace

class Cuspidal : public ::testing::TestWithParam<int> {};

TEST_P(Cuspidal, NoFixedVectorsInRadicals) {
  const int q = GetParam();
  const auto& a = ts::analysis(q);
  const auto& g = ts::engine(q)->group();
  for (auto l : kRadicals) {
    const auto el = subgroup_elements(g, l).elements;
    EXPECT_EQ(a.fixed_subspace_delta(el), Rat(0)) << label_name(l);
    EXPECT_EQ(a.fixed_subspace(a.theta10_component(), el), Rat(0)) << label_name(l);
  }
}

TEST_P(Cuspidal, TrivialSubgroup) {
  const int q = GetParam();
  const auto& a = ts::analysis(q);
  const auto& g = ts::engine(q)->group();
  std::vector<Rat> whole(static_cast<std::size_t>(g.tower().orth().order()), Rat(0));
  whole[0] = 1;
  EXPECT_EQ(a.fixed_subspace(whole, {g.identity()}), Rat(q * q * q * q));
  EXPECT_EQ(a.fixed_subspace(a.theta10_component(), {g.identity()}), Rat(DimensionFormulas::w1_minus(q)));
}

INSTANTIATE_TEST_SUITE_P(OddQ, Cuspidal, ::testing::Values(3, 5, 7));

class Whittaker : public ::testing::TestWithParam<int> {};

TEST_P(Whittaker, AllMultiplicitiesVanish) {
  const int q = GetParam();
  const auto table = ts::analysis(q).whittaker_table();
  ASSERT_EQ(table.size(), static_cast<std::size_t>(q * q));
  int nondeg = 0;
  Rat total = 0;
  for (const auto& w : table) {
    EXPECT_EQ(w.nondegenerate, w.a != 0 && w.b != 0);
    nondeg += w.nondegenerate ? 1 : 0;
    EXPECT_EQ(w.multiplicity, Rat(0));
    total += w.multiplicity;
    if (w.a == 0 && w.b == 0) EXPECT_EQ(ts::analysis(q).whittaker_multiplicity(0, 0), Rat(0));
  }
  EXPECT_EQ(nondeg, (q - 1) * (q - 1));
  EXPECT_EQ(total, Rat(0));
}

INSTANTIATE_TEST_SUITE_P(OddQ, Whittaker, ::testing::Values(3, 5));

TEST(Character, ValuesAndNorms) {
  const auto& a = ts::analysis(3);
  const auto& g = ts::engine(3)->group();
  EXPECT_EQ(a.theta10(g.identity()), CycNum(3, 6L));
  const auto t = anisotropic_torus(g);
  for (const auto& s : t.elements)
    if (!(s == g.identity() || s == g.minus_identity())) EXPECT_TRUE(a.theta10(s).is_one());
  const auto row = a.theta10_character(ts::sp43_reps(), 2);
  EXPECT_EQ(norm_squared(row, ts::sp43_sizes(), 51840), Rat(1));
  CharRow w, one;
  for (const auto& r : ts::sp43_reps()) {
    w.values.push_back(ts::engine(3)->eta(r, 0));
    one.values.push_back(CycNum(3, 1L));
  }
  EXPECT_EQ(norm_squared(w, ts::sp43_sizes(), 51840), Rat(8));
  EXPECT_EQ(norm_squared(one, ts::sp43_sizes(), 51840), Rat(1));
}

TEST(Character, EtaRouteMatchesDeltaRoute) {
  const auto& a = ts::analysis(3);
  const auto& t = ts::sp43();
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> d(0, t.size() - 1);
  for (int i = 0; i < 20; ++i) {
    const SpMat& x = t.element(d(rng));
    EXPECT_EQ(a.theta10(x), a.delta_trace(x));
  }
}

TEST(Character, RowIndependentOfJobs) {
  const auto& a = ts::analysis(3);
  const auto reps = ts::sp43_reps();
  const auto r1 = a.theta10_character(reps, 1), r3 = a.theta10_character(reps, 3);
  EXPECT_EQ(r1.values, r3.values);
}

TEST(U1, DecompositionAtThree) {
  const auto u = ts::analysis(3).u1_decomposition();
  EXPECT_EQ(u.d, 6);
  EXPECT_TRUE(u.invariant_lines);
  EXPECT_TRUE(u.distinct);
  EXPECT_TRUE(u.single_m1_orbit);
  EXPECT_EQ(u.characters.size(), 6u);
}

TEST(U1, DecompositionAtFive) {
  const auto u = ts::analysis(5).u1_decomposition();
  EXPECT_EQ(u.d, 40);
  EXPECT_TRUE(u.invariant_lines && u.distinct && u.single_m1_orbit);
}

TEST(LittleGroups, AtThree) {
  const auto r = ts::analysis(3).little_groups_check();
  EXPECT_EQ(r.p1_order, 1296u);
  EXPECT_EQ(r.stabilizer_order, 8u);
  EXPECT_EQ(r.h_order, 216u);
  EXPECT_EQ(r.index, 6u);
  EXPECT_TRUE(r.dihedral);
  EXPECT_TRUE(r.epsilon_homomorphism);
  EXPECT_TRUE(r.match());
  EXPECT_EQ(r.induced_at_identity, CycNum(3, 6L));
  EXPECT_EQ(r.norm, Rat(1));
}

TEST(Analysis, U0Coordinates) {
  const auto& g = ts::engine(5)->group();
  for (int l = 0; l < 5; ++l)
    for (int al = 0; al < 5; ++al) {
      const auto [alpha, lambda] = Analysis::u0_coordinates(u0_element(g, static_cast<Fq>(l), static_cast<Fq>(al), 2, 3));
      EXPECT_EQ(alpha, al);
      EXPECT_EQ(lambda, l);
    }
}
