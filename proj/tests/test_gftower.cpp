#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "theta10/gftower.hpp"

using namespace theta10;

namespace {

class Tower : public ::testing::TestWithParam<int> {
 protected:
  std::shared_ptr<const FieldTower> t = FieldTower::create(GetParam());
};

}  // namespace

TEST_P(Tower, NormFormAnisotropic) {
  const auto& e = t->e_space();
  for (int x = 0; x < e.size(); ++x) {
    const auto xi = static_cast<EIdx>(x);
    EXPECT_EQ(e.form(xi, xi) == 0, x == 0);
  }
  EXPECT_EQ(e.form(1, 1), 1);
}

TEST_P(Tower, NormFormSymmetricAndNondegenerate) {
  const auto& e = t->e_space();
  const auto& f = t->base();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(0, e.size() - 1);
  for (int i = 0; i < 50; ++i) {
    const auto x = static_cast<EIdx>(d(rng)), y = static_cast<EIdx>(d(rng));
    EXPECT_EQ(e.form(x, y), e.form(y, x));
  }
  const EIdx e1 = e.from_coords(1, 0), e2 = e.from_coords(0, 1);
  const Fq det = f.sub(f.mul(e.form(e1, e1), e.form(e2, e2)), f.mul(e.form(e1, e2), e.form(e2, e1)));
  EXPECT_NE(det, 0);
}

TEST_P(Tower, OrthogonalGroup) {
  const int q = GetParam();
  const auto& o = t->orth();
  const auto& e = t->e_space();
  ASSERT_EQ(o.order(), 2 * (q + 1));
  ASSERT_EQ(o.so_order(), q + 1);
  for (int k = 0; k < o.order(); ++k)
    for (int x = 0; x < e.size(); ++x)
      EXPECT_EQ(e.norm(o.apply(k, static_cast<EIdx>(x))), e.norm(static_cast<EIdx>(x)));
  // The distinguished generator has order q + 1, so SO(E) is cyclic.
  int k = o.generator(), ord = 1;
  while (k != o.identity()) { k = o.mul(k, o.generator()); ++ord; }
  EXPECT_EQ(ord, q + 1);
  std::set<EIdx> units;
  for (int r = 0; r < o.so_order(); ++r) units.insert(o.rotation_unit(r));
  EXPECT_EQ(static_cast<int>(units.size()), q + 1);
  EXPECT_TRUE(units.count(e.embed(1)));
  EXPECT_TRUE(units.count(e.embed(t->base().neg(1))));
}

TEST_P(Tower, SigmaInvolutionWithFixedFieldFq) {
  const auto& e = t->e_space();
  int fixed = 0;
  for (int x = 0; x < e.size(); ++x) {
    const auto xi = static_cast<EIdx>(x);
    EXPECT_EQ(e.sigma(e.sigma(xi)), xi);
    fixed += e.sigma(xi) == xi ? 1 : 0;
  }
  EXPECT_EQ(fixed, GetParam());
}

TEST_P(Tower, SigmaHasDeterminantMinusOne) {
  const auto& f = t->base();
  const auto& m = t->orth().matrix(t->orth().sigma());
  EXPECT_EQ(f.sub(f.mul(m.at(0, 0), m.at(1, 1)), f.mul(m.at(0, 1), m.at(1, 0))), f.neg(1));
  const auto& r = t->orth().matrix(t->orth().generator());
  EXPECT_EQ(f.sub(f.mul(r.at(0, 0), r.at(1, 1)), f.mul(r.at(0, 1), r.at(1, 0))), 1);
}

TEST_P(Tower, TorusEigenvalue) {
  const int q = GetParam();
  const GFElem k = t->kappa();
  const GFElem zeta = k.pow(static_cast<long>(q) * q - 1);
  EXPECT_EQ(zeta.order(), static_cast<std::uint64_t>(q * q + 1));
  EXPECT_EQ(zeta.frobenius(2), zeta.inverse());
}

TEST_P(Tower, SubfieldMembership) {
  const auto& f = t->base();
  for (int a = 0; a < f.q(); ++a) EXPECT_TRUE(t->in_level(f.code(static_cast<Fq>(a)), 1));
  const auto& e = t->e_space();
  for (int x = 0; x < e.size(); ++x) EXPECT_TRUE(t->in_level(e.code(static_cast<EIdx>(x)), 2));
  EXPECT_FALSE(t->in_level(t->generator_code(), 2));
}

TEST_P(Tower, FqArithmetic) {
  const auto& f = t->base();
  for (int a = 1; a < f.q(); ++a) {
    EXPECT_EQ(f.mul(static_cast<Fq>(a), f.inv(static_cast<Fq>(a))), 1);
    EXPECT_EQ(f.pow(static_cast<Fq>(a), f.q() - 1), 1);
  }
  int squares = 0;
  for (int a = 1; a < f.q(); ++a) squares += f.chi(static_cast<Fq>(a)) == 1 ? 1 : 0;
  EXPECT_EQ(squares, (f.q() - 1) / 2);
}

INSTANTIATE_TEST_SUITE_P(OddQ, Tower, ::testing::Values(3, 5, 7, 9));

TEST(TowerPrime, QuadraticCharacterMatchesEuler) {
  for (int p : {3, 5, 7, 11, 13}) {
    const auto t = FieldTower::create(p);
    for (int a = 0; a < p; ++a) EXPECT_EQ(t->base().chi(static_cast<Fq>(a)), oracle::legendre(a, p));
  }
}

TEST(TowerPrime, SoSizes) {
  EXPECT_EQ(FieldTower::create(3)->orth().so_order(), 4);
  EXPECT_EQ(FieldTower::create(5)->orth().so_order(), 6);
}

TEST(TowerPrime, RejectsBadQ) {
  EXPECT_THROW(FieldTower::create(4), std::invalid_argument);
  EXPECT_THROW(FieldTower::create(15), std::invalid_argument);
  EXPECT_THROW(FieldTower::create(2), std::invalid_argument);
}

TEST(TowerFree, NamedFreeOperations) {
  for (int q : {3, 5}) {
    const auto t = FieldTower::create(q);
    const auto so = so_e_elements(*t);
    EXPECT_EQ(static_cast<int>(so.elements.size()), q + 1);
    EXPECT_EQ(norm_form(*t, 1, 1), 1);
    EXPECT_EQ(t->e_space().norm(so.generator), 1);
    const GFElem zeta = torus_eigenvalue(*t);
    EXPECT_EQ(zeta.order(), static_cast<std::uint64_t>(q * q + 1));
    const auto mp = minimal_polynomial(*t, zeta.code());
    EXPECT_EQ(mp.size(), 5u);  // degree 4, monic
    for (int x = 0; x < t->e_space().size(); ++x)
      EXPECT_EQ(sigma(*t, static_cast<EIdx>(x)), t->e_space().sigma(static_cast<EIdx>(x)));
  }
}
