#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "oracles.hpp"

using namespace theta10;
namespace ts = testing_support;

namespace {

SpMat random_word(const SpGroup& g, const std::vector<SpMat>& gens, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, gens.size() - 1);
  SpMat m = g.identity();
  for (int i = 0; i < 24; ++i) m = g.mul(m, gens[d(rng)]);
  return m;
}

HeisElem random_heis(int q, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, q - 1);
  HeisElem h;
  for (auto& c : h.u) c = static_cast<Fq>(d(rng));
  h.z = static_cast<Fq>(d(rng));
  return h;
}

oracle::IMat tensor_minus_one(const WeilEngine& e, const SpMat& g, int t) {
  const Mat8 m = e.tensor(g, t);
  oracle::IMat r(8, std::vector<long>(8));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m[static_cast<std::size_t>(8 * i + j)] - (i == j ? 1 : 0);
  return r;
}

}  // namespace

TEST(Heisenberg, CentreActsByPsi) {
  const auto& e = *ts::engine(3);
  for (int z = 0; z < 3; ++z) {
    HeisElem h;
    h.z = static_cast<Fq>(z);
    const MonomialOp op = e.heisenberg_op(h);
    for (std::uint32_t x = 0; x < 81; ++x) {
      EXPECT_EQ(op.target(x), x);
      EXPECT_EQ(op.mult(x).e, z);
      EXPECT_EQ(op.mult(x).sign, 1);
    }
  }
}

TEST(Heisenberg, GroupLawOracle) {
  const auto& e = *ts::engine(3);
  std::mt19937_64 rng(2);
  const auto& f = e.field();
  for (int i = 0; i < 200; ++i) {
    const HeisElem a = random_heis(3, rng), b = random_heis(3, rng);
    // (u, z)(u', z') = (u + u', z + z' + <u, u'>/2)
    HeisElem c;
    for (int k = 0; k < 8; ++k) c.u[static_cast<std::size_t>(k)] = f.add(a.u[static_cast<std::size_t>(k)], b.u[static_cast<std::size_t>(k)]);
    c.z = f.add(f.add(a.z, b.z), f.mul(f.half(), e.omega(a.u, b.u)));
    ASSERT_EQ(e.heis_mul(a, b), c);
    ASSERT_EQ(e.heisenberg_op(a) * e.heisenberg_op(b), e.heisenberg_op(c));
  }
}

TEST(Heisenberg, StoneVonNeumann) {
  EXPECT_EQ(ts::engine(3)->commutant_dimension(), 1);
  EXPECT_EQ(ts::engine(5)->commutant_dimension(), 1);
  EXPECT_GT(ts::engine(3)->convention().passing_combinations, 0);
}

TEST(Monomial, UnipotentOperators) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  EXPECT_TRUE(e.unip_op(g.identity()).is_identity());
  const auto z = subgroup_elements(g, SubgroupLabel::U0DoublePrime).elements;
  for (const auto& a : z)
    for (const auto& b : z) EXPECT_EQ(e.unip_op(a) * e.unip_op(b), e.unip_op(g.mul(a, b)));
  // On (L1^perp / L) (x) E, i.e. points with x4 = 0, the U0'' diagonal is 1.
  const auto& sp = e.space();
  for (const auto& a : z) {
    const MonomialOp op = e.unip_op(a);
    EXPECT_TRUE(op.is_diagonal());
    for (std::uint32_t x = 0; x < 81; ++x)
      if (sp.x4(x) == 0) EXPECT_EQ(op.mult(x), Phase{});
  }
}

TEST(Monomial, LeviOperators) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  const auto& o = g.tower().orth();
  for (int t = 0; t < o.so_order(); ++t) {
    const MonomialOp op = e.levi_op(g.identity(), t);
    for (std::uint32_t x = 0; x < 81; ++x) EXPECT_EQ(op.mult(x), Phase{});
  }
  // det of diag(A, ...) on L' a non-square: scalar still 1.
  const SpMat m = m1_element(g, {2, 0, 0, 1});
  const MonomialOp op = e.levi_op(m, 0);
  for (std::uint32_t x = 0; x < 81; ++x) EXPECT_EQ(op.mult(x), Phase{});
  const MonomialOp s1 = e.levi_op(g.s1(), 0);
  for (std::uint32_t x = 0; x < 81; ++x) EXPECT_EQ(s1.mult(x), Phase{});
  EXPECT_FALSE(s1.is_identity());
  EXPECT_TRUE((s1 * s1).is_identity());
}

TEST(Monomial, LambdaTraces) {
  for (int q : {3, 5, 7}) EXPECT_EQ(ts::engine(q)->lambda_op().trace(), CycNum(ts::engine(q)->p(), static_cast<long>(q * q)));
}

TEST(SpOp, IdentityAndEtaAtOne) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  EXPECT_EQ(e.sp_op(g.identity(), 0), WeilOp(MonomialOp::identity(3, 81)));
  EXPECT_EQ(e.eta(g.identity(), 0), CycNum(3, 81L));
}

TEST(SpOp, HomomorphismOnRandomPairs) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  const auto gens = standard_generators(g);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const SpMat a = random_word(g, gens, rng), b = random_word(g, gens, rng);
    ASSERT_EQ(e.sp_op(a, 0) * e.sp_op(b, 0), e.sp_op(g.mul(a, b), 0)) << "pair " << i;
  }
}

TEST(SpOp, HomomorphismWithOrthogonalFactor) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  const auto& o = g.tower().orth();
  const auto gens = standard_generators(g);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> pick(0, o.order() - 1);
  for (int i = 0; i < 20; ++i) {
    const SpMat a = random_word(g, gens, rng), b = random_word(g, gens, rng);
    const int s = pick(rng), t = pick(rng);
    ASSERT_EQ(e.sp_op(a, s) * e.sp_op(b, t), e.sp_op(g.mul(a, b), o.mul(s, t)));
  }
}

TEST(SpOp, Intertwining) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  const auto gens = standard_generators(g);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const SpMat a = random_word(g, gens, rng);
    const HeisElem h = random_heis(3, rng);
    const WeilOp rho = e.sp_op(a, 0);
    ASSERT_EQ(rho * WeilOp(e.heisenberg_op(h)), WeilOp(e.heisenberg_op(e.heis_act(e.tensor(a, 0), h))) * rho);
  }
}

TEST(SpOp, TraceFormulaAgainstDeterminantOracle) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  const auto gens = standard_generators(g);
  std::mt19937_64 rng(10);
  int samples = 0;
  while (samples < 100) {
    const SpMat a = random_word(g, gens, rng);
    const long d = oracle::det_mod(tensor_minus_one(e, a, 0), 3);
    if (d == 0) {
      EXPECT_FALSE(e.eta_fast(a, 0).has_value());
      continue;
    }
    ++samples;
    ASSERT_EQ(e.eta_fast(a, 0), oracle::legendre(d, 3));
    ASSERT_EQ(e.sp_op(a, 0).trace(), CycNum(3, static_cast<long>(oracle::legendre(d, 3))));
  }
}

TEST(SpOp, MonomialDenseConsistency) {
  const auto& e = *ts::engine(3);
  const auto& g = e.group();
  std::mt19937_64 rng(12);
  const auto p1 = p1_generators(g);
  for (int i = 0; i < 5; ++i) {
    const WeilOp a(e.siegel_op(random_word(g, p1, rng), 0)), b(e.siegel_op(random_word(g, p1, rng), 0));
    EXPECT_EQ(WeilOp(a.to_dense()) * WeilOp(b.to_dense()), a * b);
    EXPECT_EQ(WeilOp(a.to_dense()), a);
  }
}

TEST(SpOp, LambdaAndRotationCommuteWithGenerators) {
  for (int q : {3, 5}) {
    const auto& e = *ts::engine(q);
    const auto& g = e.group();
    const WeilOp lam(e.lambda_op()), rot(e.orth_op(g.tower().orth().generator()));
    for (const auto& s : standard_generators(g)) {
      const WeilOp r = e.sp_op(s, 0);
      EXPECT_EQ(lam * r, r * lam);
      EXPECT_EQ(rot * r, r * rot);
    }
  }
}

TEST(SpOp, SiegelEvaluatorMatchesOperator) {
  const auto& e = *ts::engine(5);
  const auto& g = e.group();
  std::mt19937_64 rng(14);
  const auto p1 = p1_generators(g);
  for (int i = 0; i < 10; ++i) {
    const SpMat a = random_word(g, p1, rng);
    const MonomialOp op = e.siegel_op(a, 1);
    const SiegelEvaluator ev = e.siegel_evaluator(a, 1);
    for (std::uint32_t x = 0; x < 625; x += 7) {
      const auto [ph, tgt] = ev.at(x);
      EXPECT_EQ(ph, op.mult(x));
      EXPECT_EQ(tgt, op.target(x));
    }
    const auto [u, m] = e.siegel_split(a);
    EXPECT_TRUE(in_u1(g, u));
    EXPECT_EQ(g.mul(u, m), a);
  }
}

TEST(SpOp, BruhatCoreNormalization) {
  for (int q : {3, 5}) {
    const auto& e = *ts::engine(q);
    const auto n2 = [](const CycNum& c) { return c * c.conj(); };
    EXPECT_EQ(n2(e.s2_core()->scalar), CycNum(e.p(), Rat(1, q * q)));
    EXPECT_EQ(n2(e.w2_core()->scalar), CycNum(e.p(), Rat(1, q * q * q * q)));
  }
}

TEST(Eta, TorusValues) {
  for (int q : {3, 5}) {
    const auto& e = *ts::engine(q);
    const auto& g = e.group();
    const auto& o = g.tower().orth();
    const auto t = anisotropic_torus(g);
    for (const auto& s : t.elements) {
      if (s == g.identity() || s == g.minus_identity()) continue;
      for (int k = 0; k < o.order(); ++k) {
        EXPECT_EQ(e.eta(s, k), CycNum(e.p(), static_cast<long>(o.sign(k))));
      }
    }
  }
}

TEST(SpOp, RefusesDenseBeyondLimit) {
  const auto& e = *ts::engine(7);
  EXPECT_THROW(e.sp_op(e.group().s2(), 0), std::length_error);
  EXPECT_NO_THROW(e.sp_op(e.group().s1(), 0));
}
