#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "oracles.hpp"

using namespace theta10;
namespace ts = testing_support;

namespace {

std::vector<Rat> densify(const SparseVec& v, std::size_t n) {
  std::vector<Rat> f(n, Rat(0));
  for (const auto& [i, c] : v) f[i] = c;
  return f;
}

std::vector<Rat> permute(const MonomialOp& op, const std::vector<Rat>& f) {
  std::vector<Rat> g(f.size());
  for (std::uint32_t x = 0; x < f.size(); ++x) g[x] = f[op.target(x)];
  return g;
}

}  // namespace

class HoweQ : public ::testing::TestWithParam<int> {};

TEST_P(HoweQ, DimensionsMatchPermutationCharacterOracle) {
  const int q = GetParam();
  const auto& h = *ts::howe(q);
  const oracle::IsoDims o = oracle::iso_dims(q);
  const auto w1 = h.isotypic_projector(SOChar::trivial(q));
  const auto [w1p, w1m] = h.split_pm(SOChar::trivial(q));
  const auto [wnp, wnm] = h.split_pm(SOChar::nu(q));
  const oracle::IsoDims got{w1.dim, w1p.dim, w1m.dim, wnp.dim, wnm.dim, h.isotypic_projector(SOChar{1, q}).dim};
  EXPECT_EQ(got, o);
  EXPECT_EQ(w1.dim, DimensionFormulas::w1(q));
  EXPECT_EQ(w1p.dim, DimensionFormulas::w1_plus(q));
  EXPECT_EQ(w1m.dim, DimensionFormulas::w1_minus(q));
  EXPECT_EQ(wnp.dim, DimensionFormulas::wnu_pm(q));
  EXPECT_EQ(wnm.dim, DimensionFormulas::wnu_pm(q));
  for (const auto& c : h.dimension_table()["components"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
  long total = 0;
  for (int k = 0; k <= q; ++k) total += h.cycle_dimension(SOChar{k, q});
  EXPECT_EQ(total, static_cast<long>(q) * q * q * q);
}

TEST_P(HoweQ, LambdaTraces) {
  const int q = GetParam();
  const auto& h = *ts::howe(q);
  EXPECT_EQ(h.lambda_trace_w(), Rat(q * q));
  EXPECT_EQ(h.lambda_trace(*h.isotypic_projector(SOChar::trivial(q)).coeffs), Rat(q * q));
  EXPECT_EQ(h.lambda_trace(*h.isotypic_projector(SOChar::nu(q)).coeffs), Rat(0));
  EXPECT_EQ(h.fixed_points(0), static_cast<std::uint32_t>(q * q * q * q));
}

TEST_P(HoweQ, LambdaInvertsRotations) {
  const int q = GetParam();
  const auto& e = *ts::engine(q);
  const auto& o = e.group().tower().orth();
  const MonomialOp lam = e.lambda_op();
  for (int t = 0; t < o.so_order(); ++t) EXPECT_EQ(lam * e.orth_op(t) * lam, e.orth_op(o.inv(t)));
  EXPECT_TRUE((lam * lam).is_identity());
}

TEST_P(HoweQ, RationalBasesAreEquivariant) {
  const int q = GetParam();
  const auto& h = *ts::howe(q);
  const auto& e = *ts::engine(q);
  const auto& o = e.group().tower().orth();
  const std::size_t n = static_cast<std::size_t>(e.space().dim());
  const MonomialOp rot = e.orth_op(o.generator()), lam = e.lambda_op();
  const auto [w1p, w1m] = h.split_pm(SOChar::trivial(q));
  const auto [wnp, wnm] = h.split_pm(SOChar::nu(q));
  auto neg = [](std::vector<Rat> f) {
    for (auto& x : f) x = -x;
    return f;
  };
  for (const auto* c : {&w1p, &w1m, &wnp, &wnm}) {
    ASSERT_EQ(static_cast<int>(c->basis.size()), c->dim) << c->label;
    for (const auto& b : c->basis) {
      const auto f = densify(b, n);
      EXPECT_EQ(permute(rot, f), c->theta.is_trivial() ? f : neg(f)) << c->label;
      EXPECT_EQ(permute(lam, f), c->sign > 0 ? f : neg(f)) << c->label;
      EXPECT_EQ(h.project(*c, f), f) << c->label;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(OddQ, HoweQ, ::testing::Values(3, 5, 7));

TEST(Howe, ProjectorsAreOrthogonalIdempotents) {
  const auto& h = *ts::howe(5);
  const auto [p, m] = h.split_pm(SOChar::trivial(5));
  const auto w1 = h.isotypic_projector(SOChar::trivial(5));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int i = 0; i < 5; ++i) {
    std::vector<Rat> f(625);
    for (auto& x : f) x = d(rng);
    const auto pf = h.project(p, f), mf = h.project(m, f);
    EXPECT_EQ(h.project(p, pf), pf);
    EXPECT_EQ(h.project(m, pf), std::vector<Rat>(625, Rat(0)));
    std::vector<Rat> sum(625);
    for (std::size_t k = 0; k < 625; ++k) sum[k] = pf[k] + mf[k];
    EXPECT_EQ(sum, h.project(w1, f));
  }
  EXPECT_THROW(h.split_pm(SOChar{1, 5}), std::invalid_argument);
}

TEST(Howe, DeltaBasis) {
  const auto& h = *ts::howe(3);
  const auto d = h.delta_basis();
  ASSERT_EQ(d.functions.size(), 6u);
  const auto [p, m] = h.split_pm(SOChar::trivial(3));
  const MonomialOp lam = ts::engine(3)->lambda_op();
  for (const auto& f : d.functions) {
    std::vector<Rat> r(f.begin(), f.end());
    std::vector<Rat> neg = r;
    for (auto& x : neg) x = -x;
    EXPECT_EQ(permute(lam, r), neg);
    EXPECT_EQ(h.project(m, r), r);
    for (std::uint32_t x = 0; x < 81; ++x)
      if (h.census().is_decomposable[x]) EXPECT_EQ(f[x], 0);
  }
}

TEST(Howe, GramMatrixAtThree) {
  const auto& h = *ts::howe(3);
  const auto g = h.multiplicity_gram(ts::sp43_classes(), 51840);
  EXPECT_EQ(g.labels.size(), 5u);
  EXPECT_TRUE(g.identity);
  for (std::size_t i = 0; i < g.gram.size(); ++i)
    for (std::size_t j = 0; j < g.gram.size(); ++j) EXPECT_EQ(g.gram[i][j], Rat(i == j ? 1 : 0));
  EXPECT_EQ(g.weil_norm, Rat(8));
}

TEST(Howe, WeilNormEqualsMultiplicitySquares) {
  // W = W1+ + W1- + Wnu+ + Wnu- + sum over pairs {theta, theta^-1} of 2 W_theta.
  const auto& h = *ts::howe(3);
  const auto& e = *ts::engine(3);
  const auto reps = ts::sp43_reps();
  const auto sizes = ts::sp43_sizes();
  std::vector<CycNum> chi_w, chi_t;
  const auto comps = h.distinct_components();
  const IsoComponent* wt = nullptr;
  for (const auto& c : comps)
    if (c.sign == 0) wt = &c;
  ASSERT_NE(wt, nullptr);
  for (const auto& r : reps) {
    chi_w.push_back(e.eta(r, 0));
    chi_t.push_back(h.character(*wt, r));
  }
  EXPECT_EQ(class_inner_product(chi_w, chi_t, sizes, 51840), CycNum(3, 2L));
  for (int q : {3, 5}) {
    long m2 = 4;
    for (int k = 1; 2 * k < q + 1; ++k) m2 += 4;
    EXPECT_EQ(static_cast<std::uint64_t>(m2), orbit_count_tensor(ts::engine(q)->group()));
  }
}

TEST(Howe, SOCharNames) {
  EXPECT_EQ(SOChar::trivial(3).name(), "1");
  EXPECT_EQ(SOChar::nu(3).name(), "nu");
  EXPECT_TRUE(SOChar::nu(5).is_real());
  EXPECT_EQ((SOChar{1, 5}).inverse().k, 5);
}
