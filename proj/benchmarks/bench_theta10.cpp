#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "theta10/analysis.hpp"
#include "theta10/dlledger.hpp"

using namespace theta10;

namespace {

std::shared_ptr<WeilEngine> engine(int q) {
  static std::map<int, std::shared_ptr<WeilEngine>> cache;
  auto& e = cache[q];
  if (!e) e = WeilEngine::create(q);
  return e;
}

std::shared_ptr<Analysis> analysis(int q) {
  static std::map<int, std::shared_ptr<Analysis>> cache;
  auto& a = cache[q];
  if (!a) a = std::make_shared<Analysis>(std::make_shared<HoweDecomposition>(engine(q)));
  return a;
}

std::vector<SpMat> samples(const SpGroup& g, const std::vector<SpMat>& gens, int n) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> d(0, gens.size() - 1);
  std::vector<SpMat> out;
  for (int i = 0; i < n; ++i) {
    SpMat m = g.identity();
    for (int k = 0; k < 24; ++k) m = g.mul(m, gens[d(rng)]);
    out.push_back(m);
  }
  return out;
}

void BM_CycMul(benchmark::State& st) {
  const int p = static_cast<int>(st.range(0));
  CycNum a = gauss_sum(p, p), b = a.conj();
  for (auto _ : st) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_CycMul)->Arg(3)->Arg(5)->Arg(7);

void BM_EngineCreate(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(WeilEngine::create(static_cast<int>(st.range(0))));
}
BENCHMARK(BM_EngineCreate)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SiegelOp(benchmark::State& st) {
  const auto e = engine(static_cast<int>(st.range(0)));
  const auto xs = samples(e->group(), p1_generators(e->group()), 16);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(e->siegel_op(xs[i++ % xs.size()], 0));
}
BENCHMARK(BM_SiegelOp)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_SpOpGeneral(benchmark::State& st) {
  const auto e = engine(static_cast<int>(st.range(0)));
  const auto xs = samples(e->group(), standard_generators(e->group()), 16);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(e->sp_op(xs[i++ % xs.size()], 0));
}
BENCHMARK(BM_SpOpGeneral)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_EtaFast(benchmark::State& st) {
  const auto e = engine(static_cast<int>(st.range(0)));
  const auto xs = samples(e->group(), standard_generators(e->group()), 64);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(e->eta_fast(xs[i++ % xs.size()], 1));
}
BENCHMARK(BM_EtaFast)->Arg(3)->Arg(5)->Arg(7);

void BM_Theta10DeltaTrace(benchmark::State& st) {
  const int q = static_cast<int>(st.range(0));
  const auto a = analysis(q);
  const auto xs = samples(a->engine().group(), p1_generators(a->engine().group()), 16);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(a->delta_trace(xs[i++ % xs.size()]));
}
BENCHMARK(BM_Theta10DeltaTrace)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_CuspidalU0(benchmark::State& st) {
  const int q = static_cast<int>(st.range(0));
  const auto a = analysis(q);
  const auto u0 = subgroup_elements(a->engine().group(), SubgroupLabel::U0).elements;
  for (auto _ : st) benchmark::DoNotOptimize(a->fixed_subspace_delta(u0));
}
BENCHMARK(BM_CuspidalU0)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_TorusCheck(benchmark::State& st) {
  const auto a = analysis(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(torus_values_check(*a));
}
BENCHMARK(BM_TorusCheck)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
