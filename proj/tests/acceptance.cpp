// One pass/fail line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "theta10/dlledger.hpp"
#include "theta10/harness.hpp"

using namespace theta10;

namespace {

struct Ctx {
  std::shared_ptr<WeilEngine> engine;
  std::shared_ptr<const HoweDecomposition> howe;
  std::shared_ptr<Analysis> analysis;
};

Ctx& ctx(int q) {
  static std::map<int, Ctx> cache;
  auto& c = cache[q];
  if (!c.engine) {
    c.engine = WeilEngine::create(q);
    c.howe = std::make_shared<HoweDecomposition>(c.engine);
    c.analysis = std::make_shared<Analysis>(c.howe);
  }
  return c;
}

struct Sp43 {
  GroupTable table;
  ClassPartition classes;
  std::vector<SpMat> reps;
  std::vector<std::uint64_t> sizes;
};

const Sp43& sp43() {
  static const Sp43 s = [] {
    const auto& g = ctx(3).engine->group();
    Sp43 r{generate_group(g, standard_generators(g)), {}, {}, {}};
    r.classes = conjugacy_classes(g, r.table);
    for (const auto& c : r.classes.classes) {
      r.reps.push_back(c.representative);
      r.sizes.push_back(c.size);
    }
    return r;
  }();
  return s;
}

SpMat random_word(const SpGroup& g, const std::vector<SpMat>& gens, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, gens.size() - 1);
  SpMat m = g.identity();
  for (int i = 0; i < 24; ++i) m = g.mul(m, gens[d(rng)]);
  return m;
}

int failures = 0;

void criterion(int n, const std::string& what, double limit_seconds, const std::function<bool(std::string&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (dt > limit_seconds) {
    ok = false;
    detail += " (over the " + std::to_string(static_cast<int>(limit_seconds)) + " s budget)";
  }
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  %s [%s] %.1f s\n", n, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str(), dt);
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, "dimension table at q = 3, 5, 7", 600, [](std::string& d) {
    bool ok = true;
    for (int q : {3, 5, 7}) {
      const auto& h = *ctx(q).howe;
      const auto w1 = h.isotypic_projector(SOChar::trivial(q));
      const auto [p, m] = h.split_pm(SOChar::trivial(q));
      const auto [np, nm] = h.split_pm(SOChar::nu(q));
      const int wt = h.isotypic_projector(SOChar{1, q}).dim;
      const std::vector<long> got{w1.dim, p.dim, m.dim, np.dim, nm.dim, wt};
      const std::vector<long> want{DimensionFormulas::w1(q), DimensionFormulas::w1_plus(q), DimensionFormulas::w1_minus(q),
                                   DimensionFormulas::wnu_pm(q), DimensionFormulas::wnu_pm(q), DimensionFormulas::wtheta(q)};
      static const std::map<int, std::vector<long>> literal{
          {3, {21, 15, 6, 10, 10, 20}}, {5, {105, 65, 40, 52, 52, 104}}, {7, {301, 175, 126, 150, 150, 300}}};
      ok = ok && got == want && got == literal.at(q);
      d += "q=" + std::to_string(q) + ":";
      for (long x : got) d += " " + std::to_string(x);
      d += "; ";
    }
    return ok;
  });

  criterion(2, "trace of Lambda on W, W_1, W_nu", 60, [](std::string& d) {
    bool ok = true;
    for (int q : {3, 5, 7}) {
      const auto& h = *ctx(q).howe;
      const Rat w = h.lambda_trace_w(), w1 = h.lambda_trace(*h.isotypic_projector(SOChar::trivial(q)).coeffs),
                wn = h.lambda_trace(*h.isotypic_projector(SOChar::nu(q)).coeffs);
      ok = ok && w == q * q && w1 == q * q && wn == 0;
      d += "q=" + std::to_string(q) + ": " + w.get_str() + " " + w1.get_str() + " " + wn.get_str() + "; ";
    }
    return ok;
  });

  criterion(3, "Sp(V)-orbits on V (x) E equal 2q+2 and <chi_W, chi_W>", 300, [](std::string& d) {
    const auto o3 = orbit_count_tensor(ctx(3).engine->group()), o5 = orbit_count_tensor(ctx(5).engine->group());
    const auto gram = ctx(3).howe->multiplicity_gram(sp43().classes, sp43().table.size());
    d = "orbits " + std::to_string(o3) + ", " + std::to_string(o5) + "; <W,W> = " + gram.weil_norm.get_str();
    return o3 == 8 && o5 == 12 && gram.weil_norm == Rat(8);
  });

  criterion(4, "Weil-core properties at q = 3", 600, [](std::string& d) {
    const auto& e = *ctx(3).engine;
    const auto& g = e.group();
    const auto gens = standard_generators(g);
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> f(0, 2);
    const int comm = e.commutant_dimension();
    int hom = 0, inter = 0, trace = 0, samples = 0;
    for (int i = 0; i < 100; ++i) {
      const SpMat a = random_word(g, gens, rng), b = random_word(g, gens, rng);
      hom += e.sp_op(a, 0) * e.sp_op(b, 0) == e.sp_op(g.mul(a, b), 0) ? 0 : 1;
      HeisElem h;
      for (auto& c : h.u) c = static_cast<Fq>(f(rng));
      h.z = static_cast<Fq>(f(rng));
      const WeilOp rho = e.sp_op(a, 0);
      inter += rho * WeilOp(e.heisenberg_op(h)) == WeilOp(e.heisenberg_op(e.heis_act(e.tensor(a, 0), h))) * rho ? 0 : 1;
    }
    while (samples < 100) {
      const SpMat a = random_word(g, gens, rng);
      const auto fast = e.eta_fast(a, 0);
      if (!fast) continue;
      ++samples;
      trace += e.sp_op(a, 0).trace() == CycNum(3, static_cast<long>(*fast)) ? 0 : 1;
    }
    d = "commutant " + std::to_string(comm) + ", failures: homomorphism " + std::to_string(hom) + ", intertwining " +
        std::to_string(inter) + ", trace " + std::to_string(trace);
    return comm == 1 && hom == 0 && inter == 0 && trace == 0;
  });

  criterion(5, "irreducibility at q = 3", 900, [](std::string& d) {
    const auto& s = sp43();
    const auto row = ctx(3).analysis->theta10_character(s.reps);
    const Rat n = norm_squared(row, s.sizes, s.table.size());
    const auto gram = ctx(3).howe->multiplicity_gram(s.classes, s.table.size());
    d = "<theta10,theta10> = " + n.get_str() + ", Gram " + std::to_string(gram.gram.size()) + "x" +
        std::to_string(gram.gram.size()) + (gram.identity ? " identity" : " not identity");
    return n == 1 && gram.identity && gram.gram.size() == 5;
  });

  criterion(6, "cuspidality at q = 3, 5, 7", 300, [](std::string& d) {
    bool ok = true;
    for (int q : {3, 5, 7}) {
      const auto& a = *ctx(q).analysis;
      const auto& g = ctx(q).engine->group();
      for (auto l : {SubgroupLabel::U0DoublePrime, SubgroupLabel::U0Prime, SubgroupLabel::U1, SubgroupLabel::U2,
                     SubgroupLabel::U0}) {
        const auto el = subgroup_elements(g, l).elements;
        ok = ok && a.fixed_subspace_delta(el) == 0 && a.fixed_subspace(a.theta10_component(), el) == 0;
      }
    }
    d = "no fixed vectors for U0'', U0', U1, U2, U0";
    return ok;
  });

  criterion(7, "degeneracy at q = 3, 5", 300, [](std::string& d) {
    bool ok = true;
    for (int q : {3, 5}) {
      Rat total = 0;
      int nondeg = 0;
      for (const auto& w : ctx(q).analysis->whittaker_table()) {
        total += w.multiplicity;
        if (w.nondegenerate) {
          ++nondeg;
          ok = ok && w.multiplicity == 0;
        }
      }
      ok = ok && nondeg == (q - 1) * (q - 1) && total == 0;
      d += "q=" + std::to_string(q) + ": " + std::to_string(nondeg) + " nondegenerate, total " + total.get_str() + "; ";
    }
    return ok;
  });

  criterion(8, "U1-decomposition and little groups at q = 3", 300, [](std::string& d) {
    const auto u = ctx(3).analysis->u1_decomposition();
    const auto l = ctx(3).analysis->little_groups_check();
    d = "d = " + std::to_string(u.d) + ", index " + std::to_string(l.index) + ", classes " +
        std::to_string(l.matching_classes) + "/" + std::to_string(l.classes) + ", norm " + l.norm.get_str();
    return u.d == 6 && u.distinct && u.single_m1_orbit && u.invariant_lines && l.index == 6 && l.match() && l.norm == 1;
  });

  criterion(9, "torus values at q = 3, 5, 7", 60, [](std::string& d) {
    bool ok = true;
    for (int q : {3, 5, 7}) {
      const auto t = torus_values_check(*ctx(q).analysis);
      int good = 0;
      for (const auto& r : t.rows) good += !r.plus_minus_one && r.pass() && r.theta10.is_one() ? 1 : 0;
      ok = ok && t.all_pass && good == q * q - 1 && t.regular_count == q * q - 1;
      d += std::to_string(good) + " ";
    }
    d += "regular elements with theta10 = 1";
    return ok;
  });

  criterion(10, "unipotence ledger at q = 3, 5", 60, [](std::string& d) {
    bool ok = true;
    for (int q : {3, 5}) {
      const auto rt = rt_dimension(q);
      const auto w = weyl_orbit_structure(q);
      const auto res = unipotence_deduction(torus_values_check(*ctx(q).analysis), DimensionFormulas::w1_minus(q));
      const long n = static_cast<long>(q) * q + 1;
      ok = ok && rt.value == (n - 2) * (n - 2) && w.nonregular == std::vector<int>{0, static_cast<int>(n / 2)} &&
           res.unique && res.m_trivial == 1 && res.m_mu == 0 && res.transcript.size() >= 6;
      d += "q=" + std::to_string(q) + ": rt " + std::to_string(rt.value) + ", (" + std::to_string(res.m_trivial) + "," +
           std::to_string(res.m_mu) + ") " + (res.unique ? "unique" : "not unique") + "; ";
    }
    return ok;
  });

  criterion(11, "determinism of --q 3 --suite all --seed 7", 600, [](std::string& d) {
    RunConfig a;
    a.q = 3;
    a.seed = 7;
    RunConfig b = a;
    b.jobs = 2;
    const auto ra = run(a), rb = run(b);
    const std::string ja = ra.to_json(a).dump(2), jb = rb.to_json(b).dump(2), jc = run(a).to_json(a).dump(2);
    d = std::to_string(ja.size()) + " bytes, " + (ra.pass() ? "all suites pass" : "some suite fails");
    return ja == jb && ja == jc && ra.pass();
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
