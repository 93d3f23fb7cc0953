#include "theta10/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "theta10/dlledger.hpp"
#include "theta10/howe.hpp"
#include "theta10/weil.hpp"

namespace theta10 {

namespace {

using json = nlohmann::ordered_json;

std::string rat_str(const Rat& r) { return r.get_str(); }

long ipow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) h = (h ^ c) * 16777619u;
  return h;
}

std::uint64_t gl2_order(std::uint64_t q) { return (q * q - 1) * (q * q - q); }

class Context {
 public:
  explicit Context(const RunConfig& cfg) : cfg_(cfg), engine_(WeilEngine::create(cfg.q)) {}

  const RunConfig& cfg() const { return cfg_; }
  int q() const { return cfg_.q; }
  const WeilEngine& engine() const { return *engine_; }
  const SpGroup& group() const { return engine_->group(); }

  std::shared_ptr<const HoweDecomposition> howe() {
    if (!howe_) howe_ = std::make_shared<HoweDecomposition>(engine_);
    return howe_;
  }
  const Analysis& analysis() {
    if (!analysis_) analysis_ = std::make_unique<Analysis>(howe());
    return *analysis_;
  }

  /// Full enumeration of Sp(4, q) is within budget at q = 3 only.
  bool can_enumerate() const { return cfg_.q == 3 || cfg_.allow_big; }
  const GroupTable& full_group() {
    if (!table_) table_ = std::make_unique<GroupTable>(generate_group(group(), standard_generators(group())));
    return *table_;
  }
  const ClassPartition& classes() {
    if (!classes_) classes_ = std::make_unique<ClassPartition>(conjugacy_classes(group(), full_group()));
    return *classes_;
  }
  const CharRow& theta10_on_classes() {
    if (!row_) {
      std::vector<SpMat> reps;
      for (const auto& c : classes().classes) reps.push_back(c.representative);
      row_ = std::make_unique<CharRow>(analysis().theta10_character(reps, cfg_.jobs));
    }
    return *row_;
  }
  std::vector<std::uint64_t> class_sizes() {
    std::vector<std::uint64_t> s;
    for (const auto& c : classes().classes) s.push_back(c.size);
    return s;
  }

  /// Per-suite generator: the stream depends on the seed and the suite name only,
  /// so a suite draws the same samples whichever other suites run.
  std::mt19937_64 rng_for(const std::string& suite) const {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                      fnv1a(suite)};
    return std::mt19937_64(seq);
  }

 private:
  RunConfig cfg_;
  std::shared_ptr<WeilEngine> engine_;
  std::shared_ptr<const HoweDecomposition> howe_;
  std::unique_ptr<Analysis> analysis_;
  std::unique_ptr<GroupTable> table_;
  std::unique_ptr<ClassPartition> classes_;
  std::unique_ptr<CharRow> row_;
};

SpMat random_word(const SpGroup& g, const std::vector<SpMat>& gens, std::mt19937_64& rng, int length = 24) {
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  SpMat m = g.identity();
  for (int i = 0; i < length; ++i) m = g.mul(m, gens[pick(rng)]);
  return m;
}

HeisElem random_heis(const WeilEngine& e, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, e.q() - 1);
  HeisElem h;
  for (auto& c : h.u) c = static_cast<Fq>(pick(rng));
  h.z = static_cast<Fq>(pick(rng));
  return h;
}

void expect(SuiteReport& s, std::string name, json computed, json expected, std::string provenance) {
  CheckRecord r;
  r.name = std::move(name);
  r.pass = computed == expected;
  r.computed = std::move(computed);
  r.expected = std::move(expected);
  r.provenance = std::move(provenance);
  s.checks.push_back(std::move(r));
}

std::string closed(const std::string& formula) { return "closed-form: " + formula; }
std::string oracle(const std::string& name) { return "oracle: " + name; }
const std::string kIdentity = "identity";

json cyc_json(const CycNum& c) { return c.to_string(); }

// ---------------------------------------------------------------- suites

void suite_fields(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto& tower = ctx.group().tower();
  const auto& f = tower.base();
  const int p = f.p();

  // (1 + 2z)(1 + 2z^2) in Q(zeta_3): 1 + 2(z + z^2) + 4 = 3.
  const CycNum a = CycNum(3, 1L) + CycNum::zeta_power(3, 1) * Rat(2);
  const CycNum b = CycNum(3, 1L) + CycNum::zeta_power(3, 2) * Rat(2);
  expect(s, "cyclo: (1+2z)(1+2z^2) in Q(zeta_3)", cyc_json(a * b), "3", oracle("hand expansion with 1+z+z^2=0"));
  expect(s, "cyclo: a * a^-1 = 1", (a * cyc_inv(a)).is_one(), true, kIdentity);

  const CycNum g = gauss_sum(p, q);
  expect(s, "gauss sum |G|^2", cyc_json(g * g.conj()), std::to_string(q), closed("q"));
  expect(s, "gauss sum G^2", cyc_json(g * g), std::to_string(f.chi(f.neg(1)) * q), closed("chi(-1) q"));

  CycNum psi_sum(p);
  for (int x = 0; x < q; ++x) psi_sum += additive_character(p, f.trace(static_cast<Fq>(x)));
  expect(s, "sum of psi over F_q", cyc_json(psi_sum), "0", kIdentity);

  expect(s, "modulus degree", tower.degree(), 4 * f.r(), closed("4r"));
  const auto& e = tower.e_space();
  int norm_zero = 0;
  for (int x = 0; x < e.size(); ++x) norm_zero += e.norm(static_cast<EIdx>(x)) == 0 ? 1 : 0;
  expect(s, "norm form anisotropic: #{N(x) = 0}", norm_zero, 1, kIdentity);
  expect(s, "|O(E)|", tower.orth().order(), 2 * (q + 1), closed("2(q+1)"));
  expect(s, "|SO(E)|", tower.orth().so_order(), q + 1, closed("q+1"));

  const auto torus = anisotropic_torus(ctx.group());
  expect(s, "order of zeta", static_cast<long>(tower.mult_order(torus.zeta.code())), static_cast<long>(q) * q + 1,
         closed("q^2+1"));
}

void suite_group(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto& g = ctx.group();
  const std::uint64_t uq = static_cast<std::uint64_t>(q);

  const auto torus = anisotropic_torus(g);
  expect(s, "|T_aniso|", static_cast<long>(torus.elements.size()), static_cast<long>(q) * q + 1, closed("q^2+1"));
  expect(s, "order of the torus generator", static_cast<long>(g.order_of(torus.generator)), static_cast<long>(q) * q + 1,
         closed("q^2+1"));
  bool symp = true;
  for (const auto& t : torus.elements) symp = symp && g.is_symplectic(t);
  expect(s, "torus elements symplectic", symp, true, kIdentity);

  const auto census = decomposable_census(g);
  expect(s, "|S| nonzero decomposables", census.nonzero_decomposable, (uq * uq - 1) * (uq * uq - 1) / (uq - 1),
         closed("(q^2-1)^2/(q-1)"));
  expect(s, "|S'|", census.indecomposable, uq * uq * uq * uq - census.decomposable, closed("q^4 - |S|"));
  expect(s, "|M1| = |S'|", census.indecomposable, gl2_order(uq), closed("|GL(2,q)|"));
  expect(s, "|S/SO(E)|", census.s_orbits, uq * uq, closed("q^2"));
  expect(s, "|S'/SO(E)| = 2d", census.s_prime_orbits, static_cast<std::uint64_t>(2 * DimensionFormulas::w1_minus(q)),
         closed("q(q-1)^2"));
  expect(s, "self-conjugate SO(E)-orbits", census.self_conjugate_orbits, census.s_orbits,
         oracle("decomposable orbit count"));
  expect(s, "Sp(V)-orbits on V (x) E", orbit_count_tensor(g), 2 * uq + 2, closed("2q+2"));

  const auto p1 = subgroup_elements(g, SubgroupLabel::P1).elements;
  expect(s, "|P1|", static_cast<std::uint64_t>(p1.size()), gl2_order(uq) * uq * uq * uq, closed("|GL(2,q)| q^3"));
  bool in = true;
  for (const auto& m : p1) in = in && in_p1(g, m);
  expect(s, "P1 stabilizes L", in, true, kIdentity);

  const auto u1 = subgroup_elements(g, SubgroupLabel::U1).elements;
  bool bridge = true;
  for (const auto& u : u1) bridge = bridge && u1_from_form(g, u1_bilinear_bridge(g, u)) == u;
  expect(s, "U1 <-> symmetric forms round trip", bridge, true, kIdentity);

  const auto u0 = subgroup_elements(g, SubgroupLabel::U0).elements;
  std::vector<std::uint64_t> keys;
  for (const auto& u : u0) keys.push_back(g.key(u));
  std::sort(keys.begin(), keys.end());
  expect(s, "|U0| distinct parametrized elements",
         static_cast<long>(std::unique(keys.begin(), keys.end()) - keys.begin()), ipow(q, 4), closed("q^4"));

  const auto b0 = subgroup_elements(g, SubgroupLabel::B0).elements;
  expect(s, "|B0|", static_cast<std::uint64_t>(b0.size()), (uq - 1) * (uq - 1) * uq * uq * uq * uq,
         closed("(q-1)^2 q^4"));

  if (!ctx.can_enumerate()) {
    s.data["enumeration"] = "skipped: full enumeration of Sp(4,q) needs --allow-big at q >= 5";
    return;
  }
  const auto& table = ctx.full_group();
  const auto& classes = ctx.classes();
  expect(s, "|Sp(4,q)| by enumeration", static_cast<std::uint64_t>(table.size()),
         uq * uq * uq * uq * (uq * uq - 1) * (uq * uq * uq * uq - 1), closed("q^4 (q^2-1)(q^4-1)"));
  expect(s, "|G : B0|", static_cast<std::uint64_t>(table.size() / b0.size()), (uq * uq + 1) * (uq + 1) * (uq + 1),
         closed("(q^2+1)(q+1)^2"));
  std::uint64_t total = 0;
  for (const auto& c : classes.classes) total += c.size;
  expect(s, "sum of class sizes", total, static_cast<std::uint64_t>(table.size()), kIdentity);
  expect(s, "number of conjugacy classes", static_cast<std::uint64_t>(classes.classes.size()), uq * uq + 5 * uq + 10,
         closed("q^2+5q+10"));
}

void suite_weil_core(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto& e = ctx.engine();
  const auto& g = e.group();
  const int p = e.p();
  auto rng = ctx.rng_for(s.name);
  const bool full = q <= WeilEngine::kDenseLimit;
  const auto gens = standard_generators(g);
  const auto p1gens = p1_generators(g);

  s.data["convention"] = e.convention_header();
  expect(s, "consistent Heisenberg convention found", e.convention().passing_combinations > 0, true, kIdentity);

  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const HeisElem a = random_heis(e, rng), b = random_heis(e, rng);
    if (!(e.heisenberg_op(a) * e.heisenberg_op(b) == e.heisenberg_op(e.heis_mul(a, b)))) ++bad;
  }
  expect(s, "Heisenberg homomorphism failures (200 pairs)", bad, 0, kIdentity);

  const WeilOp id(MonomialOp::identity(p, e.space().dim()));
  expect(s, "rho(1) = 1", e.sp_op(g.identity(), 0) == id, true, kIdentity);

  // Elements outside P1 need the dense Bruhat cores, available for q <= kDenseLimit.
  // At q = 3 both factors are arbitrary; at q = 5 the second factor lies in P1.
  auto first = [&] { return random_word(g, full ? gens : p1gens, rng); };
  auto second = [&] { return random_word(g, q == 3 ? gens : p1gens, rng); };
  if (!full) s.data["restriction"] = "q > 5: samples drawn from P1, where rho is monomial";
  else if (q != 3) s.data["restriction"] = "q = 5: second factor of each product drawn from P1";

  if (full) expect(s, "commutant dimension", e.commutant_dimension(), 1, closed("Stone-von Neumann: 1"));

  bad = 0;
  for (int i = 0; i < 100; ++i) {
    const SpMat a = first(), b = second();
    if (!(e.sp_op(a, 0) * e.sp_op(b, 0) == e.sp_op(g.mul(a, b), 0))) ++bad;
  }
  expect(s, "homomorphism failures (100 pairs)", bad, 0, kIdentity);

  bad = 0;
  for (int i = 0; i < 100; ++i) {
    const SpMat a = first();
    const HeisElem h = random_heis(e, rng);
    const WeilOp rho = e.sp_op(a, 0);
    if (!(rho * WeilOp(e.heisenberg_op(h)) == WeilOp(e.heisenberg_op(e.heis_act(e.tensor(a, 0), h))) * rho)) ++bad;
  }
  expect(s, "intertwining failures (100 pairs)", bad, 0, kIdentity);

  bad = 0;
  int samples = 0, attempts = 0;
  while (samples < 100 && attempts < 10000) {
    ++attempts;
    const SpMat a = first();
    const auto fast = e.eta_fast(a, 0);
    if (!fast) continue;
    ++samples;
    if (!(e.sp_op(a, 0).trace() == CycNum(p, static_cast<long>(*fast)))) ++bad;
  }
  expect(s, "trace formula samples with det(g-1) != 0", samples, 100, kIdentity);
  expect(s, "trace formula failures", bad, 0, oracle("chi(det(g-1))"));

  const MonomialOp ls1 = e.levi_op(g.s1(), 0);
  bool pure = true;
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(e.space().dim()); ++x) pure = pure && ls1.mult(x) == Phase{};
  expect(s, "levi_op(s1) is a permutation of order 2", pure && !ls1.is_identity() && (ls1 * ls1).is_identity(), true,
         kIdentity);

  const WeilOp lam(e.lambda_op());
  const WeilOp rot(e.orth_op(g.tower().orth().generator()));
  bad = 0;
  for (const auto& x : full ? gens : p1gens) {
    const WeilOp r = e.sp_op(x, 0);
    if (!(lam * r == r * lam) || !(rot * r == r * rot)) ++bad;
  }
  expect(s, "O(E) operators commuting with generators: failures", bad, 0, kIdentity);

  if (full) {
    const auto norm2 = [](const CycNum& c) { return c * c.conj(); };
    expect(s, "|c(s2)|^2", cyc_json(norm2(e.s2_core()->scalar)), rat_str(Rat(1, q * q)), closed("q^-2"));
    expect(s, "|c(s2 s1 s2)|^2", cyc_json(norm2(e.w2_core()->scalar)), rat_str(Rat(1, q * q * q * q)), closed("q^-4"));
  }
}

void suite_dims(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto& h = *ctx.howe();
  const auto table = h.dimension_table();
  for (const auto& c : table["components"]) {
    expect(s, "dim " + c["label"].get<std::string>(), c["dim_computed"], c["dim_formula"], closed("dimension formula"));
  }
  const auto w1 = h.isotypic_projector(SOChar::trivial(q));
  const auto wn = h.isotypic_projector(SOChar::nu(q));
  expect(s, "W_1 basis size", static_cast<long>(w1.basis.size()), static_cast<long>(h.cycle_dimension(SOChar::trivial(q))),
         oracle("cycle type of orth_op(t0)"));
  expect(s, "W_nu basis size", static_cast<long>(wn.basis.size()), static_cast<long>(h.cycle_dimension(SOChar::nu(q))),
         oracle("cycle type of orth_op(t0)"));
  const std::string q2 = std::to_string(q * q);
  expect(s, "trace(Lambda on W)", rat_str(h.lambda_trace_w()), q2, closed("q^2"));
  expect(s, "trace(Lambda on W) via operator", cyc_json(ctx.engine().lambda_op().trace()), q2, oracle("monomial trace"));
  expect(s, "trace(Lambda on W_1)", rat_str(h.lambda_trace(*w1.coeffs)), q2, closed("q^2"));
  expect(s, "trace(Lambda on W_nu)", rat_str(h.lambda_trace(*wn.coeffs)), "0", closed("0"));

  const auto& delta = ctx.analysis().delta();
  expect(s, "delta basis size", static_cast<long>(delta.functions.size()), DimensionFormulas::w1_minus(q),
         closed("q(q-1)^2/2"));
}

void suite_irreducible(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto& a = ctx.analysis();
  const auto& classes = ctx.classes();
  const auto order = static_cast<std::uint64_t>(ctx.full_group().size());
  const auto sizes = ctx.class_sizes();
  const auto& row = ctx.theta10_on_classes();

  expect(s, "<theta10, theta10>", rat_str(norm_squared(row, sizes, order)), "1", closed("1"));
  std::size_t id = 0;
  for (std::size_t i = 0; i < classes.classes.size(); ++i)
    if (classes.classes[i].representative == ctx.group().identity()) id = i;
  expect(s, "theta10(1)", cyc_json(row.values[id]), std::to_string(DimensionFormulas::w1_minus(q)),
         closed("q(q-1)^2/2"));

  const auto gram = ctx.howe()->multiplicity_gram(classes, order, ctx.cfg().jobs);
  json computed = json::array(), expected = json::array();
  for (std::size_t i = 0; i < gram.gram.size(); ++i) {
    json cr = json::array(), er = json::array();
    for (std::size_t j = 0; j < gram.gram[i].size(); ++j) {
      cr.push_back(rat_str(gram.gram[i][j]));
      er.push_back(i == j ? "1" : "0");
    }
    computed.push_back(std::move(cr));
    expected.push_back(std::move(er));
  }
  s.data["gram_labels"] = gram.labels;
  expect(s, "component Gram matrix", computed, expected, kIdentity);
  expect(s, "<chi_W, chi_W>", rat_str(gram.weil_norm), std::to_string(2 * q + 2), closed("2q+2"));
  expect(s, "<chi_W, chi_W> = Sp(V)-orbits on V (x) E", rat_str(gram.weil_norm),
         std::to_string(orbit_count_tensor(ctx.group())), oracle("orbit count"));

  auto rng = ctx.rng_for(s.name);
  const auto& table = ctx.full_group();
  std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    const SpMat& x = table.element(pick(rng));
    if (!(a.theta10(x) == a.delta_trace(x))) ++bad;
  }
  expect(s, "eta route vs delta route: failures (20 elements)", bad, 0, oracle("delta-basis trace"));

  if (!ctx.cfg().csv.empty()) emit_character_table(ctx.cfg().csv, ctx.group(), classes, row);
}

void suite_cuspidal(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto& a = ctx.analysis();
  const auto& g = ctx.group();
  for (auto l : {SubgroupLabel::U0DoublePrime, SubgroupLabel::U0Prime, SubgroupLabel::U1, SubgroupLabel::U2,
                 SubgroupLabel::U0}) {
    const auto el = subgroup_elements(g, l).elements;
    const Rat d = a.fixed_subspace_delta(el);
    expect(s, "dim theta10^" + label_name(l), rat_str(d), "0", closed("0"));
    expect(s, "dim theta10^" + label_name(l) + " (eta route)", rat_str(a.fixed_subspace(a.theta10_component(), el, ctx.cfg().jobs)),
           rat_str(d), oracle("delta-basis trace"));
  }
  const std::vector<SpMat> one{g.identity()};
  std::vector<Rat> whole(static_cast<std::size_t>(g.tower().orth().order()), Rat(0));
  whole[0] = 1;
  expect(s, "dim W^{1}", rat_str(a.fixed_subspace(whole, one)), std::to_string(ipow(q, 4)), closed("q^4"));
  expect(s, "dim theta10^{1}", rat_str(a.fixed_subspace_delta(one)), std::to_string(DimensionFormulas::w1_minus(q)),
         closed("q(q-1)^2/2"));
}

void suite_whittaker(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto table = ctx.analysis().whittaker_table();
  long nondeg = 0;
  Rat total = 0;
  for (const auto& w : table) {
    total += w.multiplicity;
    if (!w.nondegenerate) continue;
    ++nondeg;
    expect(s, "mult xi(" + std::to_string(w.a) + "," + std::to_string(w.b) + ")", rat_str(w.multiplicity), "0",
           closed("0"));
  }
  expect(s, "nondegenerate characters", nondeg, static_cast<long>(q - 1) * (q - 1), closed("(q-1)^2"));
  expect(s, "one-dimensional constituents of theta10|U0", rat_str(total), "0", closed("0"));
}

void suite_u1(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto u = ctx.analysis().u1_decomposition();
  expect(s, "d", u.d, static_cast<int>(DimensionFormulas::w1_minus(q)), closed("q(q-1)^2/2"));
  expect(s, "delta_i span U1-invariant lines", u.invariant_lines, true, kIdentity);
  expect(s, "U1-characters distinct", u.distinct, true, kIdentity);
  expect(s, "U1-characters form one M1-orbit", u.single_m1_orbit, true, kIdentity);
}

void suite_little_groups(Context& ctx, SuiteReport& s) {
  const auto uq = static_cast<std::uint64_t>(ctx.q());
  const auto r = ctx.analysis().little_groups_check();
  expect(s, "|P1|", r.p1_order, gl2_order(uq) * uq * uq * uq, closed("|GL(2,q)| q^3"));
  expect(s, "|O|", r.stabilizer_order, 2 * (uq + 1), closed("2(q+1)"));
  expect(s, "|O U1|", r.h_order, r.stabilizer_order * uq * uq * uq, closed("|O| q^3"));
  expect(s, "|P1 : O U1|", r.index, static_cast<std::uint64_t>(DimensionFormulas::w1_minus(ctx.q())),
         closed("q(q-1)^2/2"));
  expect(s, "O dihedral", r.dihedral, true, kIdentity);
  expect(s, "epsilon is a character of O", r.epsilon_homomorphism, true, kIdentity);
  expect(s, "P1-classes where Ind phi' = theta10", static_cast<std::uint64_t>(r.matching_classes),
         static_cast<std::uint64_t>(r.classes), oracle("theta10 by delta traces"));
  expect(s, "Ind phi'(1)", cyc_json(r.induced_at_identity), std::to_string(DimensionFormulas::w1_minus(ctx.q())),
         closed("q(q-1)^2/2"));
  expect(s, "<theta10|P1, theta10|P1>_P1", rat_str(r.norm), "1", closed("1"));
}

void suite_torus(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const auto t = torus_values_check(ctx.analysis());
  long regular = 0, eta_ok = 0, theta_one = 0, pm = 0, pm_degenerate = 0;
  for (const auto& r : t.rows) {
    if (r.plus_minus_one) {
      ++pm;
      pm_degenerate += r.eigenvalues_distinct ? 0 : 1;
      continue;
    }
    regular += r.eigenvalues_distinct && r.no_eigenvalue_pm1 ? 1 : 0;
    eta_ok += r.eta_pattern ? 1 : 0;
    theta_one += r.theta10.is_one() ? 1 : 0;
  }
  const long n = static_cast<long>(q) * q - 1;
  expect(s, "elements +-1", pm, 2L, closed("2"));
  expect(s, "+-1 flagged non-regular", pm_degenerate, 2L, kIdentity);
  expect(s, "regular elements of T \\ {+-1}", regular, n, closed("q^2-1"));
  expect(s, "eta(s,t) = eps(t) on T \\ {+-1}", eta_ok, n, closed("q^2-1"));
  expect(s, "theta10(s) = 1 on T \\ {+-1}", theta_one, n, closed("q^2-1"));
  expect(s, "regular count reported", static_cast<long>(t.regular_count), n, closed("q^2-1"));
}

void suite_unipotent(Context& ctx, SuiteReport& s) {
  const int q = ctx.q();
  const long n = static_cast<long>(q) * q + 1;
  const auto w = weyl_orbit_structure(q);
  expect(s, "torus characters", w.characters, static_cast<int>(n), closed("q^2+1"));
  expect(s, "regular characters", w.regular, static_cast<int>(n - 2), closed("q^2-1"));
  expect(s, "non-regular characters", w.nonregular, std::vector<int>{0, static_cast<int>(n / 2)},
         closed("{0, (q^2+1)/2}"));
  expect(s, "Frobenius orbits of size 4", w.frobenius_order_four, true, kIdentity);
  expect(s, "q^4 acts trivially", w.q4_acts_trivially, true, kIdentity);

  const auto rt = rt_dimension(q);
  expect(s, "dim R_{T,theta}", rt.value, (n - 2) * (n - 2), closed("(q^2-1)^2"));
  expect(s, "dim R_{T,theta} != dim theta10", rt.value != DimensionFormulas::w1_minus(q), true, kIdentity);

  const auto table = torus_values_check(ctx.analysis());
  const auto d = unipotence_deduction(table, DimensionFormulas::w1_minus(q));
  expect(s, "solution unique", d.unique, true, kIdentity);
  expect(s, "(m_trivial, m_mu)", json::array({d.m_trivial, d.m_mu}), json::array({1, 0}), oracle("exact linear solve"));
  s.data["conclusion"] = d.conclusion;
  s.data["transcript"] = d.transcript;
}

struct SuiteDef {
  const char* name;
  void (*fn)(Context&, SuiteReport&);
  /// Nonempty when the suite is over budget for this config.
  std::string (*gate)(const Context&);
};

std::string needs_classes(const Context& c) {
  return c.can_enumerate() ? "" : "conjugacy classes of Sp(4,q) need --allow-big at q >= 5";
}
std::string needs_small(const Context& c) {
  return c.q() < 7 || c.cfg().allow_big ? "" : "P1-wide loops need --allow-big at q >= 7";
}
std::string always(const Context&) { return ""; }

const std::vector<SuiteDef>& suite_defs() {
  static const std::vector<SuiteDef> defs = {
      {"fields", suite_fields, always},
      {"group", suite_group, always},
      {"weil-core", suite_weil_core, always},
      {"dims", suite_dims, always},
      {"irreducible", suite_irreducible, needs_classes},
      {"cuspidal", suite_cuspidal, always},
      {"whittaker", suite_whittaker, always},
      {"u1-decomp", suite_u1, needs_small},
      {"little-groups", suite_little_groups, needs_small},
      {"torus", suite_torus, always},
      {"unipotent", suite_unipotent, always},
  };
  return defs;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string entry_field(const FiniteField& f, Fq x) {
  const auto c = f.prime_coords(x);
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ':';
    s += std::to_string(c[i]);
  }
  return s;
}

std::string matrix_header() {
  std::string h;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h += (h.empty() ? "" : ",") + std::string("g") + std::to_string(i) + std::to_string(j);
  return h;
}

}  // namespace

bool SuiteReport::pass() const {
  if (skipped) return true;
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

bool RunReport::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.pass(); });
}

json RunReport::to_json(const RunConfig& config) const {
  json j;
  j["schema"] = 1;
  j["q"] = q;
  j["seed"] = config.seed;
  j["convention_header"] = convention_header;
  auto arr = json::array();
  for (const auto& s : suites) {
    json sj;
    sj["name"] = s.name;
    sj["status"] = s.skipped ? "skipped" : (s.pass() ? "pass" : "fail");
    if (s.skipped) sj["skip_reason"] = s.skip_reason;
    auto checks = json::array();
    for (const auto& c : s.checks) {
      checks.push_back({{"name", c.name},
                        {"computed", c.computed},
                        {"expected", c.expected},
                        {"provenance", c.provenance},
                        {"pass", c.pass}});
    }
    sj["checks"] = std::move(checks);
    if (!s.data.is_null()) sj["data"] = s.data;
    if (config.timing) sj["wall_seconds"] = s.wall_seconds;
    arr.push_back(std::move(sj));
  }
  j["suites"] = std::move(arr);
  j["pass"] = pass();
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& d : suite_defs()) n.emplace_back(d.name);
    return n;
  }();
  return names;
}

bool supported_q(int q) {
  if (q < 3 || q > 13 || q % 2 == 0) return false;
  for (int p = 3; p <= q; p += 2) {
    if (!is_prime(p) || q % p != 0) continue;
    int m = q;
    while (m % p == 0) m /= p;
    return m == 1;
  }
  return false;
}

RunConfig normalize(RunConfig config) {
  if (config.q % 2 == 0) throw std::invalid_argument("q = " + std::to_string(config.q) + " is even; q must be odd");
  if (!supported_q(config.q))
    throw std::invalid_argument("q = " + std::to_string(config.q) + " is not an odd prime power in [3, 13]");
  if (config.suites.empty()) throw std::invalid_argument("no suites requested");
  if (config.jobs < 1) throw std::invalid_argument("jobs must be positive");
  std::vector<bool> want(suite_names().size(), false);
  for (const auto& s : config.suites) {
    if (s == "all") {
      std::fill(want.begin(), want.end(), true);
      continue;
    }
    const auto it = std::find(suite_names().begin(), suite_names().end(), s);
    if (it == suite_names().end()) throw std::invalid_argument("unknown suite '" + s + "'");
    want[static_cast<std::size_t>(it - suite_names().begin())] = true;
  }
  config.suites.clear();
  for (std::size_t i = 0; i < want.size(); ++i)
    if (want[i]) config.suites.push_back(suite_names()[i]);
  return config;
}

RunReport run(const RunConfig& raw) {
  const RunConfig config = normalize(raw);
  Context ctx(config);
  RunReport report;
  report.q = config.q;
  report.convention_header = ctx.engine().convention_header();
  for (const auto& def : suite_defs()) {
    if (std::find(config.suites.begin(), config.suites.end(), def.name) == config.suites.end()) continue;
    SuiteReport s;
    s.name = def.name;
    const auto start = std::chrono::steady_clock::now();
    const std::string gate = def.gate(ctx);
    if (!gate.empty()) {
      s.skipped = true;
      s.skip_reason = gate;
    } else {
      def.fn(ctx, s);
    }
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.suites.push_back(std::move(s));
  }
  return report;
}

std::string matrix_csv_fields(const SpGroup& g, const SpMat& m) {
  std::string s;
  for (std::size_t i = 0; i < 16; ++i) s += (i ? "," : "") + entry_field(g.field(), m.e[i]);
  return s;
}

void emit_character_table(std::ostream& os, const SpGroup& g, const ClassPartition& classes, const CharRow& row) {
  if (row.values.size() != classes.classes.size()) throw StructuralError("character row does not match the classes");
  os << matrix_header() << ",class_size,word_length,value_exact,value_decimal\n";
  for (std::size_t i = 0; i < row.values.size(); ++i) {
    const auto& c = classes.classes[i];
    os << matrix_csv_fields(g, c.representative) << ',' << c.size << ',' << c.word.size() << ','
       << csv_quote(to_json(row.values[i]).dump()) << ',' << csv_quote(row.values[i].approx()) << '\n';
  }
}

void emit_character_table(const std::string& path, const SpGroup& g, const ClassPartition& classes, const CharRow& row) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  emit_character_table(os, g, classes, row);
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

void export_subgroup_csv(std::ostream& os, const SpGroup& g, const GroupTable& table) {
  os << matrix_header() << ",word_length\n";
  for (std::size_t i = 0; i < table.size(); ++i)
    os << matrix_csv_fields(g, table.element(i)) << ',' << table.word(i).size() << '\n';
}

void export_class_csv(std::ostream& os, const SpGroup& g, const ClassPartition& classes) {
  os << matrix_header() << ",class_size,word_length\n";
  for (const auto& c : classes.classes)
    os << matrix_csv_fields(g, c.representative) << ',' << c.size << ',' << c.word.size() << '\n';
}

}  // namespace theta10
