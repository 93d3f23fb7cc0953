#include "theta10/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "theta10/parallel.hpp"

namespace theta10 {

namespace {

// Trace of rho(g (x) t) for g in P1 without materializing the operator.
CycNum siegel_trace(const WeilEngine& e, const SpMat& g, int t) {
  const SiegelEvaluator ev = e.siegel_evaluator(g, t);
  std::vector<long> counts(static_cast<std::size_t>(e.p()), 0);
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(e.space().dim()); ++x) {
    const auto [ph, y] = ev.at(x);
    if (y == x) counts[ph.e] += ph.sign;
  }
  return CycNum::from_exponent_counts(e.p(), counts);
}

CycNum eta_any(const WeilEngine& e, const SpMat& g, int t) {
  if (const auto v = e.eta_fast(g, t)) return CycNum(e.p(), static_cast<long>(*v));
  if (in_p1(e.group(), g)) return siegel_trace(e, g, t);
  return e.sp_op(g, t).trace();
}

Rat to_count(const CycNum& v, const char* what) {
  if (!v.is_rational()) throw std::logic_error(std::string(what) + " is not rational: " + v.to_string());
  return v.to_rational();
}

// (1/|U0|) sum_{alpha, lambda} conj(xi_{a,b}) S(alpha, lambda).
Rat fourier_coefficient(const WeilEngine& e, const std::vector<CycNum>& sums, Fq a, Fq b) {
  const auto& f = e.field();
  const int q = e.q();
  CycNum s(e.p());
  for (int alpha = 0; alpha < q; ++alpha) {
    for (int lambda = 0; lambda < q; ++lambda) {
      const Fq arg = f.add(f.mul(a, static_cast<Fq>(alpha)), f.mul(b, static_cast<Fq>(lambda)));
      s += sums[static_cast<std::size_t>(alpha + q * lambda)] * CycNum::zeta_power(e.p(), -static_cast<long>(f.trace(arg)));
    }
  }
  const long order = static_cast<long>(q) * q * q * q;
  return to_count(s * Rat(1, order), "Whittaker multiplicity");
}

}  // namespace

Rat norm_squared(const CharRow& chi, const std::vector<std::uint64_t>& class_sizes, std::uint64_t group_order) {
  return class_inner_product(chi.values, chi.values, class_sizes, group_order).to_rational();
}

Analysis::Analysis(std::shared_ptr<const HoweDecomposition> howe) : howe_(std::move(howe)), delta_(howe_->delta_basis()) {
  w1_minus_ = howe_->split_pm(SOChar::trivial(howe_->q())).second;
  pair_of_point_.assign(static_cast<std::size_t>(engine().space().dim()), UINT32_MAX);
  for (std::uint32_t i = 0; i < delta_.pairs.size(); ++i) {
    for (auto x : delta_.pairs[i].first) pair_of_point_[x] = i;
    for (auto x : delta_.pairs[i].second) pair_of_point_[x] = i;
  }
}

CycNum Analysis::delta_trace(const SpMat& g) const {
  const WeilEngine& e = engine();
  const int p = e.p();
  if (in_p1(e.group(), g)) {
    const SiegelEvaluator ev = e.siegel_evaluator(g, 0);
    std::vector<long> counts(static_cast<std::size_t>(p), 0);
    for (std::size_t i = 0; i < delta_.functions.size(); ++i) {
      const auto [ph, y] = ev.at(delta_.representatives[i]);
      const std::int64_t v = delta_.functions[i][y];
      if (v != 0) counts[ph.e] += ph.sign * v;
    }
    return CycNum::from_exponent_counts(p, counts);
  }
  const WeilOp op = e.sp_op(g, 0);
  CycNum s(p);
  for (std::size_t i = 0; i < delta_.functions.size(); ++i) s += op.apply_at(delta_.functions[i], delta_.representatives[i]);
  return s;
}

CycNum Analysis::theta10(const SpMat& g) const {
  const WeilEngine& e = engine();
  const auto& orth = e.group().tower().orth();
  CycNum s(e.p());
  for (int t = 0; t < orth.order(); ++t) {
    const CycNum v = eta_any(e, g, t);
    if (orth.sign(t) > 0) s += v;
    else s -= v;
  }
  return s * Rat(1, orth.order());
}

CharRow Analysis::theta10_character(const std::vector<SpMat>& elements, int jobs) const {
  CharRow row;
  row.values.resize(elements.size());
  parallel_for(elements.size(), jobs, [&](std::size_t i) { row.values[i] = theta10(elements[i]); });
  return row;
}

Rat Analysis::fixed_subspace(const std::vector<Rat>& coeffs, const std::vector<SpMat>& subgroup, int jobs) const {
  if (subgroup.empty()) throw std::invalid_argument("empty subgroup");
  const WeilEngine& e = engine();
  std::vector<CycNum> part(subgroup.size());
  parallel_for(subgroup.size(), jobs, [&](std::size_t i) {
    CycNum s(e.p());
    for (std::size_t t = 0; t < coeffs.size(); ++t) {
      if (sgn(coeffs[t]) != 0) s += eta_any(e, subgroup[i], static_cast<int>(t)) * coeffs[t];
    }
    part[i] = std::move(s);
  });
  CycNum total(e.p());
  for (const auto& v : part) total += v;
  return to_count(total * Rat(mpz_class(1), mpz_class(std::to_string(subgroup.size()))), "fixed-space dimension");
}

Rat Analysis::fixed_subspace(const IsoComponent& c, const std::vector<SpMat>& subgroup, int jobs) const {
  if (!c.coeffs) throw std::invalid_argument("component has no trace coefficients");
  return fixed_subspace(*c.coeffs, subgroup, jobs);
}

Rat Analysis::fixed_subspace_delta(const std::vector<SpMat>& subgroup) const {
  if (subgroup.empty()) throw std::invalid_argument("empty subgroup");
  CycNum total(engine().p());
  for (const auto& h : subgroup) {
    if (!in_p1(engine().group(), h)) throw std::invalid_argument("delta route needs a subgroup of P1");
    total += delta_trace(h);
  }
  return to_count(total * Rat(mpz_class(1), mpz_class(std::to_string(subgroup.size()))), "fixed-space dimension");
}

std::vector<CycNum> Analysis::u0_trace_sums() const {
  const WeilEngine& e = engine();
  const int q = e.q();
  std::vector<CycNum> sums(static_cast<std::size_t>(q * q), CycNum(e.p()));
  for (const auto& u : subgroup_elements(e.group(), SubgroupLabel::U0).elements) {
    const auto [alpha, lambda] = u0_coordinates(u);
    sums[static_cast<std::size_t>(alpha + q * lambda)] += delta_trace(u);
  }
  return sums;
}

Rat Analysis::whittaker_multiplicity(Fq a, Fq b) const { return fourier_coefficient(engine(), u0_trace_sums(), a, b); }

std::vector<WhittakerEntry> Analysis::whittaker_table() const {
  const auto sums = u0_trace_sums();
  const int q = engine().q();
  std::vector<WhittakerEntry> out;
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      WhittakerEntry w;
      w.a = static_cast<Fq>(a);
      w.b = static_cast<Fq>(b);
      w.nondegenerate = a != 0 && b != 0;
      w.multiplicity = fourier_coefficient(engine(), sums, w.a, w.b);
      out.push_back(w);
    }
  }
  return out;
}

U1Decomposition Analysis::u1_decomposition() const {
  const WeilEngine& e = engine();
  const auto& grp = e.group();
  U1Decomposition r;
  r.d = static_cast<int>(delta_.functions.size());
  const auto u1 = subgroup_elements(grp, SubgroupLabel::U1).elements;
  r.characters.assign(delta_.functions.size(), std::vector<std::uint8_t>(u1.size()));
  r.invariant_lines = true;
  for (std::size_t k = 0; k < u1.size(); ++k) {
    const MonomialOp op = e.unip_op(u1[k]);
    for (std::size_t i = 0; i < delta_.pairs.size(); ++i) {
      const std::uint8_t ei = op.mult(delta_.representatives[i]).e;
      r.characters[i][k] = ei;
      for (const auto* side : {&delta_.pairs[i].first, &delta_.pairs[i].second}) {
        for (auto x : *side) {
          if (op.mult(x).e != ei) r.invariant_lines = false;
        }
      }
    }
  }
  std::vector<std::vector<std::uint8_t>> sorted = r.characters;
  std::sort(sorted.begin(), sorted.end());
  r.distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();

  // M1 permutes the lines <delta_i> up to sign; check transitivity.
  std::vector<std::uint32_t> parent(delta_.pairs.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  bool permutes = true;
  const std::size_t n = static_cast<std::size_t>(e.space().dim());
  for (const auto& m : subgroup_elements(grp, SubgroupLabel::M1).elements) {
    const MonomialOp op = e.levi_op(m, 0);
    for (std::size_t i = 0; i < delta_.functions.size(); ++i) {
      std::vector<std::int64_t> img(n);
      for (std::uint32_t x = 0; x < n; ++x) img[x] = op.mult(x).sign * delta_.functions[i][op.target(x)];
      const std::uint32_t y = act_on_lagrangian(grp, m, delta_.representatives[i]);
      const std::uint32_t j = pair_of_point_[y];
      if (j == UINT32_MAX) {
        permutes = false;
        continue;
      }
      std::vector<std::int64_t> neg = delta_.functions[j];
      for (auto& v : neg) v = -v;
      if (img != delta_.functions[j] && img != neg) permutes = false;
      parent[find(static_cast<std::uint32_t>(i))] = find(j);
    }
  }
  std::size_t roots = 0;
  for (std::uint32_t i = 0; i < parent.size(); ++i) roots += find(i) == i ? 1 : 0;
  r.single_m1_orbit = permutes && roots == 1;
  return r;
}

LittleGroupsReport Analysis::little_groups_check() const {
  const WeilEngine& e = engine();
  const auto& grp = e.group();
  const int q = e.q();
  const int p = e.p();
  LittleGroupsReport r;

  const auto stab = little_stabilizer(grp, howe_->census());
  r.stabilizer_order = stab.size();
  std::unordered_set<std::uint64_t> stab_keys;
  for (const auto& h : stab) stab_keys.insert(grp.key(h));
  const std::uint32_t v1 = delta_.representatives.front();
  const auto& first = delta_.pairs.front().first;
  auto epsilon = [&](const SpMat& h) {
    const std::uint32_t y = act_on_lagrangian(grp, h, v1);
    return std::find(first.begin(), first.end(), y) != first.end() ? 1 : -1;
  };

  // O is dihedral of order 2(q+1) and epsilon is a character of it.
  const std::uint64_t so = static_cast<std::uint64_t>(q + 1);
  r.dihedral = false;
  if (stab.size() == 2 * so) {
    for (const auto& rot : stab) {
      if (grp.order_of(rot) != so) continue;
      std::unordered_set<std::uint64_t> cyc;
      SpMat pw = grp.identity();
      for (std::uint64_t k = 0; k < so; ++k) {
        cyc.insert(grp.key(pw));
        pw = grp.mul(pw, rot);
      }
      bool all_in = true;
      for (auto k : cyc) all_in = all_in && stab_keys.count(k) > 0;
      if (!all_in) continue;
      for (const auto& s : stab) {
        if (cyc.count(grp.key(s))) continue;
        r.dihedral = grp.mul(s, s) == grp.identity() && grp.mul(grp.mul(s, rot), grp.inv(s)) == grp.inv(rot);
        break;
      }
      if (r.dihedral) break;
    }
  }
  r.epsilon_homomorphism = true;
  for (const auto& a : stab)
    for (const auto& b : stab)
      if (epsilon(grp.mul(a, b)) != epsilon(a) * epsilon(b)) r.epsilon_homomorphism = false;

  const GroupTable p1 = generate_group(grp, p1_generators(grp));
  r.p1_order = p1.size();
  r.h_order = r.stabilizer_order * static_cast<std::uint64_t>(q) * q * q;
  r.index = r.h_order == 0 ? 0 : r.p1_order / r.h_order;

  // phi'(h g) = eps(h) phi(g) on H = O U1, zero elsewhere in P1.
  auto phi_prime = [&](const SpMat& z) -> std::optional<Phase> {
    const auto [u, m] = e.siegel_split(z);
    if (!stab_keys.count(grp.key(m))) return std::nullopt;
    const SpMat g = grp.mul(grp.inv(m), z);
    const auto [ph, y] = e.siegel_evaluator(g, 0).at(v1);
    (void)y;
    return Phase{ph.e, static_cast<std::int8_t>(epsilon(m))};
  };

  const ClassPartition classes = conjugacy_classes(grp, p1);
  r.classes = classes.classes.size();
  CharRow theta;
  std::vector<std::uint64_t> sizes;
  const Rat inv_h(mpz_class(1), mpz_class(std::to_string(r.h_order)));
  for (const auto& c : classes.classes) {
    std::vector<long> counts(static_cast<std::size_t>(p), 0);
    for (const auto& y : p1.elements()) {
      const SpMat conj = grp.mul(grp.mul(y, c.representative), grp.inv(y));
      if (const auto ph = phi_prime(conj)) counts[ph->e] += ph->sign;
    }
    const CycNum induced = CycNum::from_exponent_counts(p, counts) * inv_h;
    const CycNum direct = delta_trace(c.representative);
    if (c.representative == grp.identity()) r.induced_at_identity = induced;
    if (induced == direct) ++r.matching_classes;
    theta.values.push_back(direct);
    sizes.push_back(c.size);
  }
  r.norm = norm_squared(theta, sizes, r.p1_order);
  return r;
}

}  // namespace theta10
