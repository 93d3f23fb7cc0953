#include "theta10/howe.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "theta10/parallel.hpp"

namespace theta10 {

std::string SOChar::name() const {
  if (is_trivial()) return "1";
  if (is_nu()) return "nu";
  return "theta" + std::to_string(k % order());
}

HoweDecomposition::HoweDecomposition(std::shared_ptr<const WeilEngine> engine)
    : engine_(std::move(engine)), census_(decomposable_census(engine_->group())) {
  const auto& orth = engine_->group().tower().orth();
  orth_perm_.resize(static_cast<std::size_t>(orth.order()));
  for (int t = 0; t < orth.order(); ++t) orth_perm_[static_cast<std::size_t>(t)] = engine_->orth_op(t).perm();
}

int HoweDecomposition::cycle_dimension(SOChar theta) const {
  const auto& perm = orth_perm_[static_cast<std::size_t>(engine_->group().tower().orth().generator())];
  std::vector<bool> seen(perm.size(), false);
  int dim = 0;
  for (std::uint32_t x = 0; x < perm.size(); ++x) {
    if (seen[x]) continue;
    long len = 0;
    for (std::uint32_t y = x; !seen[y]; y = perm[y]) {
      seen[y] = true;
      ++len;
    }
    if ((static_cast<long>(theta.k) * len) % theta.order() == 0) ++dim;
  }
  return dim;
}

std::vector<Rat> HoweDecomposition::real_coefficients(SOChar theta, int sign) const {
  const int n = theta.order();
  std::vector<Rat> c(static_cast<std::size_t>(2 * n));
  const Rat scale = sign == 0 ? Rat(1, n) : Rat(1, 2 * n);
  for (int j = 0; j < n; ++j) {
    const Rat v = rational_cosine(static_cast<long>(theta.k) * j, n) * scale;
    c[static_cast<std::size_t>(j)] = v;
    if (sign != 0) c[static_cast<std::size_t>(n + j)] = sign > 0 ? v : Rat(-v);
  }
  return c;
}

std::vector<SparseVec> HoweDecomposition::extract_basis(const std::vector<Rat>& coeffs) const {
  const std::size_t n = orth_perm_.front().size();
  std::vector<bool> done(n, false);
  std::vector<SparseVec> basis;
  for (std::uint32_t x0 = 0; x0 < n; ++x0) {
    if (done[x0]) continue;
    std::vector<std::uint32_t> orbit;
    for (const auto& perm : orth_perm_) orbit.push_back(perm[x0]);
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    for (auto y : orbit) done[y] = true;
    const std::size_t m = orbit.size();
    // Rows P delta_y = sum_t c_t delta_{t y}: orth_op(t) delta_y is the indicator of t y.
    std::vector<std::vector<Rat>> rows(m, std::vector<Rat>(m));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t t = 0; t < orth_perm_.size(); ++t) {
        if (sgn(coeffs[t]) == 0) continue;
        const auto& perm = orth_perm_[t];
        for (std::size_t s = 0; s < m; ++s) {
          if (perm[orbit[s]] == orbit[r]) rows[r][s] += coeffs[t];
        }
      }
    }
    // Row reduction with pivots in increasing column order.
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m && rank < m; ++col) {
      std::size_t piv = rank;
      while (piv < m && sgn(rows[piv][col]) == 0) ++piv;
      if (piv == m) continue;
      std::swap(rows[piv], rows[rank]);
      const Rat inv = Rat(1) / rows[rank][col];
      for (auto& v : rows[rank]) v *= inv;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == rank || sgn(rows[r][col]) == 0) continue;
        const Rat fct = rows[r][col];
        for (std::size_t k = col; k < m; ++k) rows[r][k] -= fct * rows[rank][k];
      }
      ++rank;
    }
    for (std::size_t r = 0; r < rank; ++r) {
      SparseVec v;
      for (std::size_t s = 0; s < m; ++s) {
        if (sgn(rows[r][s]) != 0) v.emplace_back(orbit[s], rows[r][s]);
      }
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

IsoComponent HoweDecomposition::isotypic_projector(SOChar theta) const {
  IsoComponent c;
  c.theta = theta;
  c.label = "W_" + theta.name();
  c.dim = cycle_dimension(theta);
  if (theta.is_real()) {
    c.coeffs = real_coefficients(theta, 0);
    c.basis = extract_basis(*c.coeffs);
    if (static_cast<int>(c.basis.size()) != c.dim) throw std::logic_error("basis rank disagrees with the cycle count for " + c.label);
  } else if (cosine_is_rational(theta.k, theta.order())) {
    c.coeffs = real_coefficients(theta, 0);
  }
  return c;
}

std::pair<IsoComponent, IsoComponent> HoweDecomposition::split_pm(SOChar theta) const {
  if (!theta.is_real()) throw std::invalid_argument("Lambda preserves W_theta only for theta in {1, nu}");
  std::pair<IsoComponent, IsoComponent> out;
  for (int sign : {1, -1}) {
    IsoComponent& c = sign > 0 ? out.first : out.second;
    c.theta = theta;
    c.sign = sign;
    c.label = "W_" + theta.name() + (sign > 0 ? "+" : "-");
    c.coeffs = real_coefficients(theta, sign);
    c.basis = extract_basis(*c.coeffs);
    c.dim = static_cast<int>(c.basis.size());
  }
  return out;
}

std::vector<Rat> HoweDecomposition::project(const IsoComponent& c, const std::vector<Rat>& f) const {
  if (!c.coeffs) throw std::invalid_argument("component has no rational projector");
  std::vector<Rat> out(f.size());
  for (std::size_t t = 0; t < orth_perm_.size(); ++t) {
    const Rat& ct = (*c.coeffs)[t];
    if (sgn(ct) == 0) continue;
    const auto& perm = orth_perm_[t];
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (sgn(f[perm[x]]) != 0) out[x] += ct * f[perm[x]];
    }
  }
  return out;
}

std::uint32_t HoweDecomposition::fixed_points(int t) const {
  const auto& perm = orth_perm_[static_cast<std::size_t>(t)];
  std::uint32_t n = 0;
  for (std::uint32_t x = 0; x < perm.size(); ++x) n += perm[x] == x ? 1 : 0;
  return n;
}

Rat HoweDecomposition::lambda_trace(const std::vector<Rat>& coeffs) const {
  const auto& orth = engine_->group().tower().orth();
  Rat s = 0;
  for (int t = 0; t < orth.order(); ++t) {
    if (sgn(coeffs[static_cast<std::size_t>(t)]) == 0) continue;
    s += coeffs[static_cast<std::size_t>(t)] * Rat(fixed_points(orth.mul(orth.sigma(), t)));
  }
  return s;
}

Rat HoweDecomposition::lambda_trace_w() const { return Rat(fixed_points(engine_->group().tower().orth().sigma())); }

DeltaBasis HoweDecomposition::delta_basis() const {
  DeltaBasis d;
  const std::size_t n = orth_perm_.front().size();
  d.pairs = census_.pairs;
  for (const auto& pr : census_.pairs) {
    std::vector<std::int64_t> f(n, 0);
    for (auto x : pr.first) f[x] = 1;
    for (auto x : pr.second) f[x] = -1;
    d.functions.push_back(std::move(f));
    d.representatives.push_back(*std::min_element(pr.first.begin(), pr.first.end()));
  }
  return d;
}

CycNum HoweDecomposition::character(const IsoComponent& c, const SpMat& g) const {
  if (!c.coeffs) throw std::invalid_argument("component " + c.label + " has no rational character coefficients");
  const int p = engine_->p();
  CycNum s(p);
  for (std::size_t t = 0; t < c.coeffs->size(); ++t) {
    const Rat& ct = (*c.coeffs)[t];
    if (sgn(ct) == 0) continue;
    s += engine_->eta(g, static_cast<int>(t)) * ct;
  }
  return s;
}

std::vector<IsoComponent> HoweDecomposition::distinct_components() const {
  std::vector<IsoComponent> out;
  auto [p1, m1] = split_pm(SOChar::trivial(q()));
  auto [pn, mn] = split_pm(SOChar::nu(q()));
  out.push_back(std::move(p1));
  out.push_back(std::move(m1));
  out.push_back(std::move(pn));
  out.push_back(std::move(mn));
  // W_theta and W_{theta^{-1}} are isomorphic through Lambda; keep k < (q+1)/2.
  for (int k = 1; 2 * k < q() + 1; ++k) {
    if (!cosine_is_rational(k, q() + 1)) continue;
    out.push_back(isotypic_projector(SOChar{k, q()}));
  }
  return out;
}

CycNum class_inner_product(const std::vector<CycNum>& a, const std::vector<CycNum>& b,
                           const std::vector<std::uint64_t>& class_sizes, std::uint64_t group_order) {
  if (a.size() != b.size() || a.size() != class_sizes.size()) throw StructuralError("class function length mismatch");
  if (a.empty()) throw StructuralError("empty class function");
  CycNum s(a.front().conductor());
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i].conj() * Rat(mpz_class(std::to_string(class_sizes[i])));
  }
  return s * Rat(mpz_class(1), mpz_class(std::to_string(group_order)));
}

GramResult HoweDecomposition::multiplicity_gram(const ClassPartition& classes, std::uint64_t group_order, int jobs) const {
  const auto comps = distinct_components();
  const std::size_t nc = classes.classes.size();
  const std::size_t nk = comps.size();
  const int so = q() + 1;
  // eta(g_C, t) for all classes and all t, then the component characters.
  std::vector<std::vector<CycNum>> eta(nc);
  parallel_for(nc, jobs, [&](std::size_t i) {
    std::vector<CycNum> row;
    for (int t = 0; t < 2 * so; ++t) row.push_back(engine_->eta(classes.classes[i].representative, t));
    eta[i] = std::move(row);
  });
  std::vector<std::uint64_t> sizes;
  for (const auto& c : classes.classes) sizes.push_back(c.size);
  std::vector<std::vector<CycNum>> chars(nk, std::vector<CycNum>(nc));
  std::vector<CycNum> weil(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    weil[i] = eta[i][0];
    for (std::size_t k = 0; k < nk; ++k) {
      CycNum s(engine_->p());
      for (int t = 0; t < 2 * so; ++t) {
        const Rat& ct = (*comps[k].coeffs)[static_cast<std::size_t>(t)];
        if (sgn(ct) != 0) s += eta[i][static_cast<std::size_t>(t)] * ct;
      }
      chars[k][i] = std::move(s);
    }
  }
  GramResult r;
  r.identity = true;
  for (const auto& c : comps) r.labels.push_back(c.label);
  r.gram.assign(nk, std::vector<Rat>(nk));
  for (std::size_t a = 0; a < nk; ++a) {
    for (std::size_t b = 0; b < nk; ++b) {
      const CycNum ip = class_inner_product(chars[a], chars[b], sizes, group_order);
      if (!ip.is_rational()) {
        r.identity = false;
        continue;
      }
      r.gram[a][b] = ip.to_rational();
      if (r.gram[a][b] != (a == b ? 1 : 0)) r.identity = false;
    }
  }
  r.weil_norm = class_inner_product(weil, weil, sizes, group_order).to_rational();
  return r;
}

nlohmann::ordered_json HoweDecomposition::dimension_table() const {
  const int qq = q();
  nlohmann::ordered_json j;
  j["q"] = qq;
  auto comps = nlohmann::ordered_json::array();
  auto add = [&](const std::string& label, long computed, long formula) {
    comps.push_back({{"label", label}, {"dim_computed", computed}, {"dim_formula", formula}, {"pass", computed == formula}});
  };
  const auto w1 = isotypic_projector(SOChar::trivial(qq));
  const auto [w1p, w1m] = split_pm(SOChar::trivial(qq));
  const auto [wnp, wnm] = split_pm(SOChar::nu(qq));
  add("W_1", w1.dim, DimensionFormulas::w1(qq));
  add("W_1+", w1p.dim, DimensionFormulas::w1_plus(qq));
  add("W_1-", w1m.dim, DimensionFormulas::w1_minus(qq));
  add("W_nu+", wnp.dim, DimensionFormulas::wnu_pm(qq));
  add("W_nu-", wnm.dim, DimensionFormulas::wnu_pm(qq));
  long total = w1.dim;
  for (int k = 1; k <= qq; ++k) {
    const SOChar th{k, qq};
    const int d = cycle_dimension(th);
    total += d;
    if (th.is_nu()) add("W_nu", d, 2 * DimensionFormulas::wnu_pm(qq));
    else add("W_" + th.name(), d, DimensionFormulas::wtheta(qq));
  }
  add("sum", total, static_cast<long>(qq) * qq * qq * qq);
  j["components"] = std::move(comps);
  return j;
}

}  // namespace theta10
