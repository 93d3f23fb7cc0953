#include "theta10/sympgrp.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "theta10/cyclo.hpp"

namespace theta10 {

namespace {

using Row = std::vector<Fq>;

// Reduces m to reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(std::vector<Row>& m, const FiniteField& f) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  const int cols = static_cast<int>(m[0].size());
  std::size_t r = 0;
  for (int c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && m[piv][static_cast<std::size_t>(c)] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[r]);
    const Fq inv = f.inv(m[r][static_cast<std::size_t>(c)]);
    for (auto& x : m[r]) x = f.mul(x, inv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r) continue;
      const Fq factor = m[i][static_cast<std::size_t>(c)];
      if (factor == 0) continue;
      for (int k = 0; k < cols; ++k) {
        m[i][static_cast<std::size_t>(k)] = f.sub(m[i][static_cast<std::size_t>(k)], f.mul(factor, m[r][static_cast<std::size_t>(k)]));
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<Row> nullspace(std::vector<Row> m, int cols, const FiniteField& f) {
  const auto pivots = rref(m, f);
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;
  std::vector<Row> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    Row v(static_cast<std::size_t>(cols), 0);
    v[static_cast<std::size_t>(free)] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      v[static_cast<std::size_t>(pivots[r])] = f.neg(m[r][static_cast<std::size_t>(free)]);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

Fq det4(std::array<Fq, 16> a, const FiniteField& f) {
  Fq det = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    while (piv < 4 && a[static_cast<std::size_t>(4 * piv + c)] == 0) ++piv;
    if (piv == 4) return 0;
    if (piv != c) {
      for (int k = 0; k < 4; ++k) std::swap(a[static_cast<std::size_t>(4 * piv + k)], a[static_cast<std::size_t>(4 * c + k)]);
      det = f.neg(det);
    }
    const Fq pv = a[static_cast<std::size_t>(4 * c + c)];
    det = f.mul(det, pv);
    const Fq inv = f.inv(pv);
    for (int r = c + 1; r < 4; ++r) {
      const Fq factor = f.mul(a[static_cast<std::size_t>(4 * r + c)], inv);
      if (factor == 0) continue;
      for (int k = c; k < 4; ++k) {
        a[static_cast<std::size_t>(4 * r + k)] = f.sub(a[static_cast<std::size_t>(4 * r + k)], f.mul(factor, a[static_cast<std::size_t>(4 * c + k)]));
      }
    }
  }
  return det;
}

// Plain 4x4 products and inverse, without the symplectic check.
SpMat raw_mul(const SpMat& a, const SpMat& b, const FiniteField& f) {
  SpMat c;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Fq s = 0;
      for (int k = 0; k < 4; ++k) s = f.add(s, f.mul(a.at(i, k), b.at(k, j)));
      c.at(i, j) = s;
    }
  }
  return c;
}

SpMat raw_inv(const SpMat& a, const FiniteField& f) {
  std::vector<Row> m(4, Row(8, 0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a.at(i, j);
    m[static_cast<std::size_t>(i)][static_cast<std::size_t>(4 + i)] = 1;
  }
  const auto pivots = rref(m, f);
  if (pivots.size() < 4 || pivots[3] != 3) throw std::domain_error("singular 4x4 matrix");
  SpMat out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.at(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(4 + j)];
  }
  return out;
}

Fq bilinear(const std::array<Fq, 16>& m, const Vec4& x, const Vec4& y, const FiniteField& f) {
  Fq s = 0;
  for (int i = 0; i < 4; ++i) {
    if (x[static_cast<std::size_t>(i)] == 0) continue;
    for (int j = 0; j < 4; ++j) {
      s = f.add(s, f.mul(x[static_cast<std::size_t>(i)], f.mul(m[static_cast<std::size_t>(4 * i + j)], y[static_cast<std::size_t>(j)])));
    }
  }
  return s;
}

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Labels

std::string label_name(SubgroupLabel l) {
  switch (l) {
    case SubgroupLabel::B0: return "B0";
    case SubgroupLabel::U0: return "U0";
    case SubgroupLabel::P1: return "P1";
    case SubgroupLabel::U1: return "U1";
    case SubgroupLabel::M1: return "M1";
    case SubgroupLabel::P2: return "P2";
    case SubgroupLabel::U2: return "U2";
    case SubgroupLabel::U0Prime: return "U0'";
    case SubgroupLabel::U0DoublePrime: return "U0''";
    case SubgroupLabel::T0: return "T0";
    case SubgroupLabel::TAniso: return "T_aniso";
    case SubgroupLabel::OLittle: return "O_little";
  }
  return "?";
}

std::optional<SubgroupLabel> label_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(SubgroupLabel::OLittle); ++i) {
    const auto l = static_cast<SubgroupLabel>(i);
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

std::string root_name(Root r) {
  static const char* names[] = {"U_r1", "U_r2", "U_r3", "U_r4", "U_-r1", "U_-r2", "U_-r3", "U_-r4"};
  return names[static_cast<int>(r)];
}

// ---------------------------------------------------------------------------
// TensorPoint

TensorPoint TensorPoint::from_vectors(const Vec4& w1, const Vec4& w2) {
  TensorPoint t;
  for (int i = 0; i < 4; ++i) {
    t.c[static_cast<std::size_t>(2 * i)] = w1[static_cast<std::size_t>(i)];
    t.c[static_cast<std::size_t>(2 * i + 1)] = w2[static_cast<std::size_t>(i)];
  }
  return t;
}

std::pair<Vec4, Vec4> TensorPoint::vectors() const {
  Vec4 w1{}, w2{};
  for (int i = 0; i < 4; ++i) {
    w1[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(2 * i)];
    w2[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(2 * i + 1)];
  }
  return {w1, w2};
}

TensorPoint TensorPoint::from_lagrangian(const QuadSpace& e, EIdx x3, EIdx x4) {
  TensorPoint t;
  t.c[4] = e.coord_a(x3);
  t.c[5] = e.coord_b(x3);
  t.c[6] = e.coord_a(x4);
  t.c[7] = e.coord_b(x4);
  return t;
}

std::pair<EIdx, EIdx> TensorPoint::lagrangian_coords(const QuadSpace& e) const {
  if (!in_lagrangian_dual()) throw StructuralError("tensor point has a nonzero L (x) E component");
  return {e.from_coords(c[4], c[5]), e.from_coords(c[6], c[7])};
}

// ---------------------------------------------------------------------------
// SpGroup

SpGroup::SpGroup(std::shared_ptr<const FieldTower> tower) : tower_(std::move(tower)) {
  const auto g = gram_matrix();
  const auto& f = field();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) gram_.at(i, j) = f.from_int(g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  }
}

std::array<std::array<int, 4>, 4> gram_matrix() {
  return {{{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}}};
}

SpMat SpGroup::identity() const {
  SpMat m;
  for (int i = 0; i < 4; ++i) m.at(i, i) = 1;
  return m;
}

SpMat SpGroup::minus_identity() const {
  SpMat m;
  for (int i = 0; i < 4; ++i) m.at(i, i) = field().neg(1);
  return m;
}

bool SpGroup::is_symplectic(const SpMat& g) const {
  const auto& f = field();
  // (g^T J g)_{ij} = sum_{k,l} g_{ki} J_{kl} g_{lj}
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Fq s = 0;
      for (int k = 0; k < 4; ++k) {
        const int l = 3 - k;
        s = f.add(s, f.mul(g.at(k, i), f.mul(gram_.at(k, l), g.at(l, j))));
      }
      if (s != gram_.at(i, j)) return false;
    }
  }
  return true;
}

SpMat SpGroup::make(const std::array<Fq, 16>& entries) const {
  SpMat m;
  m.e = entries;
  for (Fq x : entries) {
    if (x >= q()) throw StructuralError("matrix entry outside F_q");
  }
  if (!is_symplectic(m)) throw StructuralError("matrix does not preserve J");
  return m;
}

SpMat SpGroup::make_from_ints(const std::array<long, 16>& entries) const {
  std::array<Fq, 16> e{};
  for (std::size_t i = 0; i < 16; ++i) e[i] = field().from_int(entries[i]);
  return make(e);
}

SpMat SpGroup::mul(const SpMat& a, const SpMat& b) const { return raw_mul(a, b, field()); }

SpMat SpGroup::transpose(const SpMat& g) const {
  SpMat t;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) t.at(i, j) = g.at(j, i);
  }
  return t;
}

SpMat SpGroup::inv(const SpMat& g) const {
  // g^{-1} = J^{-1} g^T J with J^{-1} = -J.
  const auto& f = field();
  SpMat minus_j;
  for (std::size_t i = 0; i < 16; ++i) minus_j.e[i] = f.neg(gram_.e[i]);
  return raw_mul(raw_mul(minus_j, transpose(g), f), gram_, f);
}

Vec4 SpGroup::apply(const SpMat& g, const Vec4& v) const {
  const auto& f = field();
  Vec4 out{};
  for (int i = 0; i < 4; ++i) {
    Fq s = 0;
    for (int j = 0; j < 4; ++j) s = f.add(s, f.mul(g.at(i, j), v[static_cast<std::size_t>(j)]));
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

Vec8 SpGroup::apply_tensor(const SpMat& g, const Vec8& u) const {
  const auto& f = field();
  Vec8 out{};
  for (int i = 0; i < 4; ++i) {
    for (int a = 0; a < 2; ++a) {
      Fq s = 0;
      for (int j = 0; j < 4; ++j) s = f.add(s, f.mul(g.at(i, j), u[static_cast<std::size_t>(2 * j + a)]));
      out[static_cast<std::size_t>(2 * i + a)] = s;
    }
  }
  return out;
}

Fq SpGroup::form(const Vec4& v, const Vec4& w) const { return bilinear(gram_.e, v, w, field()); }

Fq SpGroup::det(const SpMat& g) const { return det4(g.e, field()); }

Fq SpGroup::det_shift(const SpMat& g, Fq lambda) const {
  auto a = g.e;
  for (int i = 0; i < 4; ++i) a[static_cast<std::size_t>(5 * i)] = field().sub(a[static_cast<std::size_t>(5 * i)], lambda);
  return det4(a, field());
}

std::uint64_t SpGroup::order_of(const SpMat& g) const {
  const SpMat one = identity();
  SpMat x = g;
  for (std::uint64_t n = 1; n <= 100'000'000; ++n) {
    if (x == one) return n;
    x = mul(x, g);
  }
  throw std::logic_error("element order exceeds search bound");
}

std::uint64_t SpGroup::key(const SpMat& g) const {
  if (q() > 13) throw std::domain_error("matrix keys require q <= 13");
  std::uint64_t k = 0;
  for (std::size_t i = 16; i-- > 0;) k = k * static_cast<std::uint64_t>(q()) + g.e[i];
  return k;
}

SpMat SpGroup::from_key(std::uint64_t k) const {
  SpMat m;
  for (std::size_t i = 0; i < 16; ++i) {
    m.e[i] = static_cast<Fq>(k % static_cast<std::uint64_t>(q()));
    k /= static_cast<std::uint64_t>(q());
  }
  return m;
}

SpMat SpGroup::s1() const {
  return make_from_ints({0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
}

SpMat SpGroup::s2() const {
  return make_from_ints({1, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 1});
}

SpMat SpGroup::w_long() const { return mul(mul(s2(), s1()), s2()); }

std::uint64_t SpGroup::order() const {
  const std::uint64_t q1 = static_cast<std::uint64_t>(q());
  const std::uint64_t q2 = q1 * q1;
  return q2 * q2 * (q2 - 1) * (q2 * q2 - 1);
}

// ---------------------------------------------------------------------------
// Subgroups

SpMat root_subgroup(const SpGroup& g, Root r, Fq x) {
  const auto& f = g.field();
  SpMat m = g.identity();
  switch (r) {
    case Root::R1:
    case Root::NegR1:
      m.at(0, 1) = f.neg(x);
      m.at(2, 3) = x;
      break;
    case Root::R2:
    case Root::NegR2:
      m.at(1, 2) = x;
      break;
    case Root::R3:
    case Root::NegR3:
      m.at(0, 2) = x;
      m.at(1, 3) = x;
      break;
    case Root::R4:
    case Root::NegR4:
      m.at(0, 3) = x;
      break;
  }
  if (static_cast<int>(r) >= static_cast<int>(Root::NegR1)) m = g.transpose(m);
  return g.make(m.e);
}

SpMat u0_element(const SpGroup& g, Fq lambda, Fq alpha, Fq mu, Fq beta) {
  const auto& f = g.field();
  SpMat m = g.identity();
  m.at(0, 1) = f.neg(alpha);
  m.at(0, 2) = beta;
  m.at(0, 3) = mu;
  m.at(1, 2) = lambda;
  m.at(1, 3) = f.add(f.mul(lambda, alpha), beta);
  m.at(2, 3) = alpha;
  return g.make(m.e);
}

SpMat t0_element(const SpGroup& g, Fq a, Fq b) {
  const auto& f = g.field();
  SpMat m;
  m.at(0, 0) = a;
  m.at(1, 1) = b;
  m.at(2, 2) = f.inv(b);
  m.at(3, 3) = f.inv(a);
  return g.make(m.e);
}

SpMat m1_element(const SpGroup& g, const std::array<Fq, 4>& a) {
  const auto& f = g.field();
  const Fq det = f.sub(f.mul(a[0], a[3]), f.mul(a[1], a[2]));
  if (det == 0) throw StructuralError("Levi block must be invertible");
  const Fq di = f.inv(det);
  // A^{-1} = det^{-1} [[a3, -a1], [-a2, a0]];  D = K A^{-T} K.
  const std::array<Fq, 4> ainv = {f.mul(di, a[3]), f.mul(di, f.neg(a[1])), f.mul(di, f.neg(a[2])), f.mul(di, a[0])};
  // (A^{-T})_{ij} = ainv_{ji}; (K X K)_{ij} = X_{1-i, 1-j}.
  SpMat m;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m.at(i, j) = a[static_cast<std::size_t>(2 * i + j)];
      const int ii = 1 - i, jj = 1 - j;
      m.at(2 + i, 2 + j) = ainv[static_cast<std::size_t>(2 * jj + ii)];
    }
  }
  return g.make(m.e);
}

std::vector<SpMat> root_subgroup_elements(const SpGroup& g, Root r) {
  std::vector<SpMat> out;
  for (int x = 0; x < g.q(); ++x) out.push_back(root_subgroup(g, r, static_cast<Fq>(x)));
  return out;
}

bool in_u1(const SpGroup& g, const SpMat& m) {
  (void)g;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Fq expect = i == j ? 1 : 0;
      const bool free = i < 2 && j >= 2;
      if (!free && m.at(i, j) != expect) return false;
    }
  }
  return true;
}

bool in_p1(const SpGroup& g, const SpMat& m) {
  (void)g;
  return m.at(2, 0) == 0 && m.at(2, 1) == 0 && m.at(3, 0) == 0 && m.at(3, 1) == 0;
}

BilForm3 u1_bilinear_bridge(const SpGroup& g, const SpMat& m) {
  if (!in_u1(g, m) || !g.is_symplectic(m)) throw StructuralError("element is not in U1");
  const auto& f = g.field();
  auto col = [&](int j) {
    Vec4 v{};
    for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = f.sub(m.at(i, j), i == j ? 1 : 0);
    return v;
  };
  const Vec4 v3 = {0, 0, 1, 0}, v4 = {0, 0, 0, 1};
  BilForm3 b;
  b.a33 = g.form(col(2), v3);
  b.a34 = g.form(col(2), v4);
  b.a44 = g.form(col(3), v4);
  if (g.form(col(3), v3) != b.a34) throw StructuralError("bridge form is not symmetric");
  return b;
}

SpMat u1_from_form(const SpGroup& g, const BilForm3& b) {
  SpMat m = g.identity();
  m.at(0, 2) = b.a34;
  m.at(0, 3) = b.a44;
  m.at(1, 2) = b.a33;
  m.at(1, 3) = b.a34;
  return g.make(m.e);
}

std::vector<SpMat> b0_generators(const SpGroup& g) {
  std::vector<SpMat> gens;
  const auto basis = g.field().prime_basis();
  for (Root r : {Root::R1, Root::R2, Root::R3, Root::R4}) {
    for (Fq x : basis) gens.push_back(root_subgroup(g, r, x));
  }
  const Fq pr = g.field().primitive();
  gens.push_back(t0_element(g, pr, 1));
  gens.push_back(t0_element(g, 1, pr));
  return gens;
}

std::vector<SpMat> p1_generators(const SpGroup& g) {
  auto gens = b0_generators(g);
  for (Fq x : g.field().prime_basis()) gens.push_back(root_subgroup(g, Root::NegR1, x));
  gens.push_back(g.s1());
  return gens;
}

std::vector<SpMat> standard_generators(const SpGroup& g) {
  std::vector<SpMat> gens;
  const auto basis = g.field().prime_basis();
  for (Root r : {Root::R1, Root::R2, Root::R3, Root::R4, Root::NegR1, Root::NegR2, Root::NegR3, Root::NegR4}) {
    for (Fq x : basis) gens.push_back(root_subgroup(g, r, x));
  }
  const Fq pr = g.field().primitive();
  gens.push_back(t0_element(g, pr, 1));
  gens.push_back(t0_element(g, 1, pr));
  gens.push_back(g.s1());
  gens.push_back(g.s2());
  return gens;
}

SubgroupSpec subgroup_elements(const SpGroup& g, SubgroupLabel label) {
  const int q = g.q();
  const auto& f = g.field();
  SubgroupSpec spec{label, {}};
  auto& out = spec.elements;
  switch (label) {
    case SubgroupLabel::U0:
      for (int l = 0; l < q; ++l)
        for (int a = 0; a < q; ++a)
          for (int m = 0; m < q; ++m)
            for (int b = 0; b < q; ++b)
              out.push_back(u0_element(g, static_cast<Fq>(l), static_cast<Fq>(a), static_cast<Fq>(m), static_cast<Fq>(b)));
      break;
    case SubgroupLabel::U1:
      for (int l = 0; l < q; ++l)
        for (int m = 0; m < q; ++m)
          for (int b = 0; b < q; ++b)
            out.push_back(u1_from_form(g, BilForm3{static_cast<Fq>(l), static_cast<Fq>(b), static_cast<Fq>(m)}));
      break;
    case SubgroupLabel::U2:
      for (int a = 0; a < q; ++a)
        for (int m = 0; m < q; ++m)
          for (int b = 0; b < q; ++b)
            out.push_back(u0_element(g, 0, static_cast<Fq>(a), static_cast<Fq>(m), static_cast<Fq>(b)));
      break;
    case SubgroupLabel::U0Prime:
      for (int m = 0; m < q; ++m)
        for (int b = 0; b < q; ++b) out.push_back(u0_element(g, 0, 0, static_cast<Fq>(m), static_cast<Fq>(b)));
      break;
    case SubgroupLabel::U0DoublePrime:
      for (int m = 0; m < q; ++m) out.push_back(u0_element(g, 0, 0, static_cast<Fq>(m), 0));
      break;
    case SubgroupLabel::T0:
      for (int a = 1; a < q; ++a)
        for (int b = 1; b < q; ++b) out.push_back(t0_element(g, static_cast<Fq>(a), static_cast<Fq>(b)));
      break;
    case SubgroupLabel::B0: {
      const auto t = subgroup_elements(g, SubgroupLabel::T0).elements;
      const auto u = subgroup_elements(g, SubgroupLabel::U0).elements;
      for (const auto& x : t)
        for (const auto& y : u) out.push_back(g.mul(x, y));
      break;
    }
    case SubgroupLabel::M1:
      for (int a0 = 0; a0 < q; ++a0)
        for (int a1 = 0; a1 < q; ++a1)
          for (int a2 = 0; a2 < q; ++a2)
            for (int a3 = 0; a3 < q; ++a3) {
              const std::array<Fq, 4> a = {static_cast<Fq>(a0), static_cast<Fq>(a1), static_cast<Fq>(a2), static_cast<Fq>(a3)};
              if (f.sub(f.mul(a[0], a[3]), f.mul(a[1], a[2])) == 0) continue;
              out.push_back(m1_element(g, a));
            }
      break;
    case SubgroupLabel::P1: {
      const auto m = subgroup_elements(g, SubgroupLabel::M1).elements;
      const auto u = subgroup_elements(g, SubgroupLabel::U1).elements;
      for (const auto& x : m)
        for (const auto& y : u) out.push_back(g.mul(x, y));
      break;
    }
    case SubgroupLabel::P2: {
      auto gens = b0_generators(g);
      gens.push_back(g.s2());
      out = generate_group(g, gens).elements();
      break;
    }
    case SubgroupLabel::TAniso:
      out = anisotropic_torus(g).elements;
      break;
    case SubgroupLabel::OLittle:
      out = little_stabilizer(g, decomposable_census(g));
      break;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Enumeration

std::optional<std::uint32_t> GroupTable::find(const SpGroup& g, const SpMat& m) const {
  auto it = index_.find(g.key(m));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> GroupTable::word(std::size_t i) const {
  std::vector<int> w;
  while (via_[i] >= 0) {
    w.push_back(via_[i]);
    i = parent_[i];
  }
  std::reverse(w.begin(), w.end());
  return w;
}

GroupTable generate_group(const SpGroup& g, const std::vector<SpMat>& generators, std::size_t max_elements) {
  if (generators.size() > 127) throw std::invalid_argument("too many generators");
  GroupTable t;
  t.gens_ = generators;
  const SpMat one = g.identity();
  t.elems_.push_back(one);
  t.parent_.push_back(0);
  t.via_.push_back(-1);
  t.index_.emplace(g.key(one), 0);
  for (std::size_t head = 0; head < t.elems_.size(); ++head) {
    for (std::size_t k = 0; k < generators.size(); ++k) {
      SpMat x = g.mul(t.elems_[head], generators[k]);
      const auto key = g.key(x);
      if (t.index_.count(key)) continue;
      if (t.elems_.size() >= max_elements) throw std::length_error("group enumeration exceeded its element budget");
      t.index_.emplace(key, static_cast<std::uint32_t>(t.elems_.size()));
      t.elems_.push_back(x);
      t.parent_.push_back(static_cast<std::uint32_t>(head));
      t.via_.push_back(static_cast<std::int8_t>(k));
    }
  }
  return t;
}

ClassPartition conjugacy_classes(const SpGroup& g, const GroupTable& table) {
  const std::uint32_t none = UINT32_MAX;
  ClassPartition part;
  part.class_of.assign(table.size(), none);
  std::vector<SpMat> gens = table.generators();
  std::vector<SpMat> gens_inv;
  for (const auto& s : gens) gens_inv.push_back(g.inv(s));
  std::vector<std::uint32_t> stack;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (part.class_of[i] != none) continue;
    const auto cid = static_cast<std::uint32_t>(part.classes.size());
    ClassRecord rec;
    rec.representative = table.element(i);
    rec.rep_index = static_cast<std::uint32_t>(i);
    rec.word = table.word(i);
    part.class_of[i] = cid;
    stack.assign(1, static_cast<std::uint32_t>(i));
    std::uint64_t size = 0;
    while (!stack.empty()) {
      const std::uint32_t x = stack.back();
      stack.pop_back();
      ++size;
      for (std::size_t k = 0; k < gens.size(); ++k) {
        const SpMat y = g.mul(g.mul(gens[k], table.element(x)), gens_inv[k]);
        const auto j = table.find(g, y);
        if (!j) throw StructuralError("conjugate left the enumerated group");
        if (part.class_of[*j] == none) {
          part.class_of[*j] = cid;
          stack.push_back(*j);
        }
      }
    }
    rec.size = size;
    part.classes.push_back(std::move(rec));
  }
  return part;
}

// ---------------------------------------------------------------------------
// Anisotropic torus

AnisotropicTorus anisotropic_torus(const SpGroup& g) {
  const auto& tower = g.tower();
  const auto& f = g.field();
  const int q = g.q();
  AnisotropicTorus out;
  out.zeta = torus_eigenvalue(tower);
  out.minimal_polynomial = minimal_polynomial(tower, out.zeta.code());
  if (out.minimal_polynomial.size() != 5) throw std::logic_error("minimal polynomial of zeta must have degree 4");

  SpMat c;
  for (int i = 1; i < 4; ++i) c.at(i, i - 1) = 1;
  for (int i = 0; i < 4; ++i) c.at(i, 3) = f.neg(out.minimal_polynomial[static_cast<std::size_t>(i)]);
  out.companion = c;

  // Unknowns m_ij (i < j) of a skew form M; equations C^T M C = M.
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) slots.emplace_back(i, j);
  std::vector<Row> eqs;
  for (const auto& [a, b] : slots) {
    Row row(slots.size(), 0);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto [i, j] = slots[s];
      Fq coef = f.sub(f.mul(c.at(i, a), c.at(j, b)), f.mul(c.at(j, a), c.at(i, b)));
      if (i == a && j == b) coef = f.sub(coef, 1);
      row[s] = coef;
    }
    eqs.push_back(std::move(row));
  }
  const auto basis = nullspace(eqs, static_cast<int>(slots.size()), f);
  if (basis.empty()) throw std::logic_error("companion matrix preserves no skew form");

  auto form_from = [&](const Row& v) {
    std::array<Fq, 16> m{};
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto [i, j] = slots[s];
      m[static_cast<std::size_t>(4 * i + j)] = v[s];
      m[static_cast<std::size_t>(4 * j + i)] = f.neg(v[s]);
    }
    return m;
  };
  std::optional<std::array<Fq, 16>> chosen;
  std::uint64_t combos = 1;
  for (std::size_t i = 0; i < basis.size(); ++i) combos *= static_cast<std::uint64_t>(q);
  for (std::uint64_t n = 1; n < combos && !chosen; ++n) {
    Row v(slots.size(), 0);
    std::uint64_t m = n;
    for (std::size_t b = basis.size(); b-- > 0;) {
      const Fq coef = static_cast<Fq>(m % static_cast<std::uint64_t>(q));
      m /= static_cast<std::uint64_t>(q);
      for (std::size_t s = 0; s < slots.size(); ++s) v[s] = f.add(v[s], f.mul(coef, basis[b][s]));
    }
    const auto mat = form_from(v);
    if (det4(mat, f) != 0) chosen = mat;
  }
  if (!chosen) throw std::logic_error("no nondegenerate invariant skew form");
  out.invariant_form = *chosen;
  const auto& mform = *chosen;

  auto std_vec = [](int i) {
    Vec4 v{};
    v[static_cast<std::size_t>(i)] = 1;
    return v;
  };
  auto axpy = [&](Vec4 v, Fq s, const Vec4& w) {
    for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = f.add(v[static_cast<std::size_t>(i)], f.mul(s, w[static_cast<std::size_t>(i)]));
    return v;
  };
  auto scaled = [&](Vec4 v, Fq s) {
    for (auto& x : v) x = f.mul(x, s);
    return v;
  };
  auto mf = [&](const Vec4& x, const Vec4& y) { return bilinear(mform, x, y, f); };

  const Vec4 b1 = std_vec(0);
  Vec4 b4{};
  for (int j = 0; j < 4; ++j) {
    const Fq s = mf(b1, std_vec(j));
    if (s != 0) {
      b4 = scaled(std_vec(j), f.inv(s));
      break;
    }
  }
  auto project = [&](const Vec4& w) { return axpy(axpy(w, mf(b4, w), b1), f.neg(mf(b1, w)), b4); };
  Vec4 b2{}, b3{};
  bool have2 = false;
  for (int j = 0; j < 4 && !have2; ++j) {
    const Vec4 w = project(std_vec(j));
    if (w != Vec4{}) {
      b2 = w;
      have2 = true;
    }
  }
  bool have3 = false;
  for (int j = 0; j < 4 && !have3; ++j) {
    const Vec4 w = project(std_vec(j));
    const Fq s = mf(b2, w);
    if (s != 0) {
      b3 = scaled(w, f.inv(s));
      have3 = true;
    }
  }
  if (!have2 || !have3) throw std::logic_error("symplectic basis construction failed");
  SpMat p;
  const std::array<Vec4, 4> cols = {b1, b2, b3, b4};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) p.at(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (mf(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]) != g.gram().at(i, j))
        throw std::logic_error("symplectic basis does not realize J");
  out.basis_change = p;
  out.generator = g.make(raw_mul(raw_mul(raw_inv(p, f), c, f), p, f).e);

  const std::uint64_t n = static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q) + 1;
  SpMat x = g.identity();
  for (std::uint64_t j = 0; j < n; ++j) {
    if (j > 0 && x == g.identity()) throw std::logic_error("torus generator has order below q^2 + 1");
    out.elements.push_back(x);
    x = g.mul(x, out.generator);
  }
  if (!(x == g.identity())) throw std::logic_error("torus generator order is not q^2 + 1");
  return out;
}

// ---------------------------------------------------------------------------
// Orbits on V (x) E

std::uint64_t orbit_count_tensor(const SpGroup& g) {
  const int q = g.q();
  const auto gens = standard_generators(g);
  std::uint64_t n64 = 1;
  for (int i = 0; i < 8; ++i) n64 *= static_cast<std::uint64_t>(q);
  if (n64 > UINT32_MAX) throw std::domain_error("V (x) E too large for orbit counting");
  const auto n = static_cast<std::uint32_t>(n64);
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  Vec8 u{};
  for (std::uint32_t x = 0; x < n; ++x) {
    std::uint32_t m = x;
    for (int i = 0; i < 8; ++i) {
      u[static_cast<std::size_t>(i)] = static_cast<Fq>(m % static_cast<std::uint32_t>(q));
      m /= static_cast<std::uint32_t>(q);
    }
    for (const auto& s : gens) {
      const Vec8 v = g.apply_tensor(s, u);
      std::uint32_t y = 0;
      for (int i = 8; i-- > 0;) y = y * static_cast<std::uint32_t>(q) + v[static_cast<std::size_t>(i)];
      const std::uint32_t a = find_root(parent, x), b = find_root(parent, y);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::uint64_t roots = 0;
  for (std::uint32_t x = 0; x < n; ++x) roots += find_root(parent, x) == x ? 1 : 0;
  return roots;
}

std::uint32_t act_on_lagrangian(const SpGroup& g, const SpMat& m, std::uint32_t x) {
  const auto& e = g.tower().e_space();
  const auto n2 = static_cast<std::uint32_t>(e.size());
  const auto pt = TensorPoint::from_lagrangian(e, static_cast<EIdx>(x % n2), static_cast<EIdx>(x / n2));
  TensorPoint img;
  img.c = g.apply_tensor(m, pt.c);
  const auto [x3, x4] = img.lagrangian_coords(e);
  return lagrangian_index(g.q(), x3, x4);
}

DecomposableCensus decomposable_census(const SpGroup& g) {
  const auto& e = g.tower().e_space();
  const auto& o = g.tower().orth();
  const auto& f = g.field();
  const int q = g.q();
  const auto n2 = static_cast<std::uint32_t>(q * q);
  const std::uint32_t n = n2 * n2;
  DecomposableCensus c;
  c.is_decomposable.assign(n, false);
  for (std::uint32_t x = 0; x < n; ++x) {
    const auto x3 = static_cast<EIdx>(x % n2), x4 = static_cast<EIdx>(x / n2);
    const Fq det = f.sub(f.mul(e.coord_a(x3), e.coord_b(x4)), f.mul(e.coord_a(x4), e.coord_b(x3)));
    if (det == 0) {
      c.is_decomposable[x] = true;
      ++c.decomposable;
    } else {
      ++c.indecomposable;
    }
  }
  c.nonzero_decomposable = c.decomposable - 1;

  auto act = [&](int k, std::uint32_t x) {
    return lagrangian_index(q, o.apply(k, static_cast<EIdx>(x % n2)), o.apply(k, static_cast<EIdx>(x / n2)));
  };
  // SO(E)-orbit of each point, labelled by its least member.
  std::vector<std::uint32_t> orbit_min(n, UINT32_MAX);
  std::vector<std::vector<std::uint32_t>> orbit_members(n);
  for (std::uint32_t x = 0; x < n; ++x) {
    if (orbit_min[x] != UINT32_MAX) continue;
    std::vector<std::uint32_t> members;
    for (int k = 0; k < o.so_order(); ++k) members.push_back(act(k, x));
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (auto y : members) orbit_min[y] = x;
    if (c.is_decomposable[x]) ++c.s_orbits;
    else ++c.s_prime_orbits;
    orbit_members[x] = std::move(members);
  }
  for (std::uint32_t x = 0; x < n; ++x) {
    if (orbit_min[x] != x) continue;
    const std::uint32_t partner = orbit_min[act(o.sigma(), x)];
    if (partner == x) {
      ++c.self_conjugate_orbits;
      continue;
    }
    if (partner < x) continue;
    c.pairs.push_back(OrbitPair{orbit_members[x], orbit_members[partner]});
  }
  return c;
}

std::vector<SpMat> little_stabilizer(const SpGroup& g, const DecomposableCensus& census) {
  if (census.pairs.empty()) throw StructuralError("census has no non-self-conjugate orbits");
  const auto& pair = census.pairs.front();
  std::vector<std::uint32_t> orbit = pair.first;
  orbit.insert(orbit.end(), pair.second.begin(), pair.second.end());
  std::sort(orbit.begin(), orbit.end());
  const std::uint32_t x0 = orbit.front();
  std::vector<SpMat> out;
  for (const auto& m : subgroup_elements(g, SubgroupLabel::M1).elements) {
    if (std::binary_search(orbit.begin(), orbit.end(), act_on_lagrangian(g, m, x0))) out.push_back(m);
  }
  return out;
}

}  // namespace theta10
