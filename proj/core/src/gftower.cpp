#include "theta10/gftower.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "theta10/cyclo.hpp"

namespace theta10 {

namespace {

using Poly = std::vector<int>;  // coefficients mod p, low degree first

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int inv_mod(int a, int p) {
  int r = 1;
  for (int e = p - 2, b = a % p; e > 0; e >>= 1, b = b * b % p) {
    if (e & 1) r = r * b % p;
  }
  return r;
}

Poly poly_mod(Poly a, const Poly& m, int p) {
  trim(a);
  Poly mm = m;
  trim(mm);
  const int dm = static_cast<int>(mm.size()) - 1;
  const int lead_inv = inv_mod(mm.back(), p);
  while (static_cast<int>(a.size()) - 1 >= dm && !a.empty()) {
    const int shift = static_cast<int>(a.size()) - 1 - dm;
    const int f = a.back() * lead_inv % p;
    for (int i = 0; i <= dm; ++i) {
      int& c = a[static_cast<std::size_t>(i + shift)];
      c = ((c - f * mm[static_cast<std::size_t>(i)]) % p + p) % p;
    }
    trim(a);
  }
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b, int p) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % p;
  }
  trim(out);
  return out;
}

Poly poly_gcd(Poly a, Poly b, int p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Ben-Or: f of degree d is irreducible iff gcd(x^{p^i} - x, f) = 1 for i <= d/2.
bool irreducible(const Poly& f, int p) {
  const int d = static_cast<int>(f.size()) - 1;
  Poly h = {0, 1};
  for (int i = 1; i <= d / 2; ++i) {
    Poly acc = {1};
    Poly base = h;
    for (int e = p; e > 0; e >>= 1) {
      if (e & 1) acc = poly_mod(poly_mul(acc, base, p), f, p);
      base = poly_mod(poly_mul(base, base, p), f, p);
    }
    h = acc;
    Poly g = h;
    g.resize(std::max<std::size_t>(g.size(), 2), 0);
    g[1] = (g[1] - 1 + p) % p;
    trim(g);
    if (g.empty()) return false;
    if (poly_gcd(f, g, p).size() != 1) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteField

Fq FiniteField::inv(Fq a) const {
  if (a == 0) throw std::domain_error("inverse of zero in F_q");
  return inv_[a];
}

Fq FiniteField::pow(Fq a, long e) const {
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  Fq r = 1;
  for (; e > 0; e >>= 1, a = mul(a, a)) {
    if (e & 1) r = mul(r, a);
  }
  return r;
}

Fq FiniteField::from_int(long n) const {
  long m = n % p_;
  if (m < 0) m += p_;
  Fq acc = 0;
  for (long i = 0; i < m; ++i) acc = add(acc, 1);
  return acc;
}

std::vector<Fq> FiniteField::prime_basis() const {
  std::vector<Fq> out;
  Fq g = 1;
  for (int i = 0; i < r_; ++i) {
    out.push_back(g);
    g = mul(g, primitive_);
  }
  return out;
}

std::vector<int> FiniteField::prime_coords(Fq a) const {
  // Enumerate sum c_i b_i over the prime basis; q is tiny.
  const auto basis = prime_basis();
  std::vector<int> c(static_cast<std::size_t>(r_), 0);
  for (int n = 0; n < q_; ++n) {
    int m = n;
    Fq acc = 0;
    for (int i = 0; i < r_; ++i) {
      c[static_cast<std::size_t>(i)] = m % p_;
      m /= p_;
      acc = add(acc, mul(from_int(c[static_cast<std::size_t>(i)]), basis[static_cast<std::size_t>(i)]));
    }
    if (acc == a) return c;
  }
  throw std::logic_error("prime_coords: element not in span");
}

// ---------------------------------------------------------------------------
// QuadSpace

EIdx QuadSpace::add(EIdx x, EIdx y) const {
  return from_coords(f_->add(coord_a(x), coord_a(y)), f_->add(coord_b(x), coord_b(y)));
}

EIdx QuadSpace::neg(EIdx x) const { return from_coords(f_->neg(coord_a(x)), f_->neg(coord_b(x))); }

EIdx QuadSpace::scale(Fq c, EIdx x) const {
  return from_coords(f_->mul(c, coord_a(x)), f_->mul(c, coord_b(x)));
}

EIdx QuadSpace::inv(EIdx x) const {
  if (x == 0) throw std::domain_error("inverse of zero in F_{q^2}");
  return scale(f_->inv(norm(x)), sigma(x));
}

Fq QuadSpace::form(EIdx x, EIdx y) const {
  // <x,y> = (N(x+y) - N(x) - N(y)) / 2
  const Fq s = f_->sub(f_->sub(norm(add(x, y)), norm(x)), norm(y));
  return f_->mul(s, f_->half());
}

// ---------------------------------------------------------------------------
// OrthGroupE

EIdx OrthGroupE::apply(int k, EIdx x) const {
  const int n = static_cast<int>(units_.size());
  const EIdx rotated = e_->mul(units_[static_cast<std::size_t>(k % n)], x);
  return k < n ? rotated : e_->sigma(rotated);
}

// ---------------------------------------------------------------------------
// FieldTower

std::shared_ptr<const FieldTower> FieldTower::create(int q) {
  std::shared_ptr<FieldTower> t(new FieldTower());
  t->build(q);
  return t;
}

void FieldTower::build(int q) {
  if (q < 3 || q % 2 == 0) throw std::invalid_argument("q must be an odd prime power, got " + std::to_string(q));
  int p = 0;
  for (int d = 3; d <= q; d += 2) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  int r = 0;
  for (int m = q; m > 1; m /= p) {
    if (m % p != 0) throw std::invalid_argument("q must be an odd prime power, got " + std::to_string(q));
    ++r;
  }
  if (!is_prime(p)) throw std::invalid_argument("q must be an odd prime power, got " + std::to_string(q));
  if (q > 27) throw std::invalid_argument("q too large for the desk-scale tower (q <= 27)");
  p_ = p;
  r_ = r;
  q_ = q;
  const int d = 4 * r;
  pw_.assign(static_cast<std::size_t>(d + 1), 1);
  for (int i = 1; i <= d; ++i) pw_[static_cast<std::size_t>(i)] = pw_[static_cast<std::size_t>(i - 1)] * static_cast<std::uint32_t>(p);
  big_ = pw_[static_cast<std::size_t>(d)];

  // Least monic irreducible of degree d.
  Poly f;
  for (std::uint32_t c = 0; c < big_; ++c) {
    Poly cand(static_cast<std::size_t>(d + 1), 0);
    std::uint32_t m = c;
    for (int i = 0; i < d; ++i) {
      cand[static_cast<std::size_t>(i)] = static_cast<int>(m % static_cast<std::uint32_t>(p));
      m /= static_cast<std::uint32_t>(p);
    }
    cand[static_cast<std::size_t>(d)] = 1;
    if (cand[0] == 0) continue;
    if (irreducible(cand, p)) {
      f = cand;
      break;
    }
  }
  modulus_.assign(f.begin(), f.end() - 1);

  auto to_poly = [&](std::uint32_t code) {
    Poly a(static_cast<std::size_t>(d), 0);
    for (int i = 0; i < d; ++i) {
      a[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::uint32_t>(p));
      code /= static_cast<std::uint32_t>(p);
    }
    return a;
  };
  auto to_code = [&](const Poly& a) {
    std::uint32_t c = 0;
    for (std::size_t i = a.size(); i-- > 0;) c = c * static_cast<std::uint32_t>(p) + static_cast<std::uint32_t>(a[i]);
    return c;
  };

  // Least primitive element kappa; its power sequence is the exp table.
  for (std::uint32_t cand = 2; cand < big_; ++cand) {
    const Poly g = to_poly(cand);
    std::vector<std::uint32_t> seq;
    seq.reserve(big_ - 1);
    Poly cur = {1};
    std::uint32_t code = 1;
    do {
      seq.push_back(code);
      cur = poly_mod(poly_mul(cur, g, p), f, p);
      code = to_code(cur);
    } while (code != 1 && seq.size() < big_);
    if (seq.size() == big_ - 1) {
      exp_ = std::move(seq);
      break;
    }
  }
  if (exp_.empty()) throw std::logic_error("no primitive element found");
  log_.assign(big_, -1);
  for (std::uint32_t i = 0; i < big_ - 1; ++i) log_[exp_[i]] = i;

  // F_q.
  {
    std::vector<std::uint32_t> codes = {0};
    const std::uint32_t step = (big_ - 1) / static_cast<std::uint32_t>(q - 1);
    for (int j = 0; j < q - 1; ++j) codes.push_back(exp_[static_cast<std::size_t>(j) * step]);
    std::sort(codes.begin(), codes.end());
    std::vector<int> index(big_, -1);
    for (int i = 0; i < q; ++i) index[codes[static_cast<std::size_t>(i)]] = i;
    fq_.p_ = p;
    fq_.r_ = r;
    fq_.q_ = q;
    fq_.code_ = codes;
    fq_.add_.resize(static_cast<std::size_t>(q * q));
    fq_.mul_.resize(static_cast<std::size_t>(q * q));
    fq_.neg_.resize(static_cast<std::size_t>(q));
    fq_.inv_.resize(static_cast<std::size_t>(q));
    fq_.trace_.resize(static_cast<std::size_t>(q));
    fq_.chi_.resize(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) {
      const std::uint32_t ca = codes[static_cast<std::size_t>(a)];
      for (int b = 0; b < q; ++b) {
        const std::uint32_t cb = codes[static_cast<std::size_t>(b)];
        fq_.add_[static_cast<std::size_t>(a * q + b)] = static_cast<Fq>(index[add(ca, cb)]);
        fq_.mul_[static_cast<std::size_t>(a * q + b)] = static_cast<Fq>(index[mul(ca, cb)]);
      }
      fq_.neg_[static_cast<std::size_t>(a)] = static_cast<Fq>(index[neg(ca)]);
      fq_.inv_[static_cast<std::size_t>(a)] = a == 0 ? 0 : static_cast<Fq>(index[inv(ca)]);
      std::uint32_t tr = 0, conj = ca;
      for (int i = 0; i < r; ++i) {
        tr = add(tr, conj);
        conj = pow(conj, p);
      }
      if (tr >= static_cast<std::uint32_t>(p)) throw std::logic_error("trace left the prime field");
      fq_.trace_[static_cast<std::size_t>(a)] = static_cast<int>(tr);
      if (a == 0) {
        fq_.chi_[0] = 0;
      } else {
        fq_.chi_[static_cast<std::size_t>(a)] = pow(ca, (q - 1) / 2) == 1 ? 1 : -1;
      }
    }
    fq_.primitive_ = static_cast<Fq>(index[exp_[step]]);
  }

  // E = F_{q^2}.
  {
    const int n = q * q;
    const std::uint32_t step1 = (big_ - 1) / static_cast<std::uint32_t>(q - 1);
    const std::uint32_t step2 = (big_ - 1) / static_cast<std::uint32_t>(n - 1);
    std::uint32_t e2 = std::numeric_limits<std::uint32_t>::max();
    for (int j = 0; j < n - 1; ++j) {
      const std::uint32_t idx = static_cast<std::uint32_t>(j) * step2;
      if (idx % step1 == 0) continue;  // lies in F_q
      e2 = std::min(e2, exp_[idx]);
    }
    e_.q_ = q;
    e_.f_ = &fq_;
    e_.code_.resize(static_cast<std::size_t>(n));
    std::vector<int> eindex(big_, -1);
    for (int b = 0; b < q; ++b) {
      for (int a = 0; a < q; ++a) {
        const std::uint32_t c = add(fq_.code(static_cast<Fq>(a)), mul(fq_.code(static_cast<Fq>(b)), e2));
        e_.code_[static_cast<std::size_t>(a + q * b)] = c;
        eindex[c] = a + q * b;
      }
    }
    std::vector<int> qindex(big_, -1);
    for (int a = 0; a < q; ++a) qindex[fq_.code(static_cast<Fq>(a))] = a;
    e_.mul_.resize(static_cast<std::size_t>(n * n));
    e_.conj_.resize(static_cast<std::size_t>(n));
    e_.norm_.resize(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
      const std::uint32_t cx = e_.code_[static_cast<std::size_t>(x)];
      for (int y = 0; y < n; ++y) {
        e_.mul_[static_cast<std::size_t>(x * n + y)] = static_cast<EIdx>(eindex[mul(cx, e_.code_[static_cast<std::size_t>(y)])]);
      }
      const std::uint32_t cc = frobenius(cx, 1);
      e_.conj_[static_cast<std::size_t>(x)] = static_cast<EIdx>(eindex[cc]);
      const int nm = qindex[mul(cx, cc)];
      if (nm < 0) throw std::logic_error("norm left F_q");
      e_.norm_[static_cast<std::size_t>(x)] = static_cast<Fq>(nm);
    }

    // O(E): rotations by t0^k, then sigma * t0^k.
    const std::uint32_t lambda = exp_[step2];                  // generates F_{q^2}^*
    const std::uint32_t t0 = pow(lambda, q - 1);               // generates the norm-one group
    orth_.e_ = &e_;
    const int so = q + 1;
    std::vector<EIdx> units;
    std::uint32_t u = 1;
    for (int k = 0; k < so; ++k) {
      units.push_back(static_cast<EIdx>(eindex[u]));
      u = mul(u, t0);
    }
    orth_.units_ = units;
    const EIdx one = e_.from_coords(1, 0), e2i = e_.from_coords(0, 1);
    auto mat_of = [&](int k) {
      const EIdx c1 = orth_.apply(k, one), c2 = orth_.apply(k, e2i);
      Mat2 m;
      m.m = {e_.coord_a(c1), e_.coord_a(c2), e_.coord_b(c1), e_.coord_b(c2)};
      return m;
    };
    for (int k = 0; k < 2 * so; ++k) orth_.mats_.push_back(mat_of(k));
    const int ord = 2 * so;
    orth_.table_.assign(static_cast<std::size_t>(ord * ord), -1);
    orth_.inv_.assign(static_cast<std::size_t>(ord), -1);
    for (int a = 0; a < ord; ++a) {
      for (int b = 0; b < ord; ++b) {
        // (a*b)(x) = a(b(x)); identify by images of e1, e2.
        const EIdx c1 = orth_.apply(a, orth_.apply(b, one));
        const EIdx c2 = orth_.apply(a, orth_.apply(b, e2i));
        Mat2 m;
        m.m = {e_.coord_a(c1), e_.coord_a(c2), e_.coord_b(c1), e_.coord_b(c2)};
        for (int k = 0; k < ord; ++k) {
          if (orth_.mats_[static_cast<std::size_t>(k)] == m) {
            orth_.table_[static_cast<std::size_t>(a * ord + b)] = k;
            if (k == 0) orth_.inv_[static_cast<std::size_t>(a)] = b;
            break;
          }
        }
      }
    }
  }
}

std::string FieldTower::modulus_string() const {
  std::ostringstream os;
  os << "x^" << degree();
  for (int i = degree() - 1; i >= 0; --i) {
    const int c = modulus_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    os << " + " << c;
    if (i >= 1) os << "*x";
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

std::uint32_t FieldTower::add(std::uint32_t a, std::uint32_t b) const {
  std::uint32_t out = 0;
  const auto p = static_cast<std::uint32_t>(p_);
  for (int i = 0; i < degree(); ++i) {
    out += ((a % p + b % p) % p) * pw_[static_cast<std::size_t>(i)];
    a /= p;
    b /= p;
  }
  return out;
}

std::uint32_t FieldTower::neg(std::uint32_t a) const {
  std::uint32_t out = 0;
  const auto p = static_cast<std::uint32_t>(p_);
  for (int i = 0; i < degree(); ++i) {
    out += ((p - a % p) % p) * pw_[static_cast<std::size_t>(i)];
    a /= p;
  }
  return out;
}

std::uint32_t FieldTower::mul(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  const std::int64_t e = (log_[a] + log_[b]) % static_cast<std::int64_t>(big_ - 1);
  return exp_[static_cast<std::size_t>(e)];
}

std::uint32_t FieldTower::inv(std::uint32_t a) const {
  if (a == 0) throw std::domain_error("inverse of zero in F_{q^4}");
  const std::int64_t n = big_ - 1;
  return exp_[static_cast<std::size_t>((n - log_[a]) % n)];
}

std::uint32_t FieldTower::pow(std::uint32_t a, long e) const {
  if (a == 0) {
    if (e <= 0) throw std::domain_error("zero to a non-positive power");
    return 0;
  }
  const std::int64_t n = big_ - 1;
  std::int64_t k = (log_[a] * (e % n)) % n;
  if (k < 0) k += n;
  return exp_[static_cast<std::size_t>(k)];
}

std::uint32_t FieldTower::frobenius(std::uint32_t a, int k) const {
  std::uint32_t x = a;
  for (int i = 0; i < k; ++i) x = pow(x, q_);
  return x;
}

std::uint64_t FieldTower::mult_order(std::uint32_t a) const {
  if (a == 0) throw std::domain_error("order of zero");
  const std::uint64_t n = big_ - 1;
  const std::uint64_t l = static_cast<std::uint64_t>(log_[a]);
  std::uint64_t g = n, b = l;
  while (b != 0) {
    const std::uint64_t t = g % b;
    g = b;
    b = t;
  }
  return n / g;
}

std::vector<int> FieldTower::prime_coords(std::uint32_t a) const {
  std::vector<int> c;
  for (int i = 0; i < degree(); ++i) {
    c.push_back(static_cast<int>(a % static_cast<std::uint32_t>(p_)));
    a /= static_cast<std::uint32_t>(p_);
  }
  return c;
}

GFElem FieldTower::element(int level, std::uint32_t code) const { return GFElem(this, level, code); }

GFElem FieldTower::kappa() const { return GFElem(this, 4, exp_[1]); }

// ---------------------------------------------------------------------------
// GFElem

GFElem::GFElem(const FieldTower* t, int level, std::uint32_t code) : t_(t), level_(level), code_(code) {
  if (level != 1 && level != 2 && level != 4) throw StructuralError("level must be 1, 2 or 4");
  if (code >= t->order()) throw StructuralError("element code out of range");
  if (!t->in_level(code, level)) throw StructuralError("element does not lie in F_{q^" + std::to_string(level) + "}");
}

namespace {
void same_tower(const GFElem& a, const GFElem& b) {
  if (a.tower() != b.tower()) throw StructuralError("elements from different towers");
}
}  // namespace

GFElem operator+(const GFElem& a, const GFElem& b) {
  same_tower(a, b);
  return GFElem(a.t_, std::max(a.level_, b.level_), a.t_->add(a.code_, b.code_));
}

GFElem operator-(const GFElem& a, const GFElem& b) {
  same_tower(a, b);
  return GFElem(a.t_, std::max(a.level_, b.level_), a.t_->sub(a.code_, b.code_));
}

GFElem operator*(const GFElem& a, const GFElem& b) {
  same_tower(a, b);
  return GFElem(a.t_, std::max(a.level_, b.level_), a.t_->mul(a.code_, b.code_));
}

GFElem GFElem::inverse() const { return GFElem(t_, level_, t_->inv(code_)); }

GFElem GFElem::pow(long e) const { return GFElem(t_, level_, t_->pow(code_, e)); }

GFElem GFElem::frobenius(int k) const { return GFElem(t_, level_, t_->frobenius(code_, k)); }

// ---------------------------------------------------------------------------

Fq norm_form(const FieldTower& t, EIdx x, EIdx y) { return t.e_space().form(x, y); }

EIdx sigma(const FieldTower& t, EIdx x) { return t.e_space().sigma(x); }

SOGroupE so_e_elements(const FieldTower& t) {
  SOGroupE so;
  const auto& o = t.orth();
  for (int k = 0; k < o.so_order(); ++k) so.elements.push_back(o.rotation_unit(k));
  so.generator = o.rotation_unit(1);
  return so;
}

GFElem torus_eigenvalue(const FieldTower& t) {
  const long q = t.q();
  return t.kappa().pow(q * q - 1);
}

std::vector<Fq> minimal_polynomial(const FieldTower& t, std::uint32_t a) {
  std::vector<std::uint32_t> conj = {a};
  for (std::uint32_t c = t.frobenius(a, 1); c != a; c = t.frobenius(c, 1)) conj.push_back(c);
  std::vector<std::uint32_t> poly = {1};  // big-field coefficients, low first
  for (std::uint32_t c : conj) {
    std::vector<std::uint32_t> next(poly.size() + 1, 0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] = t.add(next[i + 1], poly[i]);
      next[i] = t.sub(next[i], t.mul(poly[i], c));
    }
    poly = std::move(next);
  }
  const auto& f = t.base();
  std::vector<Fq> out;
  for (std::uint32_t c : poly) {
    bool found = false;
    for (int i = 0; i < f.q(); ++i) {
      if (f.code(static_cast<Fq>(i)) == c) {
        out.push_back(static_cast<Fq>(i));
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("minimal polynomial coefficient outside F_q");
  }
  return out;
}

}  // namespace theta10
