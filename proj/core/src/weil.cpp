#include "theta10/weil.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace theta10 {

namespace {

Phase phase_mul(Phase a, Phase b, int p) {
  return Phase{static_cast<std::uint8_t>((a.e + b.e) % p), static_cast<std::int8_t>(a.sign * b.sign)};
}

Phase phase_inv(Phase a, int p) { return Phase{static_cast<std::uint8_t>((p - a.e) % p), a.sign}; }

std::vector<std::uint32_t> inverse_perm(const std::vector<std::uint32_t>& perm) {
  std::vector<std::uint32_t> inv(perm.size());
  for (std::uint32_t x = 0; x < perm.size(); ++x) inv[perm[x]] = x;
  return inv;
}

// Determinant of an n x n matrix over F_q by elimination.
Fq det_fq(std::vector<Fq> a, int n, const FiniteField& f) {
  Fq det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && a[static_cast<std::size_t>(piv * n + c)] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[static_cast<std::size_t>(piv * n + k)], a[static_cast<std::size_t>(c * n + k)]);
      det = f.neg(det);
    }
    const Fq pv = a[static_cast<std::size_t>(c * n + c)];
    det = f.mul(det, pv);
    const Fq inv = f.inv(pv);
    for (int r = c + 1; r < n; ++r) {
      const Fq factor = f.mul(a[static_cast<std::size_t>(r * n + c)], inv);
      if (factor == 0) continue;
      for (int k = c; k < n; ++k) {
        a[static_cast<std::size_t>(r * n + k)] = f.sub(a[static_cast<std::size_t>(r * n + k)], f.mul(factor, a[static_cast<std::size_t>(c * n + k)]));
      }
    }
  }
  return det;
}

// Integer lift of a CycNum: sum c[k] z^k / den over k < p.
struct LiftedScalar {
  std::vector<std::int64_t> c;
  mpz_class den = 1;
};

LiftedScalar lift(const CycNum& x) {
  LiftedScalar out;
  const int p = x.conductor();
  out.c.assign(static_cast<std::size_t>(p), 0);
  mpz_class den = 1;
  for (const auto& r : x.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), r.get_den_mpz_t());
  out.den = den;
  for (int k = 0; k < p - 1; ++k) {
    const Rat& r = x.coeffs()[static_cast<std::size_t>(k)];
    mpz_class v = r.get_num() * (den / r.get_den());
    if (!v.fits_slong_p()) throw std::overflow_error("scalar too large for the integer dense path");
    out.c[static_cast<std::size_t>(k)] = v.get_si();
  }
  return out;
}

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("dense product overflowed 64-bit coefficients");
  return static_cast<std::int64_t>(v);
}

struct WeightedUnionFind {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint8_t> pot;  // X[node] = z^pot X[parent]
  std::vector<bool> bad;
  int p;

  WeightedUnionFind(std::size_t n, int p_) : parent(n), pot(n, 0), bad(n, false), p(p_) {
    std::iota(parent.begin(), parent.end(), 0u);
  }

  // Returns the root; sets e to the exponent of node relative to the root.
  std::uint32_t find(std::uint32_t x, int& e) {
    std::uint32_t r = x;
    int acc = 0;
    while (parent[r] != r) {
      acc += pot[r];
      r = parent[r];
    }
    // Path compression with re-weighting.
    int rem = acc;
    std::uint32_t cur = x;
    while (parent[cur] != cur) {
      const std::uint32_t next = parent[cur];
      const int w = pot[cur];
      parent[cur] = r;
      pot[cur] = static_cast<std::uint8_t>(rem % p);
      rem -= w;
      cur = next;
    }
    e = acc % p;
    return r;
  }

  // Imposes X[v] = z^w X[u].
  void relate(std::uint32_t u, std::uint32_t v, int w) {
    int eu = 0, ev = 0;
    const std::uint32_t ru = find(u, eu), rv = find(v, ev);
    if (ru == rv) {
      if (((eu + w - ev) % p + p) % p != 0) bad[ru] = true;
      return;
    }
    // X[v] = z^{ev} X[rv] and X[u] = z^{eu} X[ru]  =>  X[rv] = z^{eu + w - ev} X[ru].
    parent[rv] = ru;
    pot[rv] = static_cast<std::uint8_t>(((eu + w - ev) % p + 2 * p) % p);
    if (bad[rv]) bad[ru] = true;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// FuncSpace

std::array<Fq, 4> FuncSpace::coords(std::uint32_t x) const {
  const EIdx a = x3(x), b = x4(x);
  return {static_cast<Fq>(a % q_), static_cast<Fq>(a / q_), static_cast<Fq>(b % q_), static_cast<Fq>(b / q_)};
}

std::uint32_t FuncSpace::from_coords(const std::array<Fq, 4>& c) const {
  return index(static_cast<EIdx>(c[0] + q_ * c[1]), static_cast<EIdx>(c[2] + q_ * c[3]));
}

// ---------------------------------------------------------------------------
// MonomialOp

MonomialOp::MonomialOp(int p, std::vector<std::uint32_t> perm, std::vector<Phase> mult)
    : p_(p), perm_(std::move(perm)), mult_(std::move(mult)) {
  if (perm_.size() != mult_.size()) throw StructuralError("monomial operator size mismatch");
}

MonomialOp MonomialOp::identity(int p, int n) {
  std::vector<std::uint32_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0u);
  return MonomialOp(p, std::move(perm), std::vector<Phase>(static_cast<std::size_t>(n)));
}

MonomialOp operator*(const MonomialOp& a, const MonomialOp& b) {
  if (a.p_ != b.p_ || a.perm_.size() != b.perm_.size()) throw StructuralError("incompatible monomial operators");
  const std::size_t n = a.perm_.size();
  std::vector<std::uint32_t> perm(n);
  std::vector<Phase> mult(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::uint32_t y = a.perm_[x];
    perm[x] = b.perm_[y];
    mult[x] = phase_mul(a.mult_[x], b.mult_[y], a.p_);
  }
  return MonomialOp(a.p_, std::move(perm), std::move(mult));
}

MonomialOp MonomialOp::inverse() const {
  const auto inv = inverse_perm(perm_);
  std::vector<Phase> mult(perm_.size());
  for (std::size_t y = 0; y < perm_.size(); ++y) mult[y] = phase_inv(mult_[inv[y]], p_);
  return MonomialOp(p_, inv, std::move(mult));
}

bool MonomialOp::is_diagonal() const {
  for (std::uint32_t x = 0; x < perm_.size(); ++x) {
    if (perm_[x] != x) return false;
  }
  return true;
}

bool MonomialOp::is_identity() const {
  if (!is_diagonal()) return false;
  return std::all_of(mult_.begin(), mult_.end(), [](const Phase& ph) { return ph.e == 0 && ph.sign == 1; });
}

CycNum MonomialOp::trace() const {
  std::vector<long> counts(static_cast<std::size_t>(p_), 0);
  for (std::uint32_t x = 0; x < perm_.size(); ++x) {
    if (perm_[x] == x) counts[mult_[x].e] += mult_[x].sign;
  }
  return CycNum::from_exponent_counts(p_, counts);
}

std::size_t DenseCore::nonzeros() const {
  return static_cast<std::size_t>(std::count_if(exps.begin(), exps.end(), [](std::uint8_t e) { return e != kZero; }));
}

// ---------------------------------------------------------------------------
// ZMat

ZMat::ZMat(int p, int n) : p_(p), n_(n), c_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(p), 0) {}

CycNum ZMat::value(std::uint32_t i, std::uint32_t j) const {
  const std::int64_t* e = entry(i, j);
  std::vector<Rat> coeffs(static_cast<std::size_t>(p_ - 1));
  for (int k = 0; k < p_ - 1; ++k) {
    coeffs[static_cast<std::size_t>(k)] = Rat(mpz_class(static_cast<long>(e[k] - e[p_ - 1])), den_);
    coeffs[static_cast<std::size_t>(k)].canonicalize();
  }
  return CycNum::from_coeffs(p_, std::move(coeffs));
}

ZMat operator*(const ZMat& a, const ZMat& b) {
  if (a.p_ != b.p_ || a.n_ != b.n_) throw StructuralError("incompatible dense operators");
  const int p = a.p_;
  const int n = a.n_;
  ZMat out(p, n);
  std::vector<__int128> acc(static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
  for (int i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (int k = 0; k < n; ++k) {
      const std::int64_t* x = a.entry(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k));
      for (int s = 0; s < p; ++s) {
        if (x[s] == 0) continue;
        const __int128 xs = x[s];
        for (int j = 0; j < n; ++j) {
          const std::int64_t* y = b.entry(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j));
          __int128* dst = &acc[static_cast<std::size_t>(j) * static_cast<std::size_t>(p)];
          for (int t = 0; t < p; ++t) {
            if (y[t] != 0) dst[(s + t) % p] += xs * y[t];
          }
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      std::int64_t* dst = out.entry(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      for (int t = 0; t < p; ++t) dst[t] = narrow(acc[static_cast<std::size_t>(j) * static_cast<std::size_t>(p) + static_cast<std::size_t>(t)]);
    }
  }
  out.den_ = a.den_ * b.den_;
  // Remove common factors so denominators stay small.
  mpz_class g = out.den_;
  for (std::int64_t v : out.c_) {
    if (g == 1) break;
    if (v != 0) {
      mpz_class mv(static_cast<long>(v));
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), mv.get_mpz_t());
    }
  }
  if (g != 1) {
    if (!g.fits_slong_p()) throw std::overflow_error("dense denominator too large");
    const long gl = g.get_si();
    for (auto& v : out.c_) v /= gl;
    out.den_ /= g;
  }
  return out;
}

bool operator==(const ZMat& a, const ZMat& b) {
  if (a.p_ != b.p_ || a.n_ != b.n_) return false;
  const int p = a.p_;
  // Canonical coefficients c_k - c_{p-1}, cross-multiplied by the other denominator.
  const mpz_class& da = a.den_;
  const mpz_class& db = b.den_;
  const bool small = da.fits_slong_p() && db.fits_slong_p();
  const std::size_t entries = static_cast<std::size_t>(a.n_) * static_cast<std::size_t>(a.n_);
  for (std::size_t idx = 0; idx < entries; ++idx) {
    const std::int64_t* x = &a.c_[idx * static_cast<std::size_t>(p)];
    const std::int64_t* y = &b.c_[idx * static_cast<std::size_t>(p)];
    for (int k = 0; k < p - 1; ++k) {
      const __int128 xv = static_cast<__int128>(x[k]) - x[p - 1];
      const __int128 yv = static_cast<__int128>(y[k]) - y[p - 1];
      if (small) {
        if (xv * db.get_si() != yv * da.get_si()) return false;
      } else {
        mpz_class l = mpz_class(static_cast<long>(xv)) * db, r = mpz_class(static_cast<long>(yv)) * da;
        if (l != r) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// WeilOp

WeilOp::WeilOp(MonomialOp m) : kind_(Kind::Monomial), left_(std::move(m)) {}

WeilOp::WeilOp(MonomialOp left, std::shared_ptr<const DenseCore> core, MonomialOp right)
    : kind_(Kind::Factored), left_(std::move(left)), right_(std::move(right)), core_(std::move(core)) {
  if (!core_ || core_->n != left_.dim() || core_->n != right_.dim()) throw StructuralError("factored operator size mismatch");
}

WeilOp::WeilOp(ZMat dense) : kind_(Kind::Dense), dense_(std::move(dense)) {}

int WeilOp::dim() const {
  switch (kind_) {
    case Kind::Monomial:
    case Kind::Factored: return left_.dim();
    case Kind::Dense: return dense_.dim();
  }
  return 0;
}

int WeilOp::conductor() const { return kind_ == Kind::Dense ? dense_.conductor() : left_.conductor(); }

CycNum WeilOp::trace() const {
  switch (kind_) {
    case Kind::Monomial: return left_.trace();
    case Kind::Factored: {
      const int p = core_->p;
      const auto rinv = inverse_perm(right_.perm());
      std::vector<long> counts(static_cast<std::size_t>(p), 0);
      for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(core_->n); ++i) {
        const std::uint32_t j = rinv[i];
        const std::uint8_t e = core_->at(left_.target(i), j);
        if (e == DenseCore::kZero) continue;
        const Phase& pl = left_.mult(i);
        const Phase& pr = right_.mult(j);
        counts[static_cast<std::size_t>((pl.e + e + pr.e) % p)] += pl.sign * pr.sign;
      }
      return CycNum::from_exponent_counts(p, counts) * core_->scalar;
    }
    case Kind::Dense: {
      CycNum s(dense_.conductor());
      for (int i = 0; i < dense_.dim(); ++i) s += dense_.value(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i));
      return s;
    }
  }
  return {};
}

CycNum WeilOp::entry(std::uint32_t i, std::uint32_t j) const {
  const int p = conductor();
  switch (kind_) {
    case Kind::Monomial: {
      if (left_.target(i) != j) return CycNum(p);
      const Phase& ph = left_.mult(i);
      return CycNum::zeta_power(p, ph.e) * Rat(ph.sign);
    }
    case Kind::Factored: {
      const auto rinv = inverse_perm(right_.perm());
      const std::uint32_t k = rinv[j];
      const std::uint8_t e = core_->at(left_.target(i), k);
      if (e == DenseCore::kZero) return CycNum(p);
      const Phase& pl = left_.mult(i);
      const Phase& pr = right_.mult(k);
      return CycNum::zeta_power(p, pl.e + e + pr.e) * Rat(pl.sign * pr.sign) * core_->scalar;
    }
    case Kind::Dense: return dense_.value(i, j);
  }
  return {};
}

CycNum WeilOp::apply_at(const std::vector<std::int64_t>& f, std::uint32_t x) const {
  const int p = conductor();
  switch (kind_) {
    case Kind::Monomial: {
      const Phase& ph = left_.mult(x);
      return CycNum::zeta_power(p, ph.e) * Rat(ph.sign * f[left_.target(x)]);
    }
    case Kind::Factored: {
      std::vector<long> counts(static_cast<std::size_t>(p), 0);
      const std::uint32_t row = left_.target(x);
      const Phase& pl = left_.mult(x);
      for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(core_->n); ++k) {
        const std::int64_t v = f[right_.target(k)];
        if (v == 0) continue;
        const std::uint8_t e = core_->at(row, k);
        if (e == DenseCore::kZero) continue;
        const Phase& pr = right_.mult(k);
        counts[static_cast<std::size_t>((pl.e + e + pr.e) % p)] += pl.sign * pr.sign * v;
      }
      return CycNum::from_exponent_counts(p, counts) * core_->scalar;
    }
    case Kind::Dense: {
      CycNum s(p);
      for (int k = 0; k < dense_.dim(); ++k) {
        if (f[static_cast<std::size_t>(k)] != 0) s += dense_.value(x, static_cast<std::uint32_t>(k)) * Rat(f[static_cast<std::size_t>(k)]);
      }
      return s;
    }
  }
  return {};
}

std::vector<CycNum> WeilOp::apply(const std::vector<CycNum>& f) const {
  const int n = dim();
  const int p = conductor();
  std::vector<CycNum> out(static_cast<std::size_t>(n), CycNum(p));
  if (kind_ == Kind::Monomial) {
    for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(n); ++x) {
      const Phase& ph = left_.mult(x);
      out[x] = CycNum::zeta_power(p, ph.e) * f[left_.target(x)] * Rat(ph.sign);
    }
    return out;
  }
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(n); ++x) {
    CycNum s(p);
    for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(n); ++k) {
      if (f[k].is_zero()) continue;
      const CycNum e = entry(x, k);
      if (!e.is_zero()) s += e * f[k];
    }
    out[x] = std::move(s);
  }
  return out;
}

ZMat WeilOp::to_dense() const {
  const int n = dim();
  const int p = conductor();
  switch (kind_) {
    case Kind::Monomial: {
      ZMat m(p, n);
      for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(n); ++x) {
        const Phase& ph = left_.mult(x);
        m.entry(x, left_.target(x))[ph.e] = ph.sign;
      }
      return m;
    }
    case Kind::Factored: {
      ZMat m(p, n);
      const LiftedScalar s = lift(core_->scalar);
      m.set_denominator(s.den);
      for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n); ++i) {
        const std::uint32_t row = left_.target(i);
        const Phase& pl = left_.mult(i);
        for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(n); ++k) {
          const std::uint8_t e = core_->at(row, k);
          if (e == DenseCore::kZero) continue;
          const Phase& pr = right_.mult(k);
          const int shift = (pl.e + e + pr.e) % p;
          const int sign = pl.sign * pr.sign;
          std::int64_t* dst = m.entry(i, right_.target(k));
          for (int t = 0; t < p; ++t) dst[(t + shift) % p] += sign * s.c[static_cast<std::size_t>(t)];
        }
      }
      return m;
    }
    case Kind::Dense: return dense_;
  }
  return {};
}

WeilOp operator*(const WeilOp& a, const WeilOp& b) {
  using K = WeilOp::Kind;
  if (a.kind_ == K::Monomial && b.kind_ == K::Monomial) return WeilOp(a.left_ * b.left_);
  if (a.kind_ == K::Monomial && b.kind_ == K::Factored) return WeilOp(a.left_ * b.left_, b.core_, b.right_);
  if (a.kind_ == K::Factored && b.kind_ == K::Monomial) return WeilOp(a.left_, a.core_, a.right_ * b.left_);
  if (a.dim() > 625) throw std::length_error("dense operator products are limited to dimension 625");
  return WeilOp(a.to_dense() * b.to_dense());
}

bool operator==(const WeilOp& a, const WeilOp& b) {
  if (a.kind_ == WeilOp::Kind::Monomial && b.kind_ == WeilOp::Kind::Monomial) return a.left_ == b.left_;
  return a.to_dense() == b.to_dense();
}

// ---------------------------------------------------------------------------
// Convention

std::string Convention::describe() const {
  auto sgn = [](int s) { return s > 0 ? "+" : "-"; };
  std::ostringstream os;
  os << "pi(l+x',z)f(x) = psi(z " << sgn(a_sign) << " <l,x> " << sgn(b_sign) << " <l,x'>/2) f(x "
     << sgn(t_sign) << " x'); U1: psi(" << sgn(bridge_sign) << "<v,v>_{g(x)1}/2) with <x,y>_g = <(g-1)x,y>_V; "
     << passing_combinations << " of 16 sign combinations pass";
  return os.str();
}

// ---------------------------------------------------------------------------
// WeilEngine

std::shared_ptr<WeilEngine> WeilEngine::create(int q) {
  auto tower = FieldTower::create(q);
  return std::make_shared<WeilEngine>(std::make_shared<const SpGroup>(tower));
}

WeilEngine::WeilEngine(std::shared_ptr<const SpGroup> group) : group_(std::move(group)), space_(group_->q()) {
  const auto& e = group_->tower().e_space();
  const auto& f = field();
  const EIdx basis[2] = {e.from_coords(1, 0), e.from_coords(0, 1)};
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 4; ++j)
        for (int b = 0; b < 2; ++b)
          omega_[static_cast<std::size_t>((2 * i + a) * 8 + 2 * j + b)] =
              f.mul(group_->gram().at(i, j), e.form(basis[a], basis[b]));
  calibrate();
}

std::string WeilEngine::convention_header() const { return conv_.describe(); }

Fq WeilEngine::omega(const Vec8& u, const Vec8& v) const {
  const auto& f = field();
  Fq s = 0;
  for (int i = 0; i < 8; ++i) {
    if (u[static_cast<std::size_t>(i)] == 0) continue;
    Fq row = 0;
    for (int j = 0; j < 8; ++j) row = f.add(row, f.mul(omega_[static_cast<std::size_t>(8 * i + j)], v[static_cast<std::size_t>(j)]));
    s = f.add(s, f.mul(u[static_cast<std::size_t>(i)], row));
  }
  return s;
}

HeisElem WeilEngine::heis_mul(const HeisElem& a, const HeisElem& b) const {
  const auto& f = field();
  HeisElem c;
  for (int i = 0; i < 8; ++i) c.u[static_cast<std::size_t>(i)] = f.add(a.u[static_cast<std::size_t>(i)], b.u[static_cast<std::size_t>(i)]);
  c.z = f.add(f.add(a.z, b.z), f.mul(f.half(), omega(a.u, b.u)));
  return c;
}

HeisElem WeilEngine::heis_act(const Mat8& g, const HeisElem& h) const {
  const auto& f = field();
  HeisElem out;
  out.z = h.z;
  for (int i = 0; i < 8; ++i) {
    Fq s = 0;
    for (int j = 0; j < 8; ++j) s = f.add(s, f.mul(g[static_cast<std::size_t>(8 * i + j)], h.u[static_cast<std::size_t>(j)]));
    out.u[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

MonomialOp WeilEngine::heisenberg_op_with(const HeisElem& h, Fq a, Fq t, Fq b) const {
  const auto& f = field();
  const int n = space_.dim();
  const int p = this->p();
  Vec8 l{}, xp{};
  for (int i = 0; i < 4; ++i) l[static_cast<std::size_t>(i)] = h.u[static_cast<std::size_t>(i)];
  for (int i = 4; i < 8; ++i) xp[static_cast<std::size_t>(i)] = h.u[static_cast<std::size_t>(i)];
  // <l, x> as a linear functional on the coordinates c[4..7].
  std::array<Fq, 4> w{};
  for (int j = 0; j < 4; ++j) {
    Fq s = 0;
    for (int i = 0; i < 4; ++i) s = f.add(s, f.mul(l[static_cast<std::size_t>(i)], omega_[static_cast<std::size_t>(8 * i + 4 + j)]));
    w[static_cast<std::size_t>(j)] = s;
  }
  const Fq base = f.add(h.z, f.mul(b, omega(l, xp)));
  std::array<Fq, 4> shift{};
  for (int j = 0; j < 4; ++j) shift[static_cast<std::size_t>(j)] = f.mul(t, xp[static_cast<std::size_t>(4 + j)]);
  std::vector<std::uint32_t> perm(static_cast<std::size_t>(n));
  std::vector<Phase> mult(static_cast<std::size_t>(n));
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(n); ++x) {
    auto c = space_.coords(x);
    Fq val = 0;
    for (int j = 0; j < 4; ++j) val = f.add(val, f.mul(w[static_cast<std::size_t>(j)], c[static_cast<std::size_t>(j)]));
    val = f.add(base, f.mul(a, val));
    mult[x] = Phase{static_cast<std::uint8_t>(f.trace(val)), 1};
    for (int j = 0; j < 4; ++j) c[static_cast<std::size_t>(j)] = f.add(c[static_cast<std::size_t>(j)], shift[static_cast<std::size_t>(j)]);
    perm[x] = space_.from_coords(c);
  }
  return MonomialOp(p, std::move(perm), std::move(mult));
}

MonomialOp WeilEngine::heisenberg_op(const HeisElem& h) const { return heisenberg_op_with(h, conv_.a, conv_.t, conv_.b); }

std::vector<HeisElem> WeilEngine::heisenberg_generators() const {
  std::vector<HeisElem> gens;
  for (int c = 0; c < 8; ++c) {
    for (Fq lam : field().prime_basis()) {
      HeisElem h;
      h.u[static_cast<std::size_t>(c)] = lam;
      gens.push_back(h);
    }
  }
  return gens;
}

Mat8 WeilEngine::tensor(const SpMat& g, int t) const {
  const auto& f = field();
  const Mat2& tm = group_->tower().orth().matrix(t);
  Mat8 m{};
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 4; ++j)
        for (int b = 0; b < 2; ++b)
          m[static_cast<std::size_t>((2 * i + a) * 8 + 2 * j + b)] = f.mul(g.at(i, j), tm.at(a, b));
  return m;
}

Mat8 WeilEngine::mat8_mul(const Mat8& a, const Mat8& b) const {
  const auto& f = field();
  Mat8 c{};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      Fq s = 0;
      for (int k = 0; k < 8; ++k) s = f.add(s, f.mul(a[static_cast<std::size_t>(8 * i + k)], b[static_cast<std::size_t>(8 * k + j)]));
      c[static_cast<std::size_t>(8 * i + j)] = s;
    }
  return c;
}

Fq WeilEngine::det8(const Mat8& m) const { return det_fq(std::vector<Fq>(m.begin(), m.end()), 8, field()); }

bool WeilEngine::preserves_omega(const Mat8& m) const {
  for (int i = 0; i < 8; ++i) {
    Vec8 u{};
    for (int k = 0; k < 8; ++k) u[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(8 * k + i)];
    for (int j = 0; j < 8; ++j) {
      Vec8 v{};
      for (int k = 0; k < 8; ++k) v[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(8 * k + j)];
      if (omega(u, v) != omega_[static_cast<std::size_t>(8 * i + j)]) return false;
    }
  }
  return true;
}

int WeilEngine::unip_exponent(const BilForm3& form, int bridge_sign, std::uint32_t x) const {
  const auto& f = field();
  const auto& e = group_->tower().e_space();
  const Fq s = bridge_sign > 0 ? f.half() : f.neg(f.half());
  const EIdx x3 = space_.x3(x), x4 = space_.x4(x);
  // <v,v>_{g (x) 1} = a33 N(x3) + 2 a34 <x3,x4>_E + a44 N(x4).
  Fq vv = f.mul(form.a33, e.norm(x3));
  vv = f.add(vv, f.mul(f.mul(f.from_int(2), form.a34), e.form(x3, x4)));
  vv = f.add(vv, f.mul(form.a44, e.norm(x4)));
  return f.trace(f.mul(s, vv));
}

MonomialOp WeilEngine::unip_op_with(const BilForm3& form, int bridge_sign) const {
  const int n = space_.dim();
  std::vector<std::uint32_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0u);
  std::vector<Phase> mult(static_cast<std::size_t>(n));
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(n); ++x) {
    mult[x] = Phase{static_cast<std::uint8_t>(unip_exponent(form, bridge_sign, x)), 1};
  }
  return MonomialOp(p(), std::move(perm), std::move(mult));
}

MonomialOp WeilEngine::unip_op(const SpMat& g) const { return unip_op_with(u1_bilinear_bridge(*group_, g), conv_.bridge_sign); }

MonomialOp WeilEngine::unip_op_from_form(const BilForm3& form) const { return unip_op_with(form, conv_.bridge_sign); }

WeilEngine::LeviData WeilEngine::levi_data(const SpMat& g, int t) const {
  const auto& f = field();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (g.at(i, 2 + j) != 0 || g.at(2 + i, j) != 0) throw StructuralError("levi_op needs an element of M1");
  const auto& orth = group_->tower().orth();
  // The block of g (x) t on L' (x) E in coordinates c[4..7].
  const Mat2& tm = orth.matrix(t);
  std::vector<Fq> blk(16);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 2; ++j)
        for (int b = 0; b < 2; ++b)
          blk[static_cast<std::size_t>((2 * i + a) * 4 + 2 * j + b)] = f.mul(g.at(2 + i, 2 + j), tm.at(a, b));
  const Fq det = det_fq(blk, 4, f);
  if (det == 0) throw StructuralError("levi block is singular");
  LeviData d;
  d.chi = f.chi(det);
  // (g (x) t)^{-1} on L' (x) E is D^{-1} (x) t^{-1}.
  const Fq dd = f.sub(f.mul(g.at(2, 2), g.at(3, 3)), f.mul(g.at(2, 3), g.at(3, 2)));
  const Fq di = f.inv(dd);
  const std::array<Fq, 4> dinv = {f.mul(di, g.at(3, 3)), f.mul(di, f.neg(g.at(2, 3))), f.mul(di, f.neg(g.at(3, 2))), f.mul(di, g.at(2, 2))};
  const Mat2& ti = orth.matrix(orth.inv(t));
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 2; ++j)
        for (int b = 0; b < 2; ++b)
          d.inv[static_cast<std::size_t>((2 * i + a) * 4 + 2 * j + b)] = f.mul(dinv[static_cast<std::size_t>(2 * i + j)], ti.at(a, b));
  return d;
}

std::uint32_t WeilEngine::levi_target(const LeviData& d, std::uint32_t x) const {
  const auto& f = field();
  const auto c = space_.coords(x);
  std::array<Fq, 4> y{};
  for (int i = 0; i < 4; ++i) {
    Fq s = 0;
    for (int j = 0; j < 4; ++j) s = f.add(s, f.mul(d.inv[static_cast<std::size_t>(4 * i + j)], c[static_cast<std::size_t>(j)]));
    y[static_cast<std::size_t>(i)] = s;
  }
  return space_.from_coords(y);
}

MonomialOp WeilEngine::levi_op(const SpMat& g, int t) const {
  const LeviData d = levi_data(g, t);
  const int n = space_.dim();
  std::vector<std::uint32_t> perm(static_cast<std::size_t>(n));
  std::vector<Phase> mult(static_cast<std::size_t>(n), Phase{0, static_cast<std::int8_t>(d.chi)});
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(n); ++x) perm[x] = levi_target(d, x);
  return MonomialOp(p(), std::move(perm), std::move(mult));
}

std::pair<SpMat, SpMat> WeilEngine::siegel_split(const SpMat& g) const {
  if (!in_p1(*group_, g)) throw StructuralError("siegel_op needs an element of P1");
  SpMat m = g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.at(i, 2 + j) = 0;
  m = group_->make(m.e);
  return {group_->mul(g, group_->inv(m)), m};
}

SiegelEvaluator WeilEngine::siegel_evaluator(const SpMat& g, int t) const {
  const auto [u, m] = siegel_split(g);
  SiegelEvaluator ev;
  ev.engine_ = this;
  ev.form_ = u1_bilinear_bridge(*group_, u);
  ev.levi_ = levi_data(m, t);
  return ev;
}

std::pair<Phase, std::uint32_t> SiegelEvaluator::at(std::uint32_t x) const {
  const Phase ph{static_cast<std::uint8_t>(engine_->unip_exponent(form_, engine_->convention().bridge_sign, x)),
                 static_cast<std::int8_t>(levi_.chi)};
  return {ph, engine_->levi_target(levi_, x)};
}

MonomialOp WeilEngine::siegel_op(const SpMat& g, int t) const {
  const auto [u, m] = siegel_split(g);
  return unip_op(u) * levi_op(m, t);
}

MonomialOp WeilEngine::lambda_op() const {
  const auto& e = group_->tower().e_space();
  const int n = space_.dim();
  std::vector<std::uint32_t> perm(static_cast<std::size_t>(n));
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(n); ++x) {
    perm[x] = space_.index(e.sigma(space_.x3(x)), e.sigma(space_.x4(x)));
  }
  return MonomialOp(p(), std::move(perm), std::vector<Phase>(static_cast<std::size_t>(n)));
}

void WeilEngine::calibrate() {
  const auto& f = field();
  const auto& g = *group_;
  const auto& orth = g.tower().orth();
  std::vector<HeisElem> probes = heisenberg_generators();
  HeisElem all;
  for (auto& x : all.u) x = 1;
  all.z = 1;
  probes.push_back(all);
  HeisElem mixed;
  mixed.u[0] = 1;
  mixed.u[7] = f.neg(1);
  mixed.u[3] = f.from_int(2);
  probes.push_back(mixed);

  std::vector<SpMat> unips, levis;
  for (Fq x : f.prime_basis()) {
    unips.push_back(root_subgroup(g, Root::R2, x));
    unips.push_back(root_subgroup(g, Root::R3, x));
    unips.push_back(root_subgroup(g, Root::R4, x));
    levis.push_back(root_subgroup(g, Root::R1, x));
    levis.push_back(root_subgroup(g, Root::NegR1, x));
  }
  levis.push_back(t0_element(g, f.primitive(), 1));
  levis.push_back(t0_element(g, 1, f.primitive()));
  levis.push_back(g.s1());

  const Fq half = f.half();
  int passing = 0;
  bool chosen = false;
  for (int as : {1, -1})
    for (int ts : {1, -1})
      for (int bs : {1, -1})
        for (int ss : {1, -1}) {
          const Fq a = as > 0 ? Fq{1} : f.neg(1);
          const Fq t = ts > 0 ? Fq{1} : f.neg(1);
          const Fq b = bs > 0 ? half : f.neg(half);
          auto pi = [&](const HeisElem& h) { return heisenberg_op_with(h, a, t, b); };
          bool ok = true;
          for (std::size_t i = 0; i < probes.size() && ok; ++i)
            for (std::size_t j = 0; j < probes.size() && ok; ++j)
              ok = pi(probes[i]) * pi(probes[j]) == pi(heis_mul(probes[i], probes[j]));
          auto intertwines = [&](const MonomialOp& rho, const Mat8& m8) {
            for (const auto& h : probes) {
              if (!(rho * pi(h) == pi(heis_act(m8, h)) * rho)) return false;
            }
            return true;
          };
          for (std::size_t i = 0; i < unips.size() && ok; ++i)
            ok = intertwines(unip_op_with(u1_bilinear_bridge(g, unips[i]), ss), tensor(unips[i], 0));
          for (std::size_t i = 0; i < levis.size() && ok; ++i) ok = intertwines(levi_op(levis[i], 0), tensor(levis[i], 0));
          for (int k : {orth.generator(), orth.sigma()}) {
            if (!ok) break;
            ok = intertwines(levi_op(g.identity(), k), tensor(g.identity(), k));
          }
          if (!ok) continue;
          ++passing;
          if (!chosen) {
            chosen = true;
            conv_.a = a;
            conv_.t = t;
            conv_.b = b;
            conv_.a_sign = as;
            conv_.t_sign = ts;
            conv_.b_sign = bs;
            conv_.bridge_sign = ss;
          }
        }
  if (!chosen) throw std::logic_error("no Heisenberg convention satisfies the intertwining checks");
  conv_.passing_combinations = passing;
}

IntertwinerSolution WeilEngine::solve_intertwiner(const Mat8& g) const {
  if (!preserves_omega(g)) throw StructuralError("intertwiner target does not preserve the form");
  const int n = space_.dim();
  const int p = this->p();
  const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  WeightedUnionFind uf(nn, p);
  for (const auto& h : heisenberg_generators()) {
    const MonomialOp a = heisenberg_op(h);
    const MonomialOp b = heisenberg_op(heis_act(g, h));
    for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n); ++i) {
      const std::uint32_t ti = b.target(i);
      const int ci = b.mult(i).e;
      for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(n); ++k) {
        // X[tau'(i)][tau(k)] = z^{c(k) - c'(i)} X[i][k]
        const int w = ((a.mult(k).e - ci) % p + p) % p;
        uf.relate(static_cast<std::uint32_t>(i * static_cast<std::uint32_t>(n) + k),
                  static_cast<std::uint32_t>(ti * static_cast<std::uint32_t>(n) + a.target(k)), w);
      }
    }
  }
  IntertwinerSolution sol;
  sol.unknowns = nn;
  std::vector<std::uint32_t> roots(nn);
  std::vector<int> exps(nn);
  for (std::size_t u = 0; u < nn; ++u) {
    int e = 0;
    roots[u] = uf.find(static_cast<std::uint32_t>(u), e);
    exps[u] = e;
    if (roots[u] == u && !uf.bad[u]) ++sol.dimension;
  }
  if (sol.dimension == 1) {
    auto shape = std::make_shared<DenseCore>();
    shape->p = p;
    shape->n = n;
    shape->exps.assign(nn, DenseCore::kZero);
    for (std::size_t u = 0; u < nn; ++u) {
      if (!uf.bad[roots[u]]) shape->exps[u] = static_cast<std::uint8_t>(exps[u]);
    }
    shape->scalar = CycNum(p, 1L);
    sol.shape = std::move(shape);
  }
  return sol;
}

int WeilEngine::commutant_dimension() const { return solve_intertwiner(tensor(group_->identity(), 0)).dimension; }

std::uint64_t WeilEngine::lagrangian_key(const SpMat& g) const {
  const auto& f = field();
  std::array<std::array<Fq, 4>, 2> rows{};
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < 4; ++i) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] = g.at(i, r);
  // Row reduce the 2 x 4 matrix whose rows span gL.
  int prow = 0;
  for (int c = 0; c < 4 && prow < 2; ++c) {
    int piv = prow;
    while (piv < 2 && rows[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)] == 0) ++piv;
    if (piv == 2) continue;
    std::swap(rows[static_cast<std::size_t>(piv)], rows[static_cast<std::size_t>(prow)]);
    auto& pr = rows[static_cast<std::size_t>(prow)];
    const Fq inv = f.inv(pr[static_cast<std::size_t>(c)]);
    for (auto& x : pr) x = f.mul(x, inv);
    auto& other = rows[static_cast<std::size_t>(1 - prow)];
    const Fq factor = other[static_cast<std::size_t>(c)];
    for (int k = 0; k < 4; ++k) other[static_cast<std::size_t>(k)] = f.sub(other[static_cast<std::size_t>(k)], f.mul(factor, pr[static_cast<std::size_t>(k)]));
    ++prow;
  }
  std::uint64_t key = 0;
  for (const auto& r : rows)
    for (Fq x : r) key = key * static_cast<std::uint64_t>(q()) + x;
  return key;
}

int WeilEngine::rank_lower_left(const SpMat& g) const {
  const auto& f = field();
  const Fq det = f.sub(f.mul(g.at(2, 0), g.at(3, 1)), f.mul(g.at(2, 1), g.at(3, 0)));
  if (det != 0) return 2;
  if (g.at(2, 0) || g.at(2, 1) || g.at(3, 0) || g.at(3, 1)) return 1;
  return 0;
}

void WeilEngine::ensure_cores() const {
  std::call_once(cores_once_, [this] {
    if (q() > kDenseLimit) throw std::length_error("dense Weil operators are limited to q <= 5");
    const auto& g = *group_;
    const int p = this->p();
    const SpMat s2 = g.s2();
    auto sol = solve_intertwiner(tensor(s2, 0));
    if (sol.dimension != 1) throw std::logic_error("intertwiner space for s2 is not one-dimensional");
    std::shared_ptr<DenseCore> x = sol.shape;

    const auto p1 = subgroup_elements(g, SubgroupLabel::P1).elements;
    std::optional<CycNum> scalar;
    for (const auto& pe : p1) {
      const SpMat y = g.mul(s2, pe);
      Mat8 shifted = tensor(y, 0);
      for (int i = 0; i < 8; ++i) shifted[static_cast<std::size_t>(9 * i)] = field().sub(shifted[static_cast<std::size_t>(9 * i)], 1);
      const Fq d = det8(shifted);
      if (d == 0) continue;
      const CycNum tr = WeilOp(MonomialOp::identity(p, space_.dim()), x, siegel_op(pe, 0)).trace();
      if (tr.is_zero()) continue;
      scalar = CycNum(p, static_cast<long>(field().chi(d))) * cyc_inv(tr);
      break;
    }
    if (!scalar) throw std::logic_error("no probe element normalizes the s2 operator");
    x->scalar = *scalar;
    s2_core_ = x;

    auto sol2 = solve_intertwiner(tensor(g.w_long(), 0));
    if (sol2.dimension != 1) throw std::logic_error("intertwiner space for s2 s1 s2 is not one-dimensional");
    std::shared_ptr<DenseCore> w = sol2.shape;
    // Entry (0, 0) of rho(s2) rho(s1) rho(s2).
    const MonomialOp m = siegel_op(g.s1(), 0);
    std::vector<long> counts(static_cast<std::size_t>(p), 0);
    for (std::uint32_t k = 0; k < static_cast<std::uint32_t>(space_.dim()); ++k) {
      const std::uint8_t e1 = x->at(0, k);
      if (e1 == DenseCore::kZero) continue;
      const std::uint8_t e2 = x->at(m.target(k), 0);
      if (e2 == DenseCore::kZero) continue;
      counts[static_cast<std::size_t>((e1 + m.mult(k).e + e2) % p)] += m.mult(k).sign;
    }
    const CycNum entry = CycNum::from_exponent_counts(p, counts) * x->scalar * x->scalar;
    const std::uint8_t e00 = w->at(0, 0);
    if (e00 == DenseCore::kZero || entry.is_zero()) throw std::logic_error("long Weyl element core vanishes at the origin");
    w->scalar = entry * CycNum::zeta_power(p, -static_cast<long>(e00));
    w2_core_ = w;

    const SpMat wl = g.w_long();
    for (const auto& pe : p1) {
      bruhat_.emplace(lagrangian_key(g.mul(pe, s2)), pe);
      bruhat_.emplace(lagrangian_key(g.mul(pe, wl)), pe);
    }
  });
}

std::shared_ptr<const DenseCore> WeilEngine::s2_core() const {
  ensure_cores();
  return s2_core_;
}

std::shared_ptr<const DenseCore> WeilEngine::w2_core() const {
  ensure_cores();
  return w2_core_;
}

WeilOp WeilEngine::sp_op(const SpMat& g, int t) const {
  const auto& grp = *group_;
  if (!grp.is_symplectic(g)) throw StructuralError("sp_op needs an element of Sp(4, q)");
  if (in_p1(grp, g)) return WeilOp(siegel_op(g, t));
  ensure_cores();
  const int k = rank_lower_left(g);
  const SpMat w = k == 1 ? grp.s2() : grp.w_long();
  const auto& core = k == 1 ? s2_core_ : w2_core_;
  const auto it = bruhat_.find(lagrangian_key(g));
  if (it == bruhat_.end()) throw std::logic_error("Lagrangian missing from the Bruhat table");
  const SpMat& p1 = it->second;
  const SpMat rest = grp.mul(grp.mul(grp.inv(w), grp.inv(p1)), g);
  if (!in_p1(grp, rest)) throw std::logic_error("Bruhat remainder is not in P1");
  return WeilOp(siegel_op(p1, 0), core, siegel_op(rest, t));
}

std::optional<int> WeilEngine::eta_fast(const SpMat& g, int t) const {
  Mat8 m = tensor(g, t);
  for (int i = 0; i < 8; ++i) m[static_cast<std::size_t>(9 * i)] = field().sub(m[static_cast<std::size_t>(9 * i)], 1);
  const Fq d = det8(m);
  if (d == 0) return std::nullopt;
  return field().chi(d);
}

CycNum WeilEngine::eta(const SpMat& g, int t) const {
  if (const auto v = eta_fast(g, t)) return CycNum(p(), static_cast<long>(*v));
  return sp_op(g, t).trace();
}

}  // namespace theta10
