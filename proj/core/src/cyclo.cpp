#include "theta10/cyclo.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "theta10/gftower.hpp"

namespace theta10 {

namespace {

long mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

void require_prime_conductor(int p) {
  if (p < 3 || !is_prime(p)) {
    throw StructuralError("cyclotomic conductor must be an odd prime, got " + std::to_string(p));
  }
}

// Folds a length-p vector (indexed by exponent mod p) into canonical form.
std::vector<Rat> fold(std::vector<Rat>&& full, int p) {
  const Rat top = full[p - 1];
  full.resize(p - 1);
  if (sgn(top) != 0) {
    for (auto& c : full) c -= top;
  }
  return std::move(full);
}

}  // namespace

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

CycNum::CycNum(int p) : p_(p), c_(static_cast<std::size_t>(p - 1)) { require_prime_conductor(p); }

CycNum::CycNum(int p, const Rat& r) : CycNum(p) { c_[0] = r; }

CycNum CycNum::from_coeffs(int p, std::vector<Rat> coeffs) {
  require_prime_conductor(p);
  if (coeffs.size() != static_cast<std::size_t>(p - 1)) {
    throw StructuralError("cyclotomic coefficient vector must have p-1 entries");
  }
  CycNum out;
  out.p_ = p;
  out.c_ = std::move(coeffs);
  for (auto& c : out.c_) c.canonicalize();
  return out;
}

CycNum CycNum::zeta_power(int p, long k) {
  CycNum out(p);
  const long e = mod(k, p);
  if (e == p - 1) {
    for (auto& c : out.c_) c = -1;
  } else {
    out.c_[static_cast<std::size_t>(e)] = 1;
  }
  return out;
}

CycNum CycNum::from_exponent_counts(int p, std::span<const long> counts) {
  if (counts.size() != static_cast<std::size_t>(p)) {
    throw StructuralError("exponent histogram must have p entries");
  }
  CycNum out(p);
  const long top = counts[static_cast<std::size_t>(p - 1)];
  for (int i = 0; i < p - 1; ++i) out.c_[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)] - top;
  return out;
}

void CycNum::require_same(const CycNum& o) const {
  if (p_ != o.p_) {
    throw StructuralError("conductor mismatch: " + std::to_string(p_) + " vs " + std::to_string(o.p_));
  }
}

bool CycNum::is_zero() const {
  for (const auto& c : c_) {
    if (sgn(c) != 0) return false;
  }
  return true;
}

bool CycNum::is_rational() const {
  for (std::size_t i = 1; i < c_.size(); ++i) {
    if (sgn(c_[i]) != 0) return false;
  }
  return true;
}

bool CycNum::is_one() const { return is_rational() && !c_.empty() && c_[0] == 1; }

Rat CycNum::to_rational() const {
  if (!is_rational()) throw StructuralError("cyclotomic value is not rational: " + to_string());
  return c_.empty() ? Rat(0) : c_[0];
}

CycNum& CycNum::operator+=(const CycNum& o) {
  require_same(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

CycNum& CycNum::operator-=(const CycNum& o) {
  require_same(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

CycNum& CycNum::operator*=(const CycNum& o) {
  *this = *this * o;
  return *this;
}

CycNum& CycNum::operator*=(const Rat& r) {
  for (auto& c : c_) c *= r;
  return *this;
}

CycNum CycNum::operator-() const {
  CycNum out = *this;
  for (auto& c : out.c_) c = -c;
  return out;
}

CycNum operator*(const CycNum& a, const CycNum& b) {
  a.require_same(b);
  const int p = a.p_;
  std::vector<Rat> full(static_cast<std::size_t>(p));
  Rat tmp;
  for (int i = 0; i < p - 1; ++i) {
    if (sgn(a.c_[static_cast<std::size_t>(i)]) == 0) continue;
    for (int j = 0; j < p - 1; ++j) {
      if (sgn(b.c_[static_cast<std::size_t>(j)]) == 0) continue;
      tmp = a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j)];
      full[static_cast<std::size_t>((i + j) % p)] += tmp;
    }
  }
  CycNum out;
  out.p_ = p;
  out.c_ = fold(std::move(full), p);
  return out;
}

bool operator==(const CycNum& a, const CycNum& b) {
  if (a.p_ != b.p_) return false;
  return a.c_ == b.c_;
}

CycNum CycNum::galois(long k) const {
  const long e = mod(k, p_);
  if (e == 0) throw StructuralError("Galois exponent must be prime to the conductor");
  std::vector<Rat> full(static_cast<std::size_t>(p_));
  for (int i = 0; i < p_ - 1; ++i) full[static_cast<std::size_t>(mod(i * e, p_))] += c_[static_cast<std::size_t>(i)];
  CycNum out;
  out.p_ = p_;
  out.c_ = fold(std::move(full), p_);
  return out;
}

std::complex<double> CycNum::to_complex() const {
  std::complex<double> z{0.0, 0.0};
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int i = 0; i < p_ - 1; ++i) {
    const double w = two_pi * i / p_;
    z += c_[static_cast<std::size_t>(i)].get_d() * std::complex<double>(std::cos(w), std::sin(w));
  }
  return z;
}

std::string CycNum::approx(int digits) const {
  auto z = to_complex();
  auto clean = [digits](double x) {
    if (std::abs(x) < std::pow(10.0, -digits)) x = 0.0;
    return x;
  };
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f%+.*fi", digits, clean(z.real()), digits, clean(z.imag()));
  return buf;
}

std::string CycNum::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < p_ - 1; ++i) {
    const Rat& c = c_[static_cast<std::size_t>(i)];
    if (sgn(c) == 0) continue;
    if (!first) os << (sgn(c) > 0 ? " + " : " - ");
    else if (sgn(c) < 0) os << "-";
    Rat a = abs(c);
    if (i == 0) {
      os << a.get_str();
    } else {
      if (a != 1) os << a.get_str() << "*";
      os << "z" << p_;
      if (i > 1) os << "^" << i;
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

CycNum cyc_mul(const CycNum& a, const CycNum& b) { return a * b; }

CycNum cyc_inv(const CycNum& a) {
  if (a.is_zero()) throw std::domain_error("inverse of zero in Q(zeta_p)");
  const int p = a.conductor();
  const int n = p - 1;
  if (a.is_rational()) return CycNum(p, Rat(1) / a.to_rational());
  // Column j of the system is a * z^j; solve M x = e_0.
  std::vector<std::vector<Rat>> m(static_cast<std::size_t>(n), std::vector<Rat>(static_cast<std::size_t>(n + 1)));
  for (int j = 0; j < n; ++j) {
    const CycNum col = a * CycNum::zeta_power(p, j);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = col.coeffs()[static_cast<std::size_t>(i)];
  }
  m[0][static_cast<std::size_t>(n)] = 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && sgn(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) == 0) ++piv;
    if (piv == n) throw std::domain_error("singular multiplication matrix in cyc_inv");
    std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(col)]);
    auto& prow = m[static_cast<std::size_t>(col)];
    const Rat inv = Rat(1) / prow[static_cast<std::size_t>(col)];
    for (auto& x : prow) x *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      auto& row = m[static_cast<std::size_t>(r)];
      const Rat f = row[static_cast<std::size_t>(col)];
      if (sgn(f) == 0) continue;
      for (int k = col; k <= n; ++k) row[static_cast<std::size_t>(k)] -= f * prow[static_cast<std::size_t>(k)];
    }
  }
  std::vector<Rat> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)];
  return CycNum::from_coeffs(p, std::move(x));
}

CycNum additive_character(int p, long x) { return CycNum::zeta_power(p, x); }

CycNum gauss_sum(int p, int q) {
  auto tower = FieldTower::create(q);
  if (tower->p() != p) throw StructuralError("q must be a power of p");
  const FiniteField& f = tower->base();
  std::vector<long> counts(static_cast<std::size_t>(p), 0);
  for (int x = 0; x < q; ++x) {
    const Fq e = static_cast<Fq>(x);
    counts[static_cast<std::size_t>(f.trace(f.mul(e, e)))] += 1;
  }
  return CycNum::from_exponent_counts(p, counts);
}

nlohmann::ordered_json to_json(const CycNum& a) {
  nlohmann::ordered_json j;
  j["p"] = a.conductor();
  auto coeffs = nlohmann::ordered_json::array();
  for (const auto& c : a.coeffs()) {
    const mpz_class& num = c.get_num();
    const mpz_class& den = c.get_den();
    nlohmann::ordered_json pair = nlohmann::ordered_json::array();
    if (num.fits_slong_p()) pair.push_back(num.get_si());
    else pair.push_back(num.get_str());
    if (den.fits_slong_p()) pair.push_back(den.get_si());
    else pair.push_back(den.get_str());
    coeffs.push_back(std::move(pair));
  }
  j["coeffs"] = std::move(coeffs);
  j["approx"] = a.approx();
  return j;
}

CycNum cyc_from_json(const nlohmann::ordered_json& j) {
  const int p = j.at("p").get<int>();
  std::vector<Rat> coeffs;
  auto read = [](const nlohmann::ordered_json& v) {
    return v.is_string() ? mpz_class(v.get<std::string>()) : mpz_class(v.get<long>());
  };
  for (const auto& pair : j.at("coeffs")) {
    Rat r(read(pair.at(0)), read(pair.at(1)));
    r.canonicalize();
    coeffs.push_back(r);
  }
  return CycNum::from_coeffs(p, std::move(coeffs));
}

bool cosine_is_rational(long k, long m) {
  const long g = std::gcd(mod(k, m), m);
  const long order = m / (g == 0 ? m : g);
  return order == 1 || order == 2 || order == 3 || order == 4 || order == 6;
}

Rat rational_cosine(long k, long m) {
  const long kk = mod(k, m);
  const long g = std::gcd(kk, m);
  const long order = m / (g == 0 ? m : g);
  switch (order) {
    case 1: return Rat(1);
    case 2: return Rat(-1);
    case 3: return Rat(-1, 2);
    case 4: return Rat(0);
    case 6: return Rat(1, 2);
    default:
      throw StructuralError("cos(2pi*" + std::to_string(k) + "/" + std::to_string(m) + ") is irrational");
  }
}

}  // namespace theta10
