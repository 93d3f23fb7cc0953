#pragma once

// Reference computations for prime q on plain integers mod p.  They share no
// code with the library and serve as independent oracles in the tests.

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline long mod(long a, long p) { return ((a % p) + p) % p; }

inline long pow_mod(long a, long e, long p) {
  long r = 1;
  a = mod(a, p);
  for (; e > 0; e >>= 1, a = a * a % p)
    if (e & 1) r = r * a % p;
  return r;
}

/// Legendre symbol by Euler's criterion.
inline int legendre(long a, long p) {
  a = mod(a, p);
  if (a == 0) return 0;
  return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

using IMat = std::vector<std::vector<long>>;

/// Integer determinant by cofactor expansion along the first row.
inline long det_cofactor(const IMat& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  long d = 0;
  for (std::size_t c = 0; c < n; ++c) {
    IMat minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    d += (c % 2 ? -1 : 1) * m[0][c] * det_cofactor(minor);
  }
  return d;
}

inline long det_mod(const IMat& m, long p) { return mod(det_cofactor(m), p); }

inline IMat mat_mul(const IMat& a, const IMat& b, long p) {
  const std::size_t n = a.size();
  IMat c(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long s = 0;
      for (std::size_t k = 0; k < n; ++k) s += a[i][k] * b[k][j];
      c[i][j] = mod(s, p);
    }
  return c;
}

inline IMat transpose(const IMat& a) {
  IMat t(a[0].size(), std::vector<long>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline IMat gram() { return {{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}}; }

inline bool is_symplectic(const IMat& g, long p) {
  IMat j = gram();
  for (auto& r : j)
    for (auto& x : r) x = mod(x, p);
  return mat_mul(mat_mul(transpose(g), j, p), g, p) == j;
}

/// sum_{x in F_p} z^{x^2} as exponent counts (index = exponent mod p).
inline std::vector<long> gauss_counts(long p) {
  std::vector<long> c(static_cast<std::size_t>(p), 0);
  for (long x = 0; x < p; ++x) ++c[static_cast<std::size_t>(x * x % p)];
  return c;
}

/// E = F_p[i]/(i^2 - n) with n the least non-residue; elements a + b i.
struct Quad {
  long p, n;
  explicit Quad(long p_) : p(p_), n(2) {
    while (legendre(n, p) != -1) ++n;
  }
  using E = std::pair<long, long>;
  E mul(E x, E y) const {
    return {mod(x.first * y.first + n * x.second * y.second, p), mod(x.first * y.second + x.second * y.first, p)};
  }
  E conj(E x) const { return {x.first, mod(-x.second, p)}; }
  long norm(E x) const { return mod(x.first * x.first - n * x.second * x.second, p); }
  std::vector<E> units() const {
    std::vector<E> u;
    for (long a = 0; a < p; ++a)
      for (long b = 0; b < p; ++b)
        if (norm({a, b}) == 1) u.push_back({a, b});
    return u;
  }
  /// A generator of the norm-one group.
  E unit_generator() const {
    for (const E& u : units()) {
      E x = u;
      long ord = 1;
      while (x != E{1, 0}) { x = mul(x, u); ++ord; }
      if (ord == p + 1) return u;
    }
    return {1, 0};
  }
};

/// Isotypic dimensions of Maps(E x E) under O(E) = <u> x| <sigma>, from the
/// permutation character: dim W_theta = (1/(q+1)) sum_k conj(theta(u^k)) fix(u^k),
/// trace of Lambda on W_theta = (1/(q+1)) sum_k theta(u^k) fix(sigma u^k).
struct IsoDims {
  long w1, w1_plus, w1_minus, wnu_plus, wnu_minus, wtheta;
  friend bool operator==(const IsoDims&, const IsoDims&) = default;
};

inline IsoDims iso_dims(long p) {
  const Quad e(p);
  const auto u = e.unit_generator();
  const long m = p + 1;
  std::vector<long> fix_rot(static_cast<std::size_t>(m)), fix_ref(static_cast<std::size_t>(m));
  Quad::E uk{1, 0};
  for (long k = 0; k < m; ++k, uk = e.mul(uk, u)) {
    long fr = 0, ff = 0;
    for (long a = 0; a < p * p; ++a)
      for (long b = 0; b < p * p; ++b) {
        const Quad::E x{a % p, a / p}, y{b % p, b / p};
        if (e.mul(uk, x) == x && e.mul(uk, y) == y) ++fr;
        if (e.conj(e.mul(uk, x)) == x && e.conj(e.mul(uk, y)) == y) ++ff;
      }
    fix_rot[static_cast<std::size_t>(k)] = fr;
    fix_ref[static_cast<std::size_t>(k)] = ff;
  }
  auto dim = [&](long j) {
    std::complex<double> s = 0;
    for (long k = 0; k < m; ++k)
      s += std::polar(1.0, -2 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(m)) *
           static_cast<double>(fix_rot[static_cast<std::size_t>(k)]);
    return std::lround(s.real() / static_cast<double>(m));
  };
  auto lam = [&](long j) {
    long s = 0;
    // Only the real characters j = 0 and j = (q+1)/2 occur: theta(u^k) = 1 or (-1)^k.
    for (long k = 0; k < m; ++k) s += (j == 0 || k % 2 == 0 ? 1 : -1) * fix_ref[static_cast<std::size_t>(k)];
    return s / m;
  };
  const long nu = m / 2;
  IsoDims d{};
  d.w1 = dim(0);
  d.w1_plus = (d.w1 + lam(0)) / 2;
  d.w1_minus = (d.w1 - lam(0)) / 2;
  const long wnu = dim(nu), lnu = lam(nu);
  d.wnu_plus = (wnu + lnu) / 2;
  d.wnu_minus = (wnu - lnu) / 2;
  d.wtheta = dim(1);
  return d;
}

/// (1/|G|) sum over a class list of |C| |chi|^2 for an integer-valued character.
inline double norm_squared(const std::vector<long>& values, const std::vector<std::uint64_t>& sizes) {
  double s = 0, n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += static_cast<double>(sizes[i]) * static_cast<double>(values[i] * values[i]);
    n += static_cast<double>(sizes[i]);
  }
  return s / n;
}

}  // namespace oracle
