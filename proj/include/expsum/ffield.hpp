#pragma once

// Exact arithmetic in F_q = F_{p^k}.
//
// Conventions (all deterministic so downstream tables are reproducible):
//  - elements are residue-coefficient vectors (c_0, ..., c_{k-1}) packed into
//    a single index  c_0 + c_1*p + ... + c_{k-1}*p^{k-1};
//  - the modulus is the lexicographically smallest monic irreducible of
//    degree k over F_p, coefficients compared low-degree-first (for k = 1
//    this rule yields the polynomial x);
//  - the generator is the smallest nonzero element in the same coefficient
//    order whose multiplicative order is exactly q - 1.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "expsum/errors.hpp"

namespace expsum {

// ---------------------------------------------------------------------------
// Integer helpers (shared with sweeps and tests).

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline std::vector<std::uint64_t> primes_in_range(std::uint64_t lo,
                                                  std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n <= hi; ++n)
    if (is_prime(n)) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------

/// A field element, stored as the packed coefficient index. Only meaningful
/// together with the Field that produced it.
struct FieldElement {
  std::uint32_t idx = 0;

  friend bool operator==(FieldElement a, FieldElement b) {
    return a.idx == b.idx;
  }
  friend bool operator!=(FieldElement a, FieldElement b) {
    return a.idx != b.idx;
  }
};

namespace detail {

// Dense polynomial arithmetic over F_p, used only during field construction.
using Poly = std::vector<std::uint32_t>;  // coeffs low-degree first

inline void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f,
                        std::uint64_t p) {
  std::vector<std::uint64_t> prod(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      prod[i + j] = (prod[i + j] + std::uint64_t(a[i]) * b[j]) % p;
  }
  // reduce mod monic f
  const std::size_t k = f.size() - 1;
  for (std::size_t i = prod.size(); i-- > k;) {
    const std::uint64_t c = prod[i];
    if (c == 0) continue;
    prod[i] = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint64_t sub = c * f[j] % p;
      prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
    }
  }
  Poly out(prod.begin(), prod.begin() + std::min<std::size_t>(k, prod.size()));
  out.resize(k, 0);
  for (auto& c : out) c %= p;
  poly_trim(out);
  return out;
}

inline Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f,
                        std::uint64_t p) {
  Poly result{1};
  while (e > 0) {
    if (e & 1) result = poly_mulmod(result, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return result;
}

inline Poly poly_mod(Poly a, const Poly& b, std::uint64_t p) {
  poly_trim(a);
  const std::size_t db = b.size() - 1;
  const std::uint64_t lead_inv = [&] {
    // inverse of b's leading coefficient mod p by Fermat
    std::uint64_t r = 1, x = b.back(), e = p - 2;
    while (e) {
      if (e & 1) r = r * x % p;
      x = x * x % p;
      e >>= 1;
    }
    return r;
  }();
  while (a.size() > db) {
    const std::uint64_t c = std::uint64_t(a.back()) * lead_inv % p;
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::uint64_t sub = c * b[j] % p;
      a[shift + j] = (a[shift + j] + p - sub) % p;
    }
    poly_trim(a);
    if (a.empty()) break;
  }
  return a;
}

inline Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Rabin test: f (monic, degree k) is irreducible over F_p iff
// x^{p^k} == x (mod f) and gcd(x^{p^{k/r}} - x, f) = 1 for every prime r | k.
inline bool poly_irreducible(const Poly& f, std::uint64_t p) {
  const std::size_t k = f.size() - 1;
  if (k == 1) return true;
  const Poly x{0, 1};
  std::uint64_t pk = 1;
  for (std::size_t i = 0; i < k; ++i) pk *= p;
  Poly xq = poly_powmod(x, pk, f, p);
  Poly diff = xq;
  diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
  diff[1] = (diff[1] + p - 1) % p;
  poly_trim(diff);
  if (!diff.empty()) return false;
  for (std::uint64_t r : prime_factors(k)) {
    std::uint64_t pe = 1;
    for (std::uint64_t i = 0; i < k / r; ++i) pe *= p;
    Poly xe = poly_powmod(x, pe, f, p);
    Poly d = xe;
    d.resize(std::max<std::size_t>(d.size(), 2), 0);
    d[1] = (d[1] + p - 1) % p;
    poly_trim(d);
    Poly g = poly_gcd(f, d, p);
    if (g.size() > 1) return false;
  }
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultFieldCeiling = 1ull << 26;

class Field {
 public:
  std::uint64_t p() const { return p_; }
  unsigned k() const { return k_; }
  std::uint64_t q() const { return q_; }
  FieldElement generator() const { return generator_; }

  /// Modulus coefficients, low-degree first, including the leading 1
  /// (length k + 1; for k = 1 this is [0, 1], i.e. the polynomial x).
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  FieldElement zero() const { return {0}; }
  FieldElement one() const { return {1}; }
  bool is_zero(FieldElement a) const { return a.idx == 0; }

  FieldElement from_residue(std::uint64_t r) const {
    return {static_cast<std::uint32_t>(r % p_)};
  }

  FieldElement from_coeffs(std::span<const std::uint32_t> c) const {
    std::uint64_t idx = 0;
    for (std::size_t i = std::min<std::size_t>(c.size(), k_); i-- > 0;)
      idx = idx * p_ + (c[i] % p_);
    return {static_cast<std::uint32_t>(idx)};
  }

  std::vector<std::uint32_t> coeffs(FieldElement a) const {
    std::vector<std::uint32_t> c(k_);
    std::uint64_t v = a.idx;
    for (unsigned i = 0; i < k_; ++i) {
      c[i] = static_cast<std::uint32_t>(v % p_);
      v /= p_;
    }
    return c;
  }

  FieldElement add(FieldElement a, FieldElement b) const {
    if (k_ == 1) return {static_cast<std::uint32_t>((a.idx + std::uint64_t(b.idx)) % p_)};
    std::uint64_t out = 0, va = a.idx, vb = b.idx, pw = 1;
    for (unsigned i = 0; i < k_; ++i) {
      out += (va % p_ + vb % p_) % p_ * pw;
      va /= p_;
      vb /= p_;
      pw *= p_;
    }
    return {static_cast<std::uint32_t>(out)};
  }

  FieldElement sub(FieldElement a, FieldElement b) const {
    if (k_ == 1) return {static_cast<std::uint32_t>((a.idx + p_ - b.idx) % p_)};
    std::uint64_t out = 0, va = a.idx, vb = b.idx, pw = 1;
    for (unsigned i = 0; i < k_; ++i) {
      out += (va % p_ + p_ - vb % p_) % p_ * pw;
      va /= p_;
      vb /= p_;
      pw *= p_;
    }
    return {static_cast<std::uint32_t>(out)};
  }

  FieldElement neg(FieldElement a) const { return sub(zero(), a); }

  FieldElement mul(FieldElement a, FieldElement b) const {
    if (k_ == 1) return {static_cast<std::uint32_t>(std::uint64_t(a.idx) * b.idx % p_)};
    return mul_ext(a, b);
  }

  FieldElement pow(FieldElement a, std::uint64_t e) const {
    FieldElement result = one();
    FieldElement base = a;
    while (e > 0) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }

  FieldElement inv(FieldElement a) const {
    if (is_zero(a)) throw DivisionByZeroError{};
    return pow(a, q_ - 2);
  }

  FieldElement div(FieldElement a, FieldElement b) const {
    return mul(a, inv(b));
  }

  /// Trace to the prime field: sum of the k Frobenius conjugates.
  std::uint32_t trace(FieldElement a) const {
    if (k_ == 1) return a.idx;
    std::uint64_t t = 0, v = a.idx;
    for (unsigned i = 0; i < k_; ++i) {
      t += std::uint64_t(v % p_) * trace_basis_[i] % p_;
      v /= p_;
    }
    return static_cast<std::uint32_t>(t % p_);
  }

  /// Norm to the prime field: product of the k Frobenius conjugates.
  std::uint32_t norm(FieldElement a) const {
    if (k_ == 1) return a.idx;
    if (is_zero(a)) return 0;
    FieldElement n = pow(a, (q_ - 1) / (p_ - 1));
    return static_cast<std::uint32_t>(n.idx);  // lies in the prime subfield
  }

  std::pair<std::uint32_t, std::uint32_t> trace_and_norm(FieldElement a) const {
    return {trace(a), norm(a)};
  }

  /// Rank of an element in the coefficient-lex order used for generator
  /// selection (c_0 compared first).
  std::uint64_t lex_rank(FieldElement a) const {
    std::uint64_t r = 0, v = a.idx;
    for (unsigned i = 0; i < k_; ++i) {
      r += (v % p_) * lex_pw_[i];
      v /= p_;
    }
    return r;
  }

  static std::shared_ptr<const Field> build(
      std::uint64_t p, unsigned k,
      std::uint64_t ceiling = kDefaultFieldCeiling);

 private:
  Field() = default;

  FieldElement mul_ext(FieldElement a, FieldElement b) const {
    std::uint32_t ca[64], cb[64];
    std::uint64_t va = a.idx, vb = b.idx;
    for (unsigned i = 0; i < k_; ++i) {
      ca[i] = static_cast<std::uint32_t>(va % p_);
      cb[i] = static_cast<std::uint32_t>(vb % p_);
      va /= p_;
      vb /= p_;
    }
    std::uint64_t prod[127] = {0};
    for (unsigned i = 0; i < k_; ++i) {
      if (ca[i] == 0) continue;
      for (unsigned j = 0; j < k_; ++j)
        prod[i + j] = (prod[i + j] + std::uint64_t(ca[i]) * cb[j]) % p_;
    }
    // fold x^{k+i} via the precomputed reductions
    for (unsigned i = k_; i <= 2 * k_ - 2; ++i) {
      const std::uint64_t c = prod[i];
      if (c == 0) continue;
      const auto& red = xk_mod_[i - k_];
      for (unsigned j = 0; j < k_; ++j)
        prod[j] = (prod[j] + c * red[j]) % p_;
    }
    std::uint64_t idx = 0;
    for (unsigned i = k_; i-- > 0;) idx = idx * p_ + prod[i];
    return {static_cast<std::uint32_t>(idx)};
  }

  std::uint64_t p_ = 0, q_ = 0;
  unsigned k_ = 0;
  FieldElement generator_{};
  std::vector<std::uint32_t> modulus_;                // length k+1, monic
  std::vector<std::vector<std::uint32_t>> xk_mod_;    // x^{k+i} mod f
  std::vector<std::uint32_t> trace_basis_;            // trace of x^i
  std::vector<std::uint64_t> lex_pw_;                 // p^{k-1-i}
};

inline std::shared_ptr<const Field> Field::build(std::uint64_t p, unsigned k,
                                                 std::uint64_t ceiling) {
  if (k == 0) throw DegreeZeroError{};
  if (!is_prime(p)) throw NotPrimeError{p};
  std::uint64_t q = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (q > ceiling / p) throw CeilingExceededError{q * p, ceiling};
    q *= p;
  }
  if (q > ceiling) throw CeilingExceededError{q, ceiling};

  auto field = std::shared_ptr<Field>(new Field());
  Field& f = *field;
  f.p_ = p;
  f.k_ = k;
  f.q_ = q;
  f.lex_pw_.resize(k);
  {
    std::uint64_t pw = 1;
    for (unsigned i = k; i-- > 0;) {
      f.lex_pw_[i] = pw;
      pw *= p;
    }
  }

  // Modulus: first irreducible monic polynomial in coefficient-lex order
  // (constant coefficient compared first).
  if (k == 1) {
    f.modulus_ = {0, 1};
  } else {
    std::vector<std::uint32_t> c(k, 0);
    bool found = false;
    while (!found) {
      detail::Poly cand(c.begin(), c.end());
      cand.push_back(1);
      if (detail::poly_irreducible(cand, p)) {
        f.modulus_.assign(cand.begin(), cand.end());
        found = true;
        break;
      }
      // advance lex odometer: last coefficient varies fastest
      int i = static_cast<int>(k) - 1;
      while (i >= 0 && ++c[i] == p) c[i--] = 0;
      if (i < 0) break;
    }
    if (!found) throw Error{"no irreducible modulus found"};  // unreachable

    f.xk_mod_.resize(k - 1);
    // x^k = -(c_{k-1} x^{k-1} + ... + c_0), then shift up and re-reduce
    std::vector<std::uint32_t> cur(k);
    for (unsigned j = 0; j < k; ++j)
      cur[j] = static_cast<std::uint32_t>((p - f.modulus_[j] % p) % p);
    f.xk_mod_[0] = cur;
    for (unsigned i = 1; i + 1 < k; ++i) {
      std::vector<std::uint32_t> next(k, 0);
      const std::uint64_t top = cur[k - 1];
      for (unsigned j = k - 1; j > 0; --j) next[j] = cur[j - 1];
      next[0] = 0;
      if (top != 0)
        for (unsigned j = 0; j < k; ++j)
          next[j] = static_cast<std::uint32_t>(
              (next[j] + top * f.xk_mod_[0][j]) % p);
      f.xk_mod_[i] = next;
      cur = std::move(next);
    }
  }

  // Trace of the basis monomials, via explicit Frobenius orbits.
  f.trace_basis_.assign(k, 0);
  if (k > 1) {
    for (unsigned i = 0; i < k; ++i) {
      std::uint64_t xi_idx = 1;
      for (unsigned j = 0; j < i; ++j) xi_idx *= p;
      FieldElement xi{static_cast<std::uint32_t>(xi_idx)};
      FieldElement acc = xi;
      FieldElement frob = xi;
      for (unsigned j = 1; j < k; ++j) {
        frob = f.pow(frob, p);
        acc = f.add(acc, frob);
      }
      f.trace_basis_[i] = static_cast<std::uint32_t>(acc.idx);  // in F_p
    }
  } else {
    f.trace_basis_[0] = 1;
  }

  // Generator: smallest nonzero element in coefficient-lex order of
  // multiplicative order exactly q - 1.
  const auto factors = prime_factors(q - 1);
  std::vector<std::uint32_t> c(k, 0);
  bool found = false;
  while (true) {
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && ++c[i] == p) c[i--] = 0;
    if (i < 0) break;
    // lex tuple (c_0 first) maps to coefficients in reverse: c[0] is the
    // most significant digit of the lex rank, i.e. coefficient c_0.
    FieldElement cand = f.from_coeffs(std::span<const std::uint32_t>(c));
    bool primitive = true;
    for (std::uint64_t r : factors) {
      if (f.pow(cand, (q - 1) / r) == f.one()) {
        primitive = false;
        break;
      }
    }
    if (primitive && f.pow(cand, q - 1) == f.one()) {
      f.generator_ = cand;
      found = true;
      break;
    }
  }
  if (!found) throw Error{"no generator found"};  // unreachable
  return field;
}

inline std::shared_ptr<const Field> build_field(
    std::uint64_t p, unsigned k, std::uint64_t ceiling = kDefaultFieldCeiling) {
  return Field::build(p, k, ceiling);
}

// ---------------------------------------------------------------------------

/// Discrete-log tables for F_q^*: exp[m] = generator^m and its inverse.
class LogTable {
 public:
  explicit LogTable(std::shared_ptr<const Field> field)
      : field_(std::move(field)) {
    const Field& f = *field_;
    const std::uint64_t n = f.q() - 1;
    exp_.resize(n);
    log_.assign(f.q(), kNoLog);
    FieldElement x = f.one();
    for (std::uint64_t m = 0; m < n; ++m) {
      exp_[m] = x.idx;
      log_[x.idx] = static_cast<std::uint32_t>(m);
      x = f.mul(x, f.generator());
    }
    if (x != f.one()) throw Error{"generator order mismatch"};
  }

  const Field& field() const { return *field_; }
  std::shared_ptr<const Field> field_ptr() const { return field_; }
  std::uint64_t n() const { return exp_.size(); }  // q - 1

  FieldElement exp_at(std::uint64_t m) const { return {exp_[m % n()]}; }

  std::uint32_t log_at(FieldElement a) const {
    if (a.idx == 0 || log_[a.idx] == kNoLog) throw ZeroArgumentError{};
    return log_[a.idx];
  }

  FieldElement mul(FieldElement a, FieldElement b) const {
    if (a.idx == 0 || b.idx == 0) return {0};
    return exp_at(std::uint64_t(log_at(a)) + log_at(b));
  }

  FieldElement inv(FieldElement a) const {
    const std::uint64_t m = log_at(a);
    return exp_at((n() - m) % n());
  }

 private:
  static constexpr std::uint32_t kNoLog = 0xffffffffu;
  std::shared_ptr<const Field> field_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
};

inline std::shared_ptr<const LogTable> build_log_table(
    std::shared_ptr<const Field> field) {
  return std::make_shared<const LogTable>(std::move(field));
}

}  // namespace expsum
