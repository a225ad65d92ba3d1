#pragma once

// Bulk Mellin transform over F_q^*: all character sums S(t, chi_j) at once.
//
//   forward:  S_j = sum_m t_m exp(+2*pi*i*j*m/(q-1))
//   inverse:  t_m = 1/(q-1) * sum_j S_j exp(-2*pi*i*j*m/(q-1))
//
// The naive paths are O(q^2) reference implementations with compensated
// accumulation; the fast paths run the arbitrary-length chirp-z DFT in
// O(q log q). kloosterman_all_fast evaluates Kl_n at every argument at once
// through the Gauss-sum power identity: the Mellin spectrum of
// a -> Kl_n(a, q) is chi -> g(psi, chi)^n.

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "expsum/characters.hpp"
#include "expsum/dft.hpp"
#include "expsum/ffield.hpp"
#include "expsum/summation.hpp"
#include "expsum/trace.hpp"

namespace expsum {

inline MellinSpectrum mellin_naive(const TraceFunction& t) {
  const std::uint64_t n = t.values.size();
  std::vector<cdouble> out(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    KahanCSum acc;
    for (std::uint64_t m = 0; m < n; ++m) {
      const std::uint64_t e = (j * m) % n;  // exact below the field ceiling
      acc += t.values[m] *
             std::polar(1.0, 2.0 * std::numbers::pi * double(e) / double(n));
    }
    out[j] = acc.value();
  }
  return {t.field, std::move(out), {"naive", t.meta.name, t.meta.psi_b}};
}

inline MellinSpectrum mellin_fast(const TraceFunction& t) {
  std::vector<cdouble> out = dft::dft_any(t.values, +1);
  return {t.field, std::move(out), {"fast", t.meta.name, t.meta.psi_b}};
}

inline MellinSpectrum mellin_fast(const TraceFunction& t,
                                  const dft::Plan& plan) {
  std::vector<cdouble> out = plan.execute(t.values, +1);
  return {t.field, std::move(out), {"fast", t.meta.name, t.meta.psi_b}};
}

inline TraceFunction inverse_mellin(const MellinSpectrum& s) {
  const std::size_t n = s.values.size();
  std::vector<cdouble> out = dft::dft_any(s.values, -1);
  const double scale = 1.0 / double(n);
  for (auto& v : out) v *= scale;
  KernelMeta meta;
  meta.name = "inverse(" + s.meta.kernel + ")";
  meta.psi_b = s.meta.psi_b;
  return {s.field, std::move(out), std::move(meta)};
}

inline TraceFunction inverse_mellin_naive(const MellinSpectrum& s) {
  const std::uint64_t n = s.values.size();
  std::vector<cdouble> out(n);
  for (std::uint64_t m = 0; m < n; ++m) {
    KahanCSum acc;
    for (std::uint64_t j = 0; j < n; ++j) {
      const std::uint64_t e = (j * m) % n;
      acc += s.values[j] *
             std::polar(1.0, -2.0 * std::numbers::pi * double(e) / double(n));
    }
    out[m] = acc.value() / double(n);
  }
  KernelMeta meta;
  meta.name = "inverse(" + s.meta.kernel + ")";
  meta.psi_b = s.meta.psi_b;
  return {s.field, std::move(out), std::move(meta)};
}

/// psi restricted to F_q^* in generator-log order; its Mellin spectrum is
/// the full family of Gauss sums j -> g(psi, chi_j).
inline TraceFunction psi_restriction(const LogTable& table,
                                     const AdditiveCharacter& psi) {
  const Field& f = table.field();
  const std::uint64_t n = table.n();
  const auto psis = psi_table(psi);
  std::vector<cdouble> vals(n);
  for (std::uint64_t m = 0; m < n; ++m) vals[m] = psis[table.exp_at(m).idx];
  KernelMeta meta;
  meta.name = "psi";
  meta.psi_b = f.coeffs(psi.b);
  return {table.field_ptr(), std::move(vals), std::move(meta)};
}

/// All Gauss sums g(psi, chi_j), j = 0..q-2, via one fast Mellin transform.
inline MellinSpectrum gauss_spectrum(const LogTable& table,
                                     const AdditiveCharacter& psi) {
  MellinSpectrum s = mellin_fast(psi_restriction(table, psi));
  s.meta.kernel = "gauss-raw";
  return s;
}

/// Unnormalized Kl_n(a, q) for every a in F_q^*, in O(q log q + q log n):
/// raise the Gauss spectrum entrywise to the n-th power and invert.
inline TraceFunction kloosterman_all_fast(const LogTable& table,
                                          const AdditiveCharacter& psi,
                                          unsigned n) {
  if (n == 0) throw Error{"kloosterman order must be >= 1"};
  if (psi.trivial()) throw TrivialPsiError{};
  const std::uint64_t len = table.n();
  dft::Plan plan(len);
  TraceFunction psi_t = psi_restriction(table, psi);
  std::vector<cdouble> spec = plan.execute(psi_t.values, +1);
  for (auto& g : spec) {
    cdouble acc{1.0, 0.0};
    cdouble base = g;
    unsigned e = n;
    while (e > 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    g = acc;
  }
  std::vector<cdouble> vals = plan.execute(spec, -1);
  const double scale = 1.0 / double(len);
  for (auto& v : vals) v *= scale;
  KernelMeta meta;
  meta.name = "kloosterman";
  meta.n = n;
  meta.normalized = false;
  meta.psi_b = table.field().coeffs(psi.b);
  TraceFunction out{table.field_ptr(), std::move(vals), std::move(meta)};
  return out;
}

/// Parseval residual |sum_j |S_j|^2 - (q-1) sum_m |t_m|^2| relative to the
/// right-hand side; an online sanity check for the fast path.
inline double parseval_residual(const TraceFunction& t,
                                const MellinSpectrum& s) {
  KahanSum lhs, rhs;
  for (const auto& v : s.values) lhs += std::norm(v);
  for (const auto& v : t.values) rhs += std::norm(v);
  const double r = double(t.values.size()) * rhs.value();
  if (r == 0.0) return std::abs(lhs.value());
  return std::abs(lhs.value() - r) / r;
}

}  // namespace expsum
