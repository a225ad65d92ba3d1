#pragma once

// The built-in trace functions on F_q^* and the scalar sums behind them.
//
// Normalized kernels carry the half-Tate twist and the sign that makes their
// Mellin values directly the unit-size sums of interest:
//
//   gauss        t(x) = -psi(x)/sqrt(q)
//   evans        t(x) = -psi(x - x^{-1})/sqrt(q)
//   rudnick      t(x) = -psi((x+1)/(x-1))/sqrt(q),  t(1) = 0
//   kloosterman  t(a) = (-1)^{n-1} Kl_n(a, q) / q^{(n-1)/2}
//
// The raw (unnormalized) variants drop sign and twist.

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>

#include "expsum/characters.hpp"
#include "expsum/errors.hpp"
#include "expsum/mellin.hpp"
#include "expsum/trace.hpp"

namespace expsum {

enum class KernelKind { Gauss, Kloosterman, Evans, Rudnick, Custom };

struct KernelSpec {
  KernelKind name = KernelKind::Gauss;
  unsigned n = 2;          // kloosterman only
  bool normalized = true;  // divide by the half-Tate twist, apply sheaf sign

  static KernelSpec gauss() { return {KernelKind::Gauss, 0, true}; }
  static KernelSpec evans() { return {KernelKind::Evans, 0, true}; }
  static KernelSpec rudnick() { return {KernelKind::Rudnick, 0, true}; }
  static KernelSpec kloosterman(unsigned n) {
    return {KernelKind::Kloosterman, n, true};
  }
};

inline const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::Gauss: return "gauss";
    case KernelKind::Kloosterman: return "kloosterman";
    case KernelKind::Evans: return "evans";
    case KernelKind::Rudnick: return "rudnick";
    default: return "custom";
  }
}

/// Which multiplicative characters the kernel's sums are unitary at.
inline GoodnessRule goodness_rule(KernelKind k) {
  switch (k) {
    case KernelKind::Gauss: return GoodnessRule::NontrivialOnly;
    case KernelKind::Rudnick: return GoodnessRule::NontrivialOnly;
    default: return GoodnessRule::All;
  }
}

/// g(psi, chi) = sum over x != 0 of psi(x) chi(x), by definition.
inline cdouble gauss_sum(const LogTable& table, const AdditiveCharacter& psi,
                         const MultiplicativeCharacter& chi) {
  if (psi.trivial()) throw TrivialPsiError{};
  const std::uint64_t n = table.n();
  const auto psis = psi_table(psi);
  KahanCSum acc;
  for (std::uint64_t m = 0; m < n; ++m) {
    const std::uint64_t e = (std::uint64_t(chi.j) * m) % n;
    acc += psis[table.exp_at(m).idx] *
           std::polar(1.0, 2.0 * std::numbers::pi * double(e) / double(n));
  }
  return acc.value();
}

inline constexpr double kNaiveKloostermanGuard = 1e8;

/// Kl_n(a, q) summed over all n-tuples with product a, cost O(q^{n-1}).
/// Guarded: n <= 4 and q^{n-1} <= 1e8.
inline cdouble kloosterman_naive(const LogTable& table,
                                 const AdditiveCharacter& psi, unsigned n,
                                 FieldElement a) {
  const Field& f = table.field();
  if (n == 0) throw Error{"kloosterman order must be >= 1"};
  if (f.is_zero(a)) throw ZeroArgumentError{};
  if (n > 4 || std::pow(double(f.q()), double(n - 1)) > kNaiveKloostermanGuard)
    throw CostGuardError{"naive Kl_" + std::to_string(n) + " at q=" +
                         std::to_string(f.q()) + " exceeds the cost guard"};

  const auto psis = psi_table(psi);
  const std::uint64_t N = table.n();
  const std::uint32_t la = table.log_at(a);
  if (n == 1) return psis[a.idx];

  // iterate exponents of the free coordinates; the last one is forced
  std::vector<std::uint64_t> m(n - 1, 0);
  KahanCSum acc;
  while (true) {
    std::uint64_t sum_logs = 0;
    FieldElement s = f.zero();
    for (unsigned i = 0; i < n - 1; ++i) {
      sum_logs += m[i];
      s = f.add(s, table.exp_at(m[i]));
    }
    const std::uint64_t last = (la + (N - sum_logs % N)) % N;
    s = f.add(s, table.exp_at(last));
    acc += psis[s.idx];
    unsigned i = 0;
    while (i < n - 1 && ++m[i] == N) m[i++] = 0;
    if (i == n - 1) break;
  }
  return acc.value();
}

/// Kl_n at every a by the definitional sum, total cost O(q^n). Guarded at
/// the same 1e8 budget as the single-value path; the fast Mellin evaluator
/// is the intended route at scale.
inline TraceFunction kloosterman_all_naive(const LogTable& table,
                                           const AdditiveCharacter& psi,
                                           unsigned n) {
  const Field& f = table.field();
  if (n == 0) throw Error{"kloosterman order must be >= 1"};
  if (n > 4 || std::pow(double(f.q()), double(n)) > kNaiveKloostermanGuard)
    throw CostGuardError{"naive all-argument Kl_" + std::to_string(n) +
                         " at q=" + std::to_string(f.q()) +
                         " exceeds the cost guard"};
  std::vector<cdouble> vals(table.n());
  for (std::uint64_t m = 0; m < table.n(); ++m)
    vals[m] = kloosterman_naive(table, psi, n, table.exp_at(m));
  KernelMeta meta;
  meta.name = "kloosterman";
  meta.n = n;
  meta.psi_b = f.coeffs(psi.b);
  return {table.field_ptr(), std::move(vals), std::move(meta)};
}

/// theta in [0, pi] with v = halfwidth * cos(theta). Values marginally out
/// of range (relative 1e-6) are clamped; beyond that is an error, since the
/// enclosing bound is a theorem.
inline double angle_from_real(double v, double halfwidth = 2.0) {
  if (std::abs(v) > halfwidth * (1.0 + 1e-6))
    throw OutOfRangeError{"value " + std::to_string(v) +
                          " outside [-h, h], h = " + std::to_string(halfwidth)};
  const double c = std::max(-1.0, std::min(1.0, v / halfwidth));
  return std::acos(c);
}

/// Build one of the named kernels as a full value table.
inline TraceFunction make_kernel(const std::shared_ptr<const LogTable>& table,
                                 const AdditiveCharacter& psi,
                                 const KernelSpec& spec) {
  const Field& f = table->field();
  const std::uint64_t N = table->n();
  const double rq = std::sqrt(double(f.q()));

  KernelMeta meta;
  meta.name = kernel_kind_name(spec.name);
  meta.normalized = spec.normalized;
  meta.goodness = goodness_rule(spec.name);
  meta.psi_b = f.coeffs(psi.b);

  if (spec.name == KernelKind::Kloosterman) {
    if (spec.n == 0) throw Error{"kloosterman order must be >= 1"};
    TraceFunction t = kloosterman_all_fast(*table, psi, spec.n);
    meta.n = spec.n;
    if (spec.normalized) {
      const double sign = (spec.n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n-1}
      const double scale = sign / std::pow(double(f.q()), (spec.n - 1) / 2.0);
      for (auto& v : t.values) v *= scale;
      meta.bound = double(spec.n);
    } else {
      meta.bound = double(spec.n) * std::pow(double(f.q()), (spec.n - 1) / 2.0);
    }
    t.meta = meta;
    return t;
  }

  if (psi.trivial()) throw TrivialPsiError{};
  const auto psis = psi_table(psi);
  std::vector<cdouble> vals(N);
  const double scale = spec.normalized ? -1.0 / rq : 1.0;

  switch (spec.name) {
    case KernelKind::Gauss:
      for (std::uint64_t m = 0; m < N; ++m)
        vals[m] = scale * psis[table->exp_at(m).idx];
      break;
    case KernelKind::Evans:
      for (std::uint64_t m = 0; m < N; ++m) {
        const FieldElement x = table->exp_at(m);
        const FieldElement xinv = table->exp_at((N - m) % N);
        vals[m] = scale * psis[f.sub(x, xinv).idx];
      }
      break;
    case KernelKind::Rudnick: {
      if (f.p() == 2) throw RudnickEvenCharError{};
      vals[0] = 0.0;  // extension by zero at x = 1
      for (std::uint64_t m = 1; m < N; ++m) {
        const FieldElement x = table->exp_at(m);
        const FieldElement num = f.add(x, f.one());
        const FieldElement den = f.sub(x, f.one());
        vals[m] = scale * psis[f.mul(num, table->inv(den)).idx];
      }
      break;
    }
    default:
      throw Error{"make_kernel: unsupported kernel kind"};
  }
  if (spec.normalized) meta.bound = 1.0 / rq;
  return {table->field_ptr(), std::move(vals), std::move(meta)};
}

}  // namespace expsum
