#pragma once

// Additive characters psi_b and multiplicative characters chi_j of F_q,
// evaluated to unit complex values.
//
//   psi_b(x) = exp(2*pi*i * Tr(b*x) / p)        (lift of the trace in [0, p))
//   chi_j(g^m) = exp(2*pi*i * j*m / (q-1))      (g the field generator)
//
// chi_j(0) is undefined; callers treat it as a zero contribution.

#include <complex>
#include <memory>
#include <numbers>
#include <numeric>
#include <vector>

#include "expsum/errors.hpp"
#include "expsum/ffield.hpp"
#include "expsum/summation.hpp"

namespace expsum {

struct AdditiveCharacter {
  std::shared_ptr<const Field> field;
  FieldElement b;

  bool trivial() const { return field->is_zero(b); }

  cdouble eval(FieldElement x) const {
    const std::uint32_t t = field->trace(field->mul(b, x));
    const double angle =
        2.0 * std::numbers::pi * double(t) / double(field->p());
    return std::polar(1.0, angle);
  }

  friend bool operator==(const AdditiveCharacter& a,
                         const AdditiveCharacter& b) {
    return a.field->p() == b.field->p() && a.field->k() == b.field->k() &&
           a.field->modulus() == b.field->modulus() && a.b == b.b;
  }
};

struct MultiplicativeCharacter {
  std::shared_ptr<const Field> field;
  std::shared_ptr<const LogTable> table;
  std::uint32_t j = 0;  // index mod q-1

  bool trivial() const { return j == 0; }

  std::uint64_t order() const {
    const std::uint64_t n = field->q() - 1;
    return n / std::gcd<std::uint64_t>(j, n);
  }

  cdouble eval(FieldElement x) const {
    const std::uint64_t n = field->q() - 1;
    const std::uint64_t m = table->log_at(x);  // throws ZeroArgument on 0
    const std::uint64_t e = (std::uint64_t(j) * m) % n;
    return std::polar(1.0, 2.0 * std::numbers::pi * double(e) / double(n));
  }

  MultiplicativeCharacter conjugate() const {
    const std::uint64_t n = field->q() - 1;
    return {field, table, static_cast<std::uint32_t>((n - j) % n)};
  }

  friend bool operator==(const MultiplicativeCharacter& a,
                         const MultiplicativeCharacter& b) {
    return a.field->p() == b.field->p() && a.field->k() == b.field->k() &&
           a.field->modulus() == b.field->modulus() && a.j == b.j;
  }
};

/// All q additive characters, ordered by the packed index of b (the trivial
/// character first).
inline std::vector<AdditiveCharacter> additive_characters(
    std::shared_ptr<const Field> field) {
  std::vector<AdditiveCharacter> out;
  out.reserve(field->q());
  for (std::uint64_t i = 0; i < field->q(); ++i)
    out.push_back({field, FieldElement{static_cast<std::uint32_t>(i)}});
  return out;
}

/// All q-1 multiplicative characters, ordered by index j (chi_0 first).
inline std::vector<MultiplicativeCharacter> multiplicative_characters(
    std::shared_ptr<const LogTable> table) {
  auto field = table->field_ptr();
  std::vector<MultiplicativeCharacter> out;
  out.reserve(field->q() - 1);
  for (std::uint64_t j = 0; j + 1 < field->q(); ++j)
    out.push_back({field, table, static_cast<std::uint32_t>(j)});
  return out;
}

/// Sum of chi over F_q^*: q-1 for the trivial character, 0 otherwise.
inline cdouble orthogonality_sum(const MultiplicativeCharacter& chi) {
  const std::uint64_t n = chi.field->q() - 1;
  KahanCSum acc;
  for (std::uint64_t m = 0; m < n; ++m) {
    const std::uint64_t e = (std::uint64_t(chi.j) * m) % n;
    acc += std::polar(1.0, 2.0 * std::numbers::pi * double(e) / double(n));
  }
  return acc.value();
}

/// psi values tabulated by element index (size q). The workhorse behind
/// kernel construction; avoids re-deriving traces in hot loops.
inline std::vector<cdouble> psi_table(const AdditiveCharacter& psi) {
  const Field& f = *psi.field;
  const std::uint64_t p = f.p();
  std::vector<cdouble> roots(p);
  for (std::uint64_t t = 0; t < p; ++t)
    roots[t] = std::polar(1.0, 2.0 * std::numbers::pi * double(t) / double(p));
  std::vector<cdouble> out(f.q());
  if (f.k() == 1) {
    const std::uint64_t b = psi.b.idx;
    for (std::uint64_t x = 0; x < f.q(); ++x) out[x] = roots[b * x % p];
  } else {
    for (std::uint64_t x = 0; x < f.q(); ++x) {
      FieldElement e{static_cast<std::uint32_t>(x)};
      out[x] = roots[f.trace(f.mul(psi.b, e))];
    }
  }
  return out;
}

}  // namespace expsum
