#pragma once

#include <complex>
#include <cstddef>

namespace expsum {

using cdouble = std::complex<double>;

/// Kahan-compensated accumulator. Works for double and std::complex<double>;
/// the compensation algebra only needs + and -.
template <typename Value>
struct KahanAccumulator {
  Value sum{};
  Value compensation{};

  void add(const Value& value) {
    const Value y = value - compensation;
    const Value t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }

  KahanAccumulator& operator+=(const Value& value) {
    add(value);
    return *this;
  }

  Value value() const { return sum; }
};

using KahanSum = KahanAccumulator<double>;
using KahanCSum = KahanAccumulator<cdouble>;

}  // namespace expsum
