#pragma once

// Value-table types shared by the kernel builders and the Mellin transforms.
//
// A TraceFunction is a complex-valued function on F_q^*, stored in
// generator-log order: values[m] = t(g^m). Its Mellin spectrum is the
// length-(q-1) vector S_j = sum_m t(g^m) chi_j(g^m), a DFT in these
// coordinates.

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "expsum/ffield.hpp"
#include "expsum/summation.hpp"

namespace expsum {

enum class GoodnessRule { All, NontrivialOnly };

struct KernelMeta {
  std::string name = "custom";
  unsigned n = 0;            // kloosterman order, 0 otherwise
  bool normalized = false;   // carries the sheaf sign and q^{-(n-1)/2} twist
  double bound = 0.0;        // max |value| guaranteed when normalized, 0 = none
  GoodnessRule goodness = GoodnessRule::All;
  std::vector<std::uint32_t> psi_b;  // twist parameter of the psi used
};

struct TraceFunction {
  std::shared_ptr<const Field> field;
  std::vector<cdouble> values;  // length q-1, entry m holds t(generator^m)
  KernelMeta meta;
};

struct SpectrumMeta {
  std::string provenance = "naive";  // naive | fast | gauss-power
  std::string kernel = "custom";
  std::vector<std::uint32_t> psi_b;
};

struct MellinSpectrum {
  std::shared_ptr<const Field> field;
  std::vector<cdouble> values;  // length q-1, entry j holds S(t, chi_j)
  SpectrumMeta meta;
};

}  // namespace expsum
