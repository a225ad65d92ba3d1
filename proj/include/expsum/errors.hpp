#pragma once

#include <stdexcept>
#include <string>

namespace expsum {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Field construction / arithmetic
struct NotPrimeError : Error {
  explicit NotPrimeError(unsigned long long p)
      : Error("not prime: " + std::to_string(p)) {}
};
struct DegreeZeroError : Error {
  DegreeZeroError() : Error("extension degree must be >= 1") {}
};
struct CeilingExceededError : Error {
  CeilingExceededError(unsigned long long q, unsigned long long ceiling)
      : Error("field size " + std::to_string(q) + " exceeds ceiling " +
              std::to_string(ceiling)) {}
};
struct DivisionByZeroError : Error {
  DivisionByZeroError() : Error("division by zero field element") {}
};
struct ZeroArgumentError : Error {
  ZeroArgumentError() : Error("zero argument where a unit is required") {}
};

// Kernels
struct TrivialPsiError : Error {
  TrivialPsiError() : Error("additive character must be nontrivial") {}
};
struct CostGuardError : Error {
  explicit CostGuardError(const std::string& what) : Error(what) {}
};
struct OutOfRangeError : Error {
  explicit OutOfRangeError(const std::string& what) : Error(what) {}
};
struct RudnickEvenCharError : Error {
  RudnickEvenCharError()
      : Error("rudnick kernel requires odd characteristic") {}
};

// Statistics
struct EmptySamplesError : Error {
  EmptySamplesError() : Error("empty sample set") {}
};
struct MissingParamError : Error {
  explicit MissingParamError(const std::string& name)
      : Error("missing parameter: " + name) {}
};

// Ramification
struct UnknownProfileError : Error {
  explicit UnknownProfileError(const std::string& name)
      : Error("unknown ramification profile: " + name) {}
};
struct InvalidProfileError : Error {
  explicit InvalidProfileError(const std::string& what) : Error(what) {}
};

}  // namespace expsum
