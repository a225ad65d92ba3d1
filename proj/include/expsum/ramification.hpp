#pragma once

// Arithmetic over declared ramification profiles: Euler characteristics,
// tannakian dimensions, bad-character bounds and Deligne constants.
//
// Profiles are data, not derived objects: the Swan conductors, drops and
// slopes are inputs, and this module evaluates
//
//   euler characteristic (on G_m, perverse convention):
//       Sw_0 + Sw_inf + sum over finite singular points of (drop + Sw)
//   tannakian dimension = euler characteristic
//   bad-character bound = 2 * generic rank
//   Deligne constant    = 2g - 2 + N + sum of largest slopes
//
// Slopes are exact rationals so that 1/n stays 1/n.

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expsum/errors.hpp"

namespace expsum {

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw InvalidProfileError{"rational with zero denominator"};
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  /// Parses "a" or "a/b".
  static Rational parse(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)),
                    std::stoll(s.substr(slash + 1)));
  }
};

struct FinitePoint {
  std::string label;
  unsigned drop = 0;
  unsigned swan = 0;
};

struct SlopePoint {
  std::string label;  // point at infinity of the ambient curve
  Rational slope;     // largest break of the local monodromy there
};

struct RamificationProfile {
  std::string name;
  unsigned generic_rank = 0;
  unsigned swan0 = 0;
  unsigned swan_inf = 0;
  std::vector<FinitePoint> finite_points;
  std::vector<SlopePoint> slopes;  // optional; drives the Deligne constant
  unsigned genus = 0;

  void validate() const {
    for (const auto& pt : finite_points)
      if (pt.drop > generic_rank)
        throw InvalidProfileError{"drop exceeds the generic rank at " +
                                  pt.label};
  }
};

inline long long euler_characteristic(const RamificationProfile& profile) {
  profile.validate();
  long long chi = profile.swan0 + profile.swan_inf;
  for (const auto& pt : profile.finite_points) chi += pt.drop + pt.swan;
  return chi;
}

inline long long tannakian_dimension(const RamificationProfile& profile) {
  return euler_characteristic(profile);
}

inline long long bad_character_bound(const RamificationProfile& profile) {
  return 2ll * profile.generic_rank;
}

inline Rational deligne_constant(unsigned genus,
                                 std::span<const SlopePoint> points) {
  Rational c(2ll * genus - 2 + static_cast<long long>(points.size()));
  for (const auto& pt : points) c = c + pt.slope;
  return c;
}

inline std::optional<Rational> deligne_constant(
    const RamificationProfile& profile) {
  if (profile.slopes.empty()) return std::nullopt;
  return deligne_constant(profile.genus, profile.slopes);
}

/// Sheaf-level Euler characteristic on a general curve:
///   rank * (2 - 2g - punctures) - sum of all Swan conductors
///   - sum of drops at interior singular points.
inline long long sheaf_euler_characteristic(
    unsigned rank, unsigned genus, unsigned punctures,
    std::span<const unsigned> boundary_swans,
    std::span<const FinitePoint> interior) {
  long long chi =
      static_cast<long long>(rank) * (2ll - 2ll * genus - punctures);
  for (unsigned s : boundary_swans) chi -= s;
  for (const auto& pt : interior) chi -= static_cast<long long>(pt.drop) +
                                         pt.swan;
  return chi;
}

struct DimensionReport {
  long long euler_char = 0;
  long long tannakian_dim = 0;
  long long bad_char_bound = 0;
  std::optional<Rational> deligne_constant;
};

inline DimensionReport analyze(const RamificationProfile& profile) {
  DimensionReport r;
  r.euler_char = euler_characteristic(profile);
  r.tannakian_dim = r.euler_char;
  r.bad_char_bound = bad_character_bound(profile);
  r.deligne_constant = deligne_constant(profile);
  return r;
}

/// Built-in profiles: "gauss", "evans", "rudnick", "kloosterman(n)".
inline RamificationProfile builtin_profile(const std::string& name) {
  if (name == "gauss") {
    RamificationProfile p;
    p.name = "gauss";
    p.generic_rank = 1;
    p.swan0 = 0;
    p.swan_inf = 1;
    p.slopes = {{"0", Rational(0)}, {"inf", Rational(1)}};
    return p;
  }
  if (name == "evans") {
    RamificationProfile p;
    p.name = "evans";
    p.generic_rank = 1;
    p.swan0 = 1;
    p.swan_inf = 1;
    p.slopes = {{"0", Rational(1)}, {"inf", Rational(1)}};
    return p;
  }
  if (name == "rudnick") {
    RamificationProfile p;
    p.name = "rudnick";
    p.generic_rank = 1;
    p.swan0 = 0;
    p.swan_inf = 0;
    p.finite_points = {{"1", 1, 1}};
    // lisse locus G_m minus {1}: three boundary points, wild only at 1
    p.slopes = {{"0", Rational(0)}, {"1", Rational(1)}, {"inf", Rational(0)}};
    return p;
  }
  if (name.rfind("kloosterman(", 0) == 0 && name.back() == ')') {
    const std::string inner = name.substr(12, name.size() - 13);
    long long n = 0;
    try {
      n = std::stoll(inner);
    } catch (...) {
      throw UnknownProfileError{name};
    }
    if (n < 1) throw UnknownProfileError{name};
    RamificationProfile p;
    p.name = name;
    p.generic_rank = static_cast<unsigned>(n);
    p.swan0 = 0;
    p.swan_inf = 1;  // all breaks at infinity equal to 1/n
    p.slopes = {{"0", Rational(0)}, {"inf", Rational(1, n)}};
    return p;
  }
  throw UnknownProfileError{name};
}

inline std::map<std::string, RamificationProfile> builtin_profiles(
    unsigned kloosterman_n = 2) {
  std::map<std::string, RamificationProfile> out;
  for (const char* name : {"gauss", "evans", "rudnick"})
    out.emplace(name, builtin_profile(name));
  const std::string kl = "kloosterman(" + std::to_string(kloosterman_n) + ")";
  out.emplace(kl, builtin_profile(kl));
  return out;
}

}  // namespace expsum
