#pragma once

// Seeded Haar-measure samplers for the compact groups U(1), SU(2), SU(n)
// and USp(2n), producing the trace samples used as random-matrix references.
//
// SU(2) additionally has an exact class-space sampler: the trace pushforward
// of Haar measure is (2/pi) sin^2(theta) d(theta) on [0, pi], inverted by
// Newton with a bisection bracket.
//
// Matrix sampling follows the standard constructions: modified Gram-Schmidt
// of a complex Ginibre matrix (the positive-real-diagonal QR, which is
// Haar on U(n)), a determinant-phase correction for SU(n), and quaternionic
// Gram-Schmidt embedded into C^{2n x 2n} for USp(2n).
//
// All randomness is drawn from mt19937_64 through explicit bit manipulation,
// so identical seeds give bit-identical streams on every platform.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "expsum/errors.hpp"
#include "expsum/summation.hpp"

namespace expsum {

struct GroupSpec {
  enum class Kind { U1, SU2, SUn, USp2n };
  Kind kind = Kind::SU2;
  unsigned n = 2;  // SUn: matrix size; USp2n: quaternionic size (traces 2n)

  unsigned trace_dim() const {
    switch (kind) {
      case Kind::U1: return 1;
      case Kind::SU2: return 2;
      case Kind::SUn: return n;
      case Kind::USp2n: return 2 * n;
    }
    return 0;
  }

  bool real_traces() const {
    return kind == Kind::SU2 || kind == Kind::USp2n;
  }

  std::string name() const {
    switch (kind) {
      case Kind::U1: return "u1";
      case Kind::SU2: return "su2";
      case Kind::SUn: return "sun:" + std::to_string(n);
      case Kind::USp2n: return "uspn:" + std::to_string(n);
    }
    return "?";
  }

  /// Parses "u1", "su2", "sun:N", "uspn:N".
  static GroupSpec parse(const std::string& s) {
    if (s == "u1") return {Kind::U1, 1};
    if (s == "su2") return {Kind::SU2, 2};
    auto parse_n = [&](std::size_t at) -> unsigned {
      const unsigned long v = std::stoul(s.substr(at));
      if (v == 0) throw Error{"group size must be >= 1"};
      return static_cast<unsigned>(v);
    };
    if (s.rfind("sun:", 0) == 0) {
      const unsigned v = parse_n(4);
      if (v < 2) throw Error{"sun:N needs N >= 2"};
      return {Kind::SUn, v};
    }
    if (s.rfind("uspn:", 0) == 0) return {Kind::USp2n, parse_n(5)};
    throw Error{"unknown group: " + s};
  }
};

/// Deterministic random stream: mt19937_64 plus hand-rolled uniform and
/// Gaussian transforms (std distributions are not bit-stable across
/// standard libraries).
class SeededRng {
 public:
  static constexpr const char* algorithm = "mt19937_64";

  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform01_open() { return double((gen_() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01_open()));
    const double t = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Independent stream for a worker: reseed by mixing the base seed with the
/// stream index (splitmix64 finalizer).
inline SeededRng derive_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return SeededRng(z ^ (z >> 31));
}

inline double sato_tate_cdf_value(double theta) {
  return (theta - std::sin(theta) * std::cos(theta)) / std::numbers::pi;
}

/// Inverse Sato-Tate CDF: the unique theta in [0, pi] with
/// (theta - sin(theta)cos(theta))/pi = u, to |F(theta) - u| <= 1e-12.
inline double su2_angle_from_uniform(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return std::numbers::pi;
  double lo = 0.0, hi = std::numbers::pi;
  double theta = std::numbers::pi * u;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = sato_tate_cdf_value(theta) - u;
    if (std::abs(f) <= 1e-12) break;
    if (f > 0)
      hi = theta;
    else
      lo = theta;
    const double s = std::sin(theta);
    const double deriv = 2.0 * s * s / std::numbers::pi;
    double next = theta - f / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    theta = next;
  }
  return theta;
}

inline double sample_su2_angle(SeededRng& rng) {
  return su2_angle_from_uniform(rng.uniform01());
}

// ---------------------------------------------------------------------------

/// Minimal dense complex matrix, row-major. Just enough for sampling and
/// the unitarity/symplectic checks in the tests.
struct Matrix {
  unsigned n = 0;
  std::vector<cdouble> a;

  Matrix() = default;
  explicit Matrix(unsigned size) : n(size), a(std::size_t(size) * size) {}

  cdouble& at(unsigned i, unsigned j) { return a[std::size_t(i) * n + j]; }
  const cdouble& at(unsigned i, unsigned j) const {
    return a[std::size_t(i) * n + j];
  }

  static Matrix identity(unsigned size) {
    Matrix m(size);
    for (unsigned i = 0; i < size; ++i) m.at(i, i) = 1.0;
    return m;
  }

  cdouble trace() const {
    KahanCSum t;
    for (unsigned i = 0; i < n; ++i) t += at(i, i);
    return t.value();
  }
};

inline Matrix mat_mul(const Matrix& x, const Matrix& y) {
  Matrix out(x.n);
  for (unsigned i = 0; i < x.n; ++i)
    for (unsigned k = 0; k < x.n; ++k) {
      const cdouble v = x.at(i, k);
      if (v == cdouble{}) continue;
      for (unsigned j = 0; j < x.n; ++j) out.at(i, j) += v * y.at(k, j);
    }
  return out;
}

inline Matrix mat_adjoint(const Matrix& x) {
  Matrix out(x.n);
  for (unsigned i = 0; i < x.n; ++i)
    for (unsigned j = 0; j < x.n; ++j) out.at(i, j) = std::conj(x.at(j, i));
  return out;
}

namespace detail {

inline cdouble mat_det(Matrix m) {
  // Gaussian elimination with partial pivoting; n is small here.
  cdouble det{1.0, 0.0};
  for (unsigned c = 0; c < m.n; ++c) {
    unsigned pivot = c;
    for (unsigned r = c + 1; r < m.n; ++r)
      if (std::abs(m.at(r, c)) > std::abs(m.at(pivot, c))) pivot = r;
    if (std::abs(m.at(pivot, c)) == 0.0) return {0.0, 0.0};
    if (pivot != c) {
      for (unsigned j = 0; j < m.n; ++j) std::swap(m.at(pivot, j), m.at(c, j));
      det = -det;
    }
    det *= m.at(c, c);
    const cdouble inv = 1.0 / m.at(c, c);
    for (unsigned r = c + 1; r < m.n; ++r) {
      const cdouble f = m.at(r, c) * inv;
      for (unsigned j = c; j < m.n; ++j) m.at(r, j) -= f * m.at(c, j);
    }
  }
  return det;
}

/// Haar U(n): modified Gram-Schmidt of a complex Ginibre matrix. Column
/// normalization makes the implicit R have positive real diagonal, which is
/// exactly the convention under which Q is Haar-distributed.
inline Matrix haar_unitary(unsigned n, SeededRng& rng) {
  Matrix g(n);
  for (auto& v : g.a) v = cdouble{rng.gaussian(), rng.gaussian()};
  for (unsigned j = 0; j < n; ++j) {
    for (unsigned i = 0; i < j; ++i) {
      cdouble dot{};
      for (unsigned r = 0; r < n; ++r)
        dot += std::conj(g.at(r, i)) * g.at(r, j);
      for (unsigned r = 0; r < n; ++r) g.at(r, j) -= dot * g.at(r, i);
    }
    double norm2 = 0.0;
    for (unsigned r = 0; r < n; ++r) norm2 += std::norm(g.at(r, j));
    const double inv = 1.0 / std::sqrt(norm2);
    for (unsigned r = 0; r < n; ++r) g.at(r, j) *= inv;
  }
  return g;
}

struct Quat {
  double w = 0, x = 0, y = 0, z = 0;

  friend Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quat operator-(const Quat& a, const Quat& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  Quat conj() const { return {w, -x, -y, -z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  Quat scaled(double s) const { return {w * s, x * s, y * s, z * s}; }
};

/// Haar USp(2n) as the complex embedding of a Haar quaternionic unitary,
/// itself obtained by right-module Gram-Schmidt of a quaternion Ginibre.
inline Matrix haar_symplectic(unsigned n, SeededRng& rng) {
  std::vector<Quat> q(std::size_t(n) * n);
  for (auto& v : q)
    v = {rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()};
  auto at = [&](unsigned i, unsigned j) -> Quat& {
    return q[std::size_t(i) * n + j];
  };
  for (unsigned j = 0; j < n; ++j) {
    for (unsigned i = 0; i < j; ++i) {
      Quat dot{};
      for (unsigned r = 0; r < n; ++r) {
        const Quat t = at(r, i).conj() * at(r, j);
        dot = {dot.w + t.w, dot.x + t.x, dot.y + t.y, dot.z + t.z};
      }
      for (unsigned r = 0; r < n; ++r)
        at(r, j) = at(r, j) - at(r, i) * dot;
    }
    double norm2 = 0.0;
    for (unsigned r = 0; r < n; ++r) norm2 += at(r, j).norm2();
    const double inv = 1.0 / std::sqrt(norm2);
    for (unsigned r = 0; r < n; ++r) at(r, j) = at(r, j).scaled(inv);
  }
  // q = alpha + beta j embeds as [[alpha, beta], [-conj(beta), conj(alpha)]]
  // in the basis that makes the preserved form J = [[0, I], [-I, 0]].
  Matrix out(2 * n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) {
      const Quat& v = at(i, j);
      const cdouble alpha{v.w, v.x}, beta{v.y, v.z};
      out.at(i, j) = alpha;
      out.at(i, n + j) = beta;
      out.at(n + i, j) = -std::conj(beta);
      out.at(n + i, n + j) = std::conj(alpha);
    }
  return out;
}

}  // namespace detail

/// One Haar-distributed matrix from the given group.
inline Matrix sample_unitary(const GroupSpec& group, SeededRng& rng) {
  switch (group.kind) {
    case GroupSpec::Kind::U1: {
      Matrix m(1);
      m.at(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01());
      return m;
    }
    case GroupSpec::Kind::SU2:
    case GroupSpec::Kind::SUn: {
      const unsigned n = (group.kind == GroupSpec::Kind::SU2) ? 2 : group.n;
      Matrix g = detail::haar_unitary(n, rng);
      // divide out an n-th root of the determinant phase; any measurable
      // branch pushes Haar U(n) onto Haar SU(n)
      const double phase = std::arg(detail::mat_det(g));
      const cdouble corr = std::polar(1.0, -phase / double(n));
      for (auto& v : g.a) v *= corr;
      return g;
    }
    case GroupSpec::Kind::USp2n:
      return detail::haar_symplectic(group.n, rng);
  }
  throw Error{"unreachable group kind"};
}

/// Traces of `count` independent Haar samples. SU(2) uses the exact angle
/// sampler (trace 2 cos theta); the other groups go through matrices.
inline std::vector<cdouble> trace_samples(const GroupSpec& group,
                                          std::size_t count,
                                          std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<cdouble> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (group.kind == GroupSpec::Kind::SU2) {
      out.emplace_back(2.0 * std::cos(sample_su2_angle(rng)), 0.0);
    } else if (group.kind == GroupSpec::Kind::U1) {
      out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01()));
    } else {
      cdouble t = sample_unitary(group, rng).trace();
      if (group.real_traces()) t = cdouble{t.real(), 0.0};
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace expsum
