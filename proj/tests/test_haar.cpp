#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "expsum/equidist.hpp"
#include "expsum/haar.hpp"

using namespace expsum;

namespace {

double unitarity_defect(const Matrix& g) {
  const Matrix gg = mat_mul(mat_adjoint(g), g);
  double worst = 0;
  for (unsigned i = 0; i < g.n; ++i)
    for (unsigned j = 0; j < g.n; ++j) {
      const cdouble expect = i == j ? cdouble{1.0, 0.0} : cdouble{};
      worst = std::max(worst, std::abs(gg.at(i, j) - expect));
    }
  return worst;
}

Matrix symplectic_form(unsigned two_n) {
  Matrix j(two_n);
  const unsigned n = two_n / 2;
  for (unsigned i = 0; i < n; ++i) {
    j.at(i, n + i) = 1.0;
    j.at(n + i, i) = -1.0;
  }
  return j;
}

double symplectic_defect(const Matrix& g) {
  // Z^T J Z = J
  const Matrix J = symplectic_form(g.n);
  Matrix zt(g.n);
  for (unsigned i = 0; i < g.n; ++i)
    for (unsigned j = 0; j < g.n; ++j) zt.at(i, j) = g.at(j, i);
  const Matrix lhs = mat_mul(mat_mul(zt, J), g);
  double worst = 0;
  for (unsigned i = 0; i < g.n; ++i)
    for (unsigned j = 0; j < g.n; ++j)
      worst = std::max(worst, std::abs(lhs.at(i, j) - J.at(i, j)));
  return worst;
}

}  // namespace

TEST_CASE("seeded rng determinism") {
  SeededRng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform01(), y = b.uniform01(), z = c.uniform01();
    all_equal = all_equal && x == y;
    any_diff = any_diff || x != z;
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  const auto s1 = trace_samples({GroupSpec::Kind::SU2, 2}, 50, 7);
  const auto s2 = trace_samples({GroupSpec::Kind::SU2, 2}, 50, 7);
  CHECK(s1 == s2);

  SeededRng d1 = derive_stream(42, 0);
  SeededRng d2 = derive_stream(42, 1);
  CHECK(d1.uniform01() != d2.uniform01());
}

TEST_CASE("group spec parsing") {
  CHECK(GroupSpec::parse("u1").kind == GroupSpec::Kind::U1);
  CHECK(GroupSpec::parse("su2").kind == GroupSpec::Kind::SU2);
  CHECK(GroupSpec::parse("sun:3").n == 3);
  CHECK(GroupSpec::parse("uspn:2").trace_dim() == 4);
  CHECK(GroupSpec::parse("su2").trace_dim() == 2);
  CHECK(GroupSpec::parse("sun:3").name() == "sun:3");
  CHECK_THROWS_AS(GroupSpec::parse("so3"), Error);
  CHECK_THROWS_AS(GroupSpec::parse("sun:1"), Error);
}

TEST_CASE("su2 angle inverse CDF") {
  CHECK(su2_angle_from_uniform(0.0) == 0.0);
  CHECK(su2_angle_from_uniform(1.0) == Catch::Approx(std::numbers::pi));
  CHECK(su2_angle_from_uniform(0.5) == Catch::Approx(std::numbers::pi / 2));
  for (double u : {1e-9, 0.01, 0.3, 0.77, 0.999, 1 - 1e-9}) {
    const double theta = su2_angle_from_uniform(u);
    CHECK(std::abs(sato_tate_cdf_value(theta) - u) <= 1e-12);
  }
}

TEST_CASE("sampled unitaries are unitary with the right determinant") {
  SeededRng rng(2024);
  for (const auto& spec :
       {GroupSpec{GroupSpec::Kind::U1, 1}, GroupSpec{GroupSpec::Kind::SUn, 2},
        GroupSpec{GroupSpec::Kind::SUn, 3},
        GroupSpec{GroupSpec::Kind::USp2n, 1},
        GroupSpec{GroupSpec::Kind::USp2n, 2}}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Matrix g = sample_unitary(spec, rng);
      CHECK(unitarity_defect(g) < 1e-10);
      if (spec.kind == GroupSpec::Kind::SUn)
        CHECK(std::abs(detail::mat_det(g) - cdouble{1.0, 0.0}) < 1e-10);
      if (spec.kind == GroupSpec::Kind::USp2n)
        CHECK(symplectic_defect(g) < 1e-10);
      // tr(g g*) = trace_dim
      const Matrix gg = mat_mul(g, mat_adjoint(g));
      CHECK(std::abs(gg.trace() - cdouble{double(spec.trace_dim()), 0.0}) <
            1e-9);
    }
  }
}

TEST_CASE("u1 traces are uniform phases") {
  const auto z = trace_samples({GroupSpec::Kind::U1, 1}, 20000, 5);
  for (const auto& v : z) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
  KahanCSum mean;
  for (const auto& v : z) mean += v;
  CHECK(std::abs(mean.value()) / 20000.0 < 0.02);  // ~3 sigma
}

TEST_CASE("su2 moments match the catalan numbers at Monte Carlo scale") {
  const std::size_t n = 200000;
  const auto traces = trace_samples({GroupSpec::Kind::SU2, 2}, n, 11);
  std::vector<double> x;
  x.reserve(n);
  for (const auto& v : traces) {
    CHECK(v.imag() == 0.0);
    x.push_back(v.real());
  }
  const double expected[] = {1.0, 2.0, 5.0, 14.0};
  for (unsigned m = 1; m <= 4; ++m) {
    const double emp = empirical_moment(x, 2 * m);
    // generous: 5 sigma at n = 2e5
    const double sigma = std::sqrt(
        (ReferenceMeasure::semicircle().moment(4 * m) -
         expected[m - 1] * expected[m - 1]) /
        double(n));
    CHECK(std::abs(emp - expected[m - 1]) < 5.0 * sigma);
  }
  CHECK(std::abs(empirical_moment(x, 1)) < 0.02);
}

TEST_CASE("matrix-QR su2 agrees with the angle sampler") {
  const std::size_t n = 30000;
  const auto qr = trace_samples({GroupSpec::Kind::SUn, 2}, n, 3);
  const auto exact = trace_samples({GroupSpec::Kind::SU2, 2}, n, 4);
  std::vector<double> a, b;
  for (const auto& v : qr) {
    CHECK(std::abs(v.imag()) < 1e-10);  // su(2) traces are real
    a.push_back(v.real());
  }
  for (const auto& v : exact) b.push_back(v.real());
  CHECK(ks_two_sample(a, b) < 0.02);
}

TEST_CASE("usp2n(1) trace moments equal su2 moments") {
  const std::size_t n = 50000;
  const auto traces = trace_samples({GroupSpec::Kind::USp2n, 1}, n, 17);
  std::vector<double> x;
  for (const auto& v : traces) x.push_back(v.real());
  CHECK(std::abs(empirical_moment(x, 2) - 1.0) < 0.03);
  CHECK(std::abs(empirical_moment(x, 1)) < 0.03);
  CHECK(std::abs(empirical_moment(x, 4) - 2.0) < 0.1);
}

TEST_CASE("left invariance of the trace statistics") {
  const std::size_t n = 20000;
  SeededRng hrng(99);
  const GroupSpec su3{GroupSpec::Kind::SUn, 3};
  const Matrix h = sample_unitary(su3, hrng);
  SeededRng rng(100);
  std::vector<double> plain, shifted;
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix g = sample_unitary(su3, rng);
    plain.push_back(g.trace().real());
    shifted.push_back(mat_mul(h, g).trace().real());
  }
  CHECK(ks_two_sample(plain, shifted) < 0.025);
}

TEST_CASE("empirical haar measure plugs into reports") {
  const auto measure = ReferenceMeasure::empirical_haar_group(
      {GroupSpec::Kind::SU2, 2}, 20000, 21);
  CHECK(measure.moment(2) == Catch::Approx(1.0).margin(0.05));
  CHECK(measure.moment_standard_error(2) > 0.0);
  // two-sample KS of a fresh stream against it
  const auto traces = trace_samples({GroupSpec::Kind::SU2, 2}, 20000, 22);
  std::vector<double> x;
  for (const auto& v : traces) x.push_back(v.real());
  CHECK(ks_two_sample(x, measure.empirical_samples()) < 0.02);
}
