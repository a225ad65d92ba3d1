// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria pin the numeric contracts of the whole pipeline: exact
// identities, theorem bounds with fixed slack, and the empirical
// equidistribution thresholds at desk scale.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "expsum/expsum.hpp"

using namespace expsum;
using Clock = std::chrono::steady_clock;

namespace {

struct Ctx {
  std::shared_ptr<const Field> field;
  std::shared_ptr<const LogTable> table;
  AdditiveCharacter psi;
};

Ctx ctx(std::uint64_t p, unsigned k = 1) {
  auto field = build_field(p, k);
  auto table = build_log_table(field);
  return {field, table, AdditiveCharacter{field, field->one()}};
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& label, bool pass,
            const std::string& detail) {
  std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id,
              label.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::vector<std::pair<std::uint64_t, unsigned>> prime_powers_upto(
    std::uint64_t limit, bool include_primes) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  if (include_primes)
    for (std::uint64_t p : primes_in_range(2, limit)) out.push_back({p, 1});
  for (std::uint64_t p : primes_in_range(2, std::uint64_t(std::sqrt(double(limit))) + 1)) {
    std::uint64_t q = p * p;
    unsigned k = 2;
    while (q <= limit) {
      out.push_back({p, k});
      if (q > limit / p) break;
      q *= p;
      ++k;
    }
  }
  return out;
}

// criterion 1 field set: all primes <= 500 plus the named prime powers
std::vector<std::pair<std::uint64_t, unsigned>> gauss_field_set() {
  std::vector<std::pair<std::uint64_t, unsigned>> fields;
  for (std::uint64_t p : primes_in_range(2, 500)) fields.push_back({p, 1});
  const std::vector<std::pair<std::uint64_t, unsigned>> powers{
      {2, 2}, {2, 3}, {3, 2}, {2, 4}, {5, 2},  {3, 3},
      {2, 5}, {7, 2}, {2, 6}, {3, 4}, {11, 2}, {2, 7}};
  fields.insert(fields.end(), powers.begin(), powers.end());
  return fields;
}

void criterion_1_and_5() {
  const auto start = Clock::now();
  bool mag_ok = true, weyl_ok = true;
  std::string mag_detail, weyl_detail;
  double worst_rel = 0;
  for (const auto& [p, k] : gauss_field_set()) {
    Ctx c = ctx(p, k);
    const double q = double(c.field->q());
    const double rq = std::sqrt(q);
    const auto spec = gauss_spectrum(*c.table, c.psi);
    if (std::abs(spec.values[0] - cdouble{-1.0, 0.0}) > 1e-8) {
      mag_ok = false;
      mag_detail = "g(psi, chi_0) != -1 at q=" + std::to_string(c.field->q());
    }
    for (std::size_t j = 1; j < spec.values.size(); ++j) {
      const double rel = std::abs(std::abs(spec.values[j]) - rq) / rq;
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-6) {
        mag_ok = false;
        mag_detail = "| |g| - sqrt(q) | too large at q=" +
                     std::to_string(c.field->q());
      }
    }
    // criterion 5: Weyl sums of the normalized Gauss points
    if (spec.values.size() >= 2) {
      std::vector<cdouble> z;
      z.reserve(spec.values.size() - 1);
      for (std::size_t j = 1; j < spec.values.size(); ++j)
        z.push_back(spec.values[j] / rq);
      const auto w = weyl_sums(z, 10);
      for (unsigned n = 1; n <= 10; ++n) {
        if (w[n - 1] > gauss_weyl_bound(n, q)) {
          weyl_ok = false;
          weyl_detail = "|W_" + std::to_string(n) + "| = " +
                        std::to_string(w[n - 1]) + " > (2n+1)/sqrt(q) at q=" +
                        std::to_string(c.field->q());
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 30.0) {
    mag_ok = false;
    mag_detail = "runtime " + std::to_string(elapsed) + "s >= 30s";
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max | |g|-sqrt(q) | / sqrt(q) = %.2e, %.1fs", worst_rel,
                elapsed);
  report(1, "gauss magnitudes over primes <= 500 and powers <= 128", mag_ok,
         mag_ok ? buf : mag_detail);
  report(5, "gauss Weyl bound (2n+1)/sqrt(q), n = 1..10", weyl_ok,
         weyl_ok ? "" : weyl_detail);
}

void criterion_2() {
  bool ok = true;
  std::string detail;
  double worst = 0;
  for (std::uint64_t q : {3ull, 7ull, 101ull, 1009ull, 10007ull}) {
    Ctx c = ctx(q);
    const auto t = kloosterman_all_fast(*c.table, c.psi, 2);
    KahanSum acc;
    for (const auto& v : t.values) {
      const double r = v.real();
      acc += r * r * r * r;
    }
    const double expect = 2.0 * double(q) * q * q - 3.0 * double(q) * q -
                          3.0 * double(q) - 1.0;
    const double rel = std::abs(acc.value() - expect) / expect;
    worst = std::max(worst, rel);
    if (rel > 1e-8) {
      ok = false;
      detail = "relative error " + std::to_string(rel) + " at q=" +
               std::to_string(q);
    }
    if (q == 3 && std::abs(acc.value() - 17.0) > 1e-8) {
      ok = false;
      detail = "q=3 moment != 17";
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max relative error %.2e", worst);
  report(2, "fourth moment identity 2q^3 - 3q^2 - 3q - 1", ok,
         ok ? buf : detail);
}

void criterion_3() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  double worst_scaled = 0;
  for (const auto& [p, k] : prime_powers_upto(101, true)) {
    Ctx c = ctx(p, k);
    const std::uint64_t q = c.field->q();
    for (unsigned n = 1; n <= 4; ++n) {
      if (std::pow(double(q), double(n - 1)) > kNaiveKloostermanGuard)
        continue;
      const auto fast = kloosterman_all_fast(*c.table, c.psi, n);
      const double tol = 1e-6 * std::pow(double(q), (n - 1) / 2.0);
      for (std::uint64_t m = 0; m < q - 1; ++m) {
        const cdouble naive =
            kloosterman_naive(*c.table, c.psi, n, c.table->exp_at(m));
        const double err = std::abs(fast.values[m] - naive);
        worst_scaled = std::max(worst_scaled, err / tol);
        if (err > tol) {
          ok = false;
          detail = "mismatch at q=" + std::to_string(q) + " n=" +
                   std::to_string(n);
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) {
    ok = false;
    detail = "runtime " + std::to_string(elapsed) + "s >= 60s";
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst error %.3f of tolerance, %.1fs",
                worst_scaled, elapsed);
  report(3, "fast vs naive Kloosterman, q <= 101, n = 1..4", ok,
         ok ? buf : detail);
}

void criterion_4() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  double min_slack = 1e300;
  for (const auto& [p, k] : prime_powers_upto(10007, true)) {
    Ctx c = ctx(p, k);
    const std::uint64_t q = c.field->q();
    const dft::Plan plan(q - 1);
    const TraceFunction psi_t = psi_restriction(*c.table, c.psi);
    std::vector<cdouble> gauss = plan.execute(psi_t.values, +1);
    std::vector<cdouble> power = gauss;  // G^1
    for (unsigned n = 2; n <= 4; ++n) {
      for (std::size_t j = 0; j < power.size(); ++j) power[j] *= gauss[j];
      auto vals = plan.execute(power, -1);
      const double bound = n * std::pow(double(q), (n - 1) / 2.0) + 1e-6;
      for (auto& v : vals) {
        const double a = std::abs(v) / double(q - 1);
        min_slack = std::min(min_slack, bound - a);
        if (a > bound) {
          ok = false;
          detail = "|Kl_" + std::to_string(n) + "| = " + std::to_string(a) +
                   " > bound at q=" + std::to_string(q);
        }
      }
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "min slack %.3e, %.1fs", min_slack,
                seconds_since(start));
  report(4, "Deligne bound n q^{(n-1)/2} over q <= 10007, n = 2..4", ok,
         ok ? buf : detail);
}

std::vector<double> kl2_normalized_values(std::uint64_t q) {
  Ctx c = ctx(q);
  const auto t = kloosterman_all_fast(*c.table, c.psi, 2);
  std::vector<double> v;
  v.reserve(t.values.size());
  const double rq = std::sqrt(double(q));
  for (const auto& z : t.values) v.push_back(z.real() / rq);
  return v;
}

void criterion_6() {
  bool ok = true;
  std::string detail;
  const auto v = kl2_normalized_values(10007);
  std::vector<double> angles;
  angles.reserve(v.size());
  for (double x : v) angles.push_back(angle_from_real(x));

  const double reference[8] = {0, 1, 0, 2, 0, 5, 0, 14};
  for (unsigned r = 1; r <= 8; ++r) {
    const double emp = empirical_moment(v, r);
    const double diff = std::abs(emp - reference[r - 1]);
    if (diff > 0.1) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += "order " + std::to_string(r) + ": |" + std::to_string(emp) +
                " - " + std::to_string(reference[r - 1]) + "| = " +
                std::to_string(diff) + " > 0.1";
    }
  }

  const auto st = ReferenceMeasure::sato_tate();
  const double ks_big = ks_statistic(angles, st);
  if (ks_big >= 0.05) {
    ok = false;
    detail += std::string(detail.empty() ? "" : "; ") + "KS(10007) = " +
              std::to_string(ks_big) + " >= 0.05";
  }
  const auto v_small = kl2_normalized_values(101);
  std::vector<double> angles_small;
  for (double x : v_small) angles_small.push_back(angle_from_real(x));
  const double ks_small = ks_statistic(angles_small, st);
  if (!(ks_big < ks_small)) {
    ok = false;
    detail += std::string(detail.empty() ? "" : "; ") +
              "KS(10007) not below KS(101)";
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "KS(10007) = %.4f < KS(101) = %.4f", ks_big,
                ks_small);
  report(6, "Kl2 Sato-Tate convergence at q = 10007", ok,
         ok ? buf : detail + " [KS " + std::to_string(ks_big) + "]");
}

void criterion_7() {
  bool ok = true;
  std::string detail;
  const std::uint64_t p = 10007;
  Ctx c = ctx(p);
  const dft::Plan plan(p - 1);
  const double catalan_ref[3] = {1, 2, 5};

  for (const char* name : {"evans", "rudnick"}) {
    const KernelSpec spec = std::string(name) == "evans"
                                ? KernelSpec::evans()
                                : KernelSpec::rudnick();
    const auto t = make_kernel(c.table, c.psi, spec);
    const auto s = mellin_fast(t, plan);
    const std::size_t first = t.meta.goodness == GoodnessRule::NontrivialOnly
                                  ? 1
                                  : 0;
    std::vector<double> good;
    for (std::size_t j = first; j < s.values.size(); ++j) {
      if (std::abs(s.values[j].imag()) > 1e-6) {
        ok = false;
        detail = std::string(name) + " sum not real at j=" +
                 std::to_string(j);
      }
      good.push_back(s.values[j].real());
      if (std::abs(s.values[j].real()) > 2.0 + 1e-6) {
        ok = false;
        detail = std::string(name) + " |S| > 2 + 1e-6";
      }
    }
    if (std::string(name) == "rudnick" && good.size() != p - 2) {
      ok = false;
      detail = "rudnick good-character count != q - 2";
    }
    for (unsigned i = 0; i < 3; ++i) {
      const unsigned r = 2 * (i + 1);
      const double emp = empirical_moment(good, r);
      if (std::abs(emp - catalan_ref[i]) > 0.1) {
        ok = false;
        detail = std::string(name) + " moment " + std::to_string(r) +
                 " off by " + std::to_string(std::abs(emp - catalan_ref[i]));
      }
    }
  }

  // even characteristic rejection
  try {
    Ctx c2 = ctx(2, 3);
    make_kernel(c2.table, c2.psi, KernelSpec::rudnick());
    ok = false;
    detail = "rudnick accepted p = 2";
  } catch (const RudnickEvenCharError&) {
  }
  report(7, "Evans and Rudnick ranges and moments at p = 10007", ok, detail);
}

void criterion_8() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  double worst_margin = 0;  // |mean| / bound
  for (std::uint64_t p : primes_in_range(101, 10007)) {
    Ctx c = ctx(p);
    const dft::Plan plan(p - 1);
    for (const auto& spec :
         {KernelSpec::gauss(), KernelSpec::evans(), KernelSpec::rudnick()}) {
      const auto t = make_kernel(c.table, c.psi, spec);
      const auto s = mellin_fast(t, plan);
      const std::size_t first =
          t.meta.goodness == GoodnessRule::NontrivialOnly ? 1 : 0;
      KahanCSum mean;
      for (std::size_t j = first; j < s.values.size(); ++j)
        mean += s.values[j];
      const double abs_mean =
          std::abs(mean.value()) / double(s.values.size() - first);
      const unsigned dim = spec.name == KernelKind::Gauss ? 1 : 2;
      const double bound = katz_mean_bound(1, dim, double(p));
      worst_margin = std::max(worst_margin, abs_mean / bound);
      if (abs_mean > bound) {
        ok = false;
        detail = std::string(kernel_kind_name(spec.name)) + " at p=" +
                 std::to_string(p) + ": |mean| = " + std::to_string(abs_mean) +
                 " > " + std::to_string(bound);
      }
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst |mean|/bound = %.3f, %.1fs",
                worst_margin, seconds_since(start));
  report(8, "Katz mean bound 2(rg+dim)/sqrt(q) over primes in [101, 10007]",
         ok, ok ? buf : detail);
}

void criterion_9() {
  bool ok = true;
  std::string detail;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  };
  const auto gauss = analyze(builtin_profile("gauss"));
  const auto evans = analyze(builtin_profile("evans"));
  const auto rudnick = analyze(builtin_profile("rudnick"));
  expect(gauss.tannakian_dim == 1 && gauss.euler_char == 1, "gauss dim != 1");
  expect(evans.tannakian_dim == 2, "evans dim != 2");
  expect(rudnick.tannakian_dim == 2, "rudnick dim != 2");
  expect(gauss.bad_char_bound == 2, "gauss bad bound != 2");
  expect(evans.bad_char_bound == 2, "evans bad bound != 2");
  expect(rudnick.bad_char_bound == 2, "rudnick bad bound != 2");
  for (unsigned n : {1u, 2u, 3u, 4u, 7u}) {
    const auto kl =
        analyze(builtin_profile("kloosterman(" + std::to_string(n) + ")"));
    expect(kl.tannakian_dim == 1, "kloosterman dim != 1");
    expect(kl.bad_char_bound == 2ll * n, "kloosterman bad bound != 2n");
    expect(kl.deligne_constant.has_value() &&
               *kl.deligne_constant == Rational(1, n),
           "kloosterman C != 1/n");
  }
  report(9, "ramification calculator exactness", ok, detail);
}

void criterion_10() {
  bool ok = true;
  std::string detail;
  // even trace moments of the angle sampler at 1e6 samples
  const std::size_t n = 1000000;
  SeededRng rng(20240901);
  std::vector<double> x;
  x.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    x.push_back(2.0 * std::cos(sample_su2_angle(rng)));
  const double reference[4] = {1, 2, 5, 14};
  char buf[200];
  std::string moments_str;
  for (unsigned m = 1; m <= 4; ++m) {
    const double emp = empirical_moment(x, 2 * m);
    // Monte-Carlo sigma from the empirical variance of x^{2m}
    KahanSum var;
    for (double v : x) {
      const double d = std::pow(v, 2.0 * m) - emp;
      var += d * d;
    }
    const double sigma = std::sqrt(var.value()) / double(n);
    std::snprintf(buf, sizeof(buf), "m%u %.4f+-%.4f ", 2 * m, emp, sigma);
    moments_str += buf;
    if (std::abs(emp - reference[m - 1]) > 3.0 * sigma) {
      ok = false;
      detail = "moment " + std::to_string(2 * m) + " off by more than 3 MC sigma";
    }
  }
  // two-sample KS: angle sampler vs matrix-QR SU(2), 1e5 each
  const std::size_t m2 = 100000;
  const auto qr = trace_samples({GroupSpec::Kind::SUn, 2}, m2, 555);
  const auto exact = trace_samples({GroupSpec::Kind::SU2, 2}, m2, 556);
  std::vector<double> a, b;
  a.reserve(m2);
  b.reserve(m2);
  for (const auto& z : qr) a.push_back(z.real());
  for (const auto& z : exact) b.push_back(z.real());
  const double ks = ks_two_sample(a, b);
  if (ks >= 0.01) {
    ok = false;
    detail += std::string(detail.empty() ? "" : "; ") +
              "two-sample KS = " + std::to_string(ks) + " >= 0.01";
  }
  std::snprintf(buf, sizeof(buf), "%stwo-sample KS = %.4f",
                moments_str.c_str(), ks);
  report(10, "Haar samplers: SU(2) moments and angle-vs-QR agreement", ok,
         ok ? buf : detail);
}

void criterion_11() {
  bool ok = true;
  std::string detail;
  const auto v = kl2_normalized_values(10007);
  const std::size_t n = 1000000;
  SeededRng rng(777);
  std::vector<double> haar;
  haar.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    haar.push_back(2.0 * std::cos(sample_su2_angle(rng)));
  for (unsigned r = 1; r <= 8; ++r) {
    const double a = empirical_moment(v, r);
    const double b = empirical_moment(haar, r);
    if (std::abs(a - b) > 0.1) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += "order " + std::to_string(r) + ": |" + std::to_string(a) +
                " - " + std::to_string(b) + "| > 0.1";
    }
  }
  report(11, "Kl2 moments at q = 10007 vs SU(2) Haar moments", ok, detail);
}

void criterion_12() {
  bool ok = true;
  std::string detail;
  const auto start = Clock::now();
  Ctx c = ctx(1000003);
  const auto t = kloosterman_all_fast(*c.table, c.psi, 2);
  const double elapsed = seconds_since(start);
  if (elapsed >= 30.0) {
    ok = false;
    detail = "fast path took " + std::to_string(elapsed) + "s >= 30s";
  }
  // sanity on the output while it is here: Weil bound at a few points
  const double bound = 2.0 * std::sqrt(1000003.0) + 1e-3;
  for (std::size_t m = 0; m < t.values.size(); m += 100000)
    if (std::abs(t.values[m]) > bound) {
      ok = false;
      detail = "fast Kl_2 out of the Weil range";
    }
  try {
    kloosterman_all_naive(*c.table, c.psi, 2);
    ok = false;
    detail = "naive path was not rejected at q = 1000003";
  } catch (const CostGuardError&) {
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "all-a Kl2 at q = 1000003 in %.2fs",
                elapsed);
  report(12, "fast-path performance and cost guard", ok, ok ? buf : detail);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  criterion_1_and_5();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  std::printf("acceptance: %d of 12 criteria failed, %.1fs total\n", failures,
              seconds_since(start));
  return failures == 0 ? 0 : 1;
}
