#pragma once

// Statistical verification of the equidistribution statements: Weyl sums,
// empirical vs reference moments, Kolmogorov-Smirnov distances against the
// limit measures, and the explicit error bounds as numeric predicates.
//
// Reference measures and their conventions:
//   haar_circle  uniform on S^1; KS runs over arg(z) in [0, 2pi)
//   sato_tate    (2/pi) sin^2(theta) dtheta on [0, pi]; KS over theta,
//                moments over 2 cos(theta)
//   semicircle   (1/2pi) sqrt(4 - x^2) dx on [-2, 2]; KS and moments over x
//   haar group   empirical trace samples of a Haar sampler (two-sample KS)
//
// Even reference moments of 2 cos(theta) / x are the Catalan numbers;
// they are hard-coded through order 16 and available by quadrature above.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expsum/errors.hpp"
#include "expsum/haar.hpp"
#include "expsum/kernels.hpp"
#include "expsum/summation.hpp"
#include "expsum/trace.hpp"

namespace expsum {

namespace detail {

inline double simpson_rule(double a, double b, double fa, double fm,
                           double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double m, double b, double fa,
                               double fm, double fb, double whole, double tol,
                               int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_rule(a, m, fa, flm, fm);
  const double right = simpson_rule(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, rm, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = detail::simpson_rule(a, b, fa, fm, fb);
  return detail::adaptive_simpson(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

enum class MeasureKind { HaarCircle, SatoTate, Semicircle, EmpiricalHaarGroup };

/// Catalan numbers C_0..C_8 (reference even moments through order 16).
inline constexpr double kCatalan[9] = {1,  1,   2,   5,    14,
                                       42, 132, 429, 1430};

class ReferenceMeasure {
 public:
  static ReferenceMeasure haar_circle() {
    return ReferenceMeasure(MeasureKind::HaarCircle, "haar_circle");
  }
  static ReferenceMeasure sato_tate() {
    return ReferenceMeasure(MeasureKind::SatoTate, "sato_tate");
  }
  static ReferenceMeasure semicircle() {
    return ReferenceMeasure(MeasureKind::Semicircle, "semicircle");
  }
  static ReferenceMeasure empirical_haar_group(const GroupSpec& group,
                                               std::size_t samples,
                                               std::uint64_t seed) {
    ReferenceMeasure m(MeasureKind::EmpiricalHaarGroup,
                       "haar(" + group.name() + ")");
    auto traces = trace_samples(group, samples, seed);
    m.samples_.reserve(traces.size());
    for (const auto& t : traces) m.samples_.push_back(t.real());
    std::sort(m.samples_.begin(), m.samples_.end());
    return m;
  }

  MeasureKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  std::pair<double, double> support() const {
    switch (kind_) {
      case MeasureKind::HaarCircle: return {0.0, 2.0 * std::numbers::pi};
      case MeasureKind::SatoTate: return {0.0, std::numbers::pi};
      case MeasureKind::Semicircle: return {-2.0, 2.0};
      case MeasureKind::EmpiricalHaarGroup:
        return {samples_.front(), samples_.back()};
    }
    return {0, 0};
  }

  double cdf(double x) const {
    switch (kind_) {
      case MeasureKind::HaarCircle: {
        const double t = std::clamp(x, 0.0, 2.0 * std::numbers::pi);
        return t / (2.0 * std::numbers::pi);
      }
      case MeasureKind::SatoTate: {
        const double t = std::clamp(x, 0.0, std::numbers::pi);
        return sato_tate_cdf_value(t);
      }
      case MeasureKind::Semicircle: {
        const double t = std::clamp(x, -2.0, 2.0);
        return 0.5 + t * std::sqrt(4.0 - t * t) / (4.0 * std::numbers::pi) +
               std::asin(0.5 * t) / std::numbers::pi;
      }
      case MeasureKind::EmpiricalHaarGroup: {
        const auto it =
            std::upper_bound(samples_.begin(), samples_.end(), x);
        return double(it - samples_.begin()) / double(samples_.size());
      }
    }
    return 0.0;
  }

  /// Density (empirical measures have none; returns 0 there).
  double density(double x) const {
    switch (kind_) {
      case MeasureKind::HaarCircle:
        return (x >= 0 && x <= 2.0 * std::numbers::pi)
                   ? 1.0 / (2.0 * std::numbers::pi)
                   : 0.0;
      case MeasureKind::SatoTate: {
        if (x < 0 || x > std::numbers::pi) return 0.0;
        const double s = std::sin(x);
        return 2.0 * s * s / std::numbers::pi;
      }
      case MeasureKind::Semicircle:
        if (x < -2.0 || x > 2.0) return 0.0;
        return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
      case MeasureKind::EmpiricalHaarGroup: return 0.0;
    }
    return 0.0;
  }

  /// Reference moment of order r, in the per-measure variable: z^r for the
  /// circle (nonzero only at r = 0), (2 cos theta)^r for Sato-Tate, x^r for
  /// the semicircle, and the Monte-Carlo mean for empirical measures.
  double moment(unsigned r) const {
    switch (kind_) {
      case MeasureKind::HaarCircle: return r == 0 ? 1.0 : 0.0;
      case MeasureKind::SatoTate:
      case MeasureKind::Semicircle: {
        if (r % 2 == 1) return 0.0;
        if (r / 2 < 9) return kCatalan[r / 2];
        return integrate(
            [r](double x) {
              return std::pow(x, double(r)) * std::sqrt(4.0 - x * x) /
                     (2.0 * std::numbers::pi);
            },
            -2.0, 2.0, 1e-10);
      }
      case MeasureKind::EmpiricalHaarGroup: {
        KahanSum acc;
        for (double s : samples_) acc += std::pow(s, double(r));
        return acc.value() / double(samples_.size());
      }
    }
    return 0.0;
  }

  /// Monte-Carlo standard error of moment(r); zero for exact measures.
  double moment_standard_error(unsigned r) const {
    if (kind_ != MeasureKind::EmpiricalHaarGroup) return 0.0;
    const double mean = moment(r);
    KahanSum acc;
    for (double s : samples_) {
      const double d = std::pow(s, double(r)) - mean;
      acc += d * d;
    }
    return std::sqrt(acc.value()) / double(samples_.size());
  }

  /// Quadrature check of the total mass; 1 up to the tolerance of the
  /// integrator for the closed-form measures.
  double quadrature_mass() const {
    if (kind_ == MeasureKind::EmpiricalHaarGroup) return 1.0;
    const auto [a, b] = support();
    return integrate([this](double x) { return density(x); }, a, b, 1e-12);
  }

  const std::vector<double>& empirical_samples() const { return samples_; }

 private:
  ReferenceMeasure(MeasureKind kind, std::string name)
      : kind_(kind), name_(std::move(name)) {}

  MeasureKind kind_;
  std::string name_;
  std::vector<double> samples_;  // sorted, empirical kind only
};

// ---------------------------------------------------------------------------
// Statistics.

/// |W_n| = |mean of z^n| for n = 1..max_order.
inline std::vector<double> weyl_sums(std::span<const cdouble> samples,
                                     unsigned max_order) {
  if (samples.empty()) throw EmptySamplesError{};
  std::vector<KahanCSum> acc(max_order);
  for (const cdouble& z : samples) {
    cdouble zp = z;
    for (unsigned n = 0; n < max_order; ++n) {
      acc[n] += zp;
      zp *= z;
    }
  }
  std::vector<double> out(max_order);
  for (unsigned n = 0; n < max_order; ++n)
    out[n] = std::abs(acc[n].value()) / double(samples.size());
  return out;
}

/// Signed means of the SU(2) characters U_m(cos theta) = sin((m+1)theta) /
/// sin(theta) for m = 1..max_order, by the Chebyshev recurrence.
inline std::vector<double> chebyshev_means(std::span<const double> angles,
                                           unsigned max_order) {
  if (angles.empty()) throw EmptySamplesError{};
  std::vector<KahanSum> acc(max_order);
  for (double theta : angles) {
    const double x = 2.0 * std::cos(theta);
    double um1 = 1.0;  // U_0
    double um = x;     // U_1
    for (unsigned m = 1; m <= max_order; ++m) {
      acc[m - 1] += um;
      const double next = x * um - um1;
      um1 = um;
      um = next;
    }
  }
  std::vector<double> out(max_order);
  for (unsigned m = 0; m < max_order; ++m)
    out[m] = acc[m].value() / double(angles.size());
  return out;
}

inline std::vector<double> weyl_sums_chebyshev(std::span<const double> angles,
                                               unsigned max_order) {
  auto means = chebyshev_means(angles, max_order);
  for (double& v : means) v = std::abs(v);
  return means;
}

inline double empirical_moment(std::span<const double> samples, unsigned r) {
  if (samples.empty()) throw EmptySamplesError{};
  KahanSum acc;
  for (double s : samples) acc += std::pow(s, double(r));
  return acc.value() / double(samples.size());
}

inline std::vector<double> empirical_moments(
    std::span<const double> samples, std::span<const unsigned> orders) {
  std::vector<double> out;
  out.reserve(orders.size());
  for (unsigned r : orders) out.push_back(empirical_moment(samples, r));
  return out;
}

/// Mean of z^a * conj(z)^b, the joint-moment basis for complex traces.
inline cdouble mixed_moment(std::span<const cdouble> samples, unsigned a,
                            unsigned b) {
  if (samples.empty()) throw EmptySamplesError{};
  KahanCSum acc;
  for (const cdouble& z : samples) {
    cdouble v{1.0, 0.0};
    for (unsigned i = 0; i < a; ++i) v *= z;
    for (unsigned i = 0; i < b; ++i) v *= std::conj(z);
    acc += v;
  }
  return acc.value() / double(samples.size());
}

/// Two-sided KS distance between the empirical CDF of `samples` and the
/// reference CDF, evaluated from both sides of every sample point.
inline double ks_statistic(std::span<const double> samples,
                           const ReferenceMeasure& measure) {
  if (samples.empty()) throw EmptySamplesError{};
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = measure.cdf(sorted[i]);
    d = std::max(d, std::abs(double(i + 1) / n - f));
    d = std::max(d, std::abs(double(i) / n - f));
  }
  return d;
}

inline double ks_two_sample(std::span<const double> a,
                            std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySamplesError{};
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / double(sa.size()) -
                             double(j) / double(sb.size())));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Explicit bounds.

inline double gauss_weyl_bound(unsigned n, double q) {
  return (2.0 * n + 1.0) / std::sqrt(q);
}

inline double kloosterman_weyl_bound(unsigned dim_lambda, unsigned n,
                                     double q) {
  return double(dim_lambda) / double(n) * std::sqrt(q) / (q - 1.0);
}

inline double katz_mean_bound(unsigned rank, unsigned tannakian_dim,
                              double q) {
  return 2.0 * (double(rank) + double(tannakian_dim)) / std::sqrt(q);
}

enum class BoundKind { GaussWeyl, KloostermanWeyl, KatzMean };

struct BoundParams {
  std::optional<double> q;
  std::optional<unsigned> n;
  std::optional<unsigned> dim_lambda;
  std::optional<unsigned> rank;
  std::optional<unsigned> tannakian_dim;
};

inline double predicted_bound(BoundKind kind, const BoundParams& p) {
  auto need = [](const auto& opt, const char* name) {
    if (!opt) throw MissingParamError{name};
    return *opt;
  };
  switch (kind) {
    case BoundKind::GaussWeyl:
      return gauss_weyl_bound(need(p.n, "n"), need(p.q, "q"));
    case BoundKind::KloostermanWeyl:
      return kloosterman_weyl_bound(need(p.dim_lambda, "dim_lambda"),
                                    need(p.n, "n"), need(p.q, "q"));
    case BoundKind::KatzMean:
      return katz_mean_bound(need(p.rank, "rank"),
                             need(p.tannakian_dim, "tannakian_dim"),
                             need(p.q, "q"));
  }
  throw MissingParamError{"kind"};
}

// ---------------------------------------------------------------------------
// Reports.

struct WeylRow {
  unsigned order = 0;
  double abs_value = 0.0;
  std::optional<double> bound;
  std::string provenance;  // formula behind the bound, empty if none
};

struct MomentRow {
  unsigned order = 0;
  double empirical = 0.0;
  double reference = 0.0;
  double abs_diff = 0.0;
};

struct EquidistReport {
  std::string kernel;
  std::uint64_t q = 0;
  std::size_t count = 0;
  std::vector<WeylRow> weyl;
  std::optional<WeylRow> katz_mean;  // |mean over good chi| and its bound
  std::vector<MomentRow> moments;
  std::optional<double> ks;
  std::string measure;
  double max_abs = 0.0;
  double min_abs = 0.0;
  std::vector<std::string> violations;
};

/// The samples feeding one report, plus the bound context they carry.
struct SampleSet {
  std::string kernel_name = "custom";
  std::uint64_t q = 0;  // 0 when unknown (file input)
  std::vector<cdouble> raw;

  // bound contexts; disengaged members switch the corresponding rows off
  std::optional<unsigned> gauss_weyl_q;       // Weyl bound (2n+1)/sqrt(q)
  std::optional<unsigned> kloosterman_n;      // Chebyshev-Weyl bound
  std::optional<std::pair<unsigned, unsigned>> katz;  // (rank, tannakian dim)
  std::size_t bad_count = 0;   // characters excluded as bad
  double range_halfwidth = 0;  // hard |value| bound; 0 disables the check
};

struct ReportOptions {
  unsigned weyl_order = 10;
  std::vector<unsigned> moment_orders = {1, 2, 3, 4, 5, 6, 7, 8};
  bool with_ks = true;
};

/// Samples for a Mellin spectrum restricted to the kernel's good characters.
inline SampleSet spectrum_samples(const MellinSpectrum& spectrum,
                                  const KernelMeta& meta) {
  SampleSet s;
  s.kernel_name = meta.name;
  s.q = spectrum.field->q();
  const bool skip_trivial = meta.goodness == GoodnessRule::NontrivialOnly;
  s.bad_count = skip_trivial ? 1 : 0;
  s.raw.reserve(spectrum.values.size());
  for (std::size_t j = skip_trivial ? 1 : 0; j < spectrum.values.size(); ++j)
    s.raw.push_back(spectrum.values[j]);
  return s;
}

/// Samples taken from a kernel's own values (the Kloosterman angle side).
/// Normalized Kloosterman kernels carry the sheaf sign; the classical angle
/// convention is Kl_n / q^{(n-1)/2}, so the sign is taken back off.
inline SampleSet kernel_value_samples(const TraceFunction& t) {
  SampleSet s;
  s.kernel_name = t.meta.name;
  s.q = t.field->q();
  s.raw = t.values;
  if (t.meta.name == "kloosterman" && t.meta.normalized &&
      t.meta.n % 2 == 0) {
    for (auto& v : s.raw) v = -v;
  }
  if (t.meta.name == "kloosterman" && t.meta.normalized) {
    s.kloosterman_n = t.meta.n;
    s.range_halfwidth = double(t.meta.n);
  }
  return s;
}

inline EquidistReport build_report(const SampleSet& input,
                                   const ReferenceMeasure& measure,
                                   const ReportOptions& options = {}) {
  if (input.raw.empty()) throw EmptySamplesError{};
  EquidistReport report;
  report.kernel = input.kernel_name;
  report.q = input.q;
  report.count = input.raw.size();
  report.measure = measure.name();

  report.max_abs = 0.0;
  report.min_abs = std::numeric_limits<double>::infinity();
  for (const auto& z : input.raw) {
    report.max_abs = std::max(report.max_abs, std::abs(z));
    report.min_abs = std::min(report.min_abs, std::abs(z));
  }

  if (input.range_halfwidth > 0 &&
      report.max_abs > input.range_halfwidth * (1.0 + 1e-6)) {
    report.violations.push_back(
        "range: max |value| = " + std::to_string(report.max_abs) +
        " exceeds " + std::to_string(input.range_halfwidth) + " (1 + 1e-6)");
  }

  const bool circle = measure.kind() == MeasureKind::HaarCircle;

  // per-measure sample coordinates
  std::vector<double> ks_coord;      // variable the KS runs over
  std::vector<double> value_coord;   // variable the moments run over
  std::vector<double> angle_coord;   // [0, pi] angles for Chebyshev sums
  ks_coord.reserve(input.raw.size());
  value_coord.reserve(input.raw.size());
  const double halfwidth =
      input.range_halfwidth > 0 ? input.range_halfwidth : 2.0;
  for (const auto& z : input.raw) {
    switch (measure.kind()) {
      case MeasureKind::HaarCircle: {
        double a = std::arg(z);
        if (a < 0) a += 2.0 * std::numbers::pi;
        ks_coord.push_back(a);
        break;
      }
      case MeasureKind::SatoTate: {
        const double theta = angle_from_real(z.real(), halfwidth);
        angle_coord.push_back(theta);
        ks_coord.push_back(theta);
        value_coord.push_back(2.0 * std::cos(theta));
        break;
      }
      case MeasureKind::Semicircle:
      case MeasureKind::EmpiricalHaarGroup: {
        const double v = z.real();
        value_coord.push_back(v);
        ks_coord.push_back(v);
        if (std::abs(v) <= 2.0 * (1.0 + 1e-6))
          angle_coord.push_back(angle_from_real(v, 2.0));
        break;
      }
    }
  }

  // Weyl rows
  if (options.weyl_order > 0) {
    if (circle) {
      const auto w = weyl_sums(input.raw, options.weyl_order);
      for (unsigned n = 1; n <= options.weyl_order; ++n) {
        WeylRow row{n, w[n - 1], std::nullopt, ""};
        if (input.gauss_weyl_q) {
          row.bound = gauss_weyl_bound(n, double(*input.gauss_weyl_q));
          row.provenance = "(2n+1)/sqrt(q)";
        }
        report.weyl.push_back(row);
      }
    } else if (angle_coord.size() == input.raw.size()) {
      const auto w = weyl_sums_chebyshev(angle_coord, options.weyl_order);
      for (unsigned m = 1; m <= options.weyl_order; ++m) {
        WeylRow row{m, w[m - 1], std::nullopt, ""};
        if (input.kloosterman_n && input.q > 1) {
          row.bound = kloosterman_weyl_bound(m + 1, *input.kloosterman_n,
                                             double(input.q));
          row.provenance = "(dim Sym^m / n) sqrt(q)/(q-1)";
        }
        report.weyl.push_back(row);
      }
    }
    for (const auto& row : report.weyl) {
      if (row.bound && row.abs_value > *row.bound * (1.0 + 1e-9)) {
        report.violations.push_back(
            "weyl order " + std::to_string(row.order) + ": |W| = " +
            std::to_string(row.abs_value) + " exceeds " + row.provenance +
            " = " + std::to_string(*row.bound));
      }
    }
  }

  // Katz mean bound, applicable once the bad characters are outnumbered
  if (input.katz && input.q > 0 &&
      std::sqrt(double(input.q)) >= double(input.bad_count) + 1.0) {
    KahanCSum mean;
    for (const auto& z : input.raw) mean += z;
    const double abs_mean = std::abs(mean.value()) / double(input.raw.size());
    const double bound =
        katz_mean_bound(input.katz->first, input.katz->second,
                        double(input.q));
    report.katz_mean = WeylRow{1, abs_mean, bound, "2(rg(N)+dim w(N))/sqrt(q)"};
    if (abs_mean > bound * (1.0 + 1e-9)) {
      report.violations.push_back(
          "katz mean: |mean S| = " + std::to_string(abs_mean) +
          " exceeds 2(rg+dim)/sqrt(q) = " + std::to_string(bound));
    }
  }

  // Moment rows
  if (!options.moment_orders.empty() && !circle) {
    for (unsigned r : options.moment_orders) {
      const double emp = empirical_moment(value_coord, r);
      const double ref = measure.moment(r);
      report.moments.push_back(MomentRow{r, emp, ref, std::abs(emp - ref)});
    }
  } else if (!options.moment_orders.empty() && circle) {
    for (unsigned r : options.moment_orders) {
      KahanCSum acc;
      for (const auto& z : input.raw) {
        cdouble zp{1.0, 0.0};
        for (unsigned i = 0; i < r; ++i) zp *= z;
        acc += zp;
      }
      const double emp = std::abs(acc.value()) / double(input.raw.size());
      const double ref = measure.moment(r);
      report.moments.push_back(MomentRow{r, emp, ref, std::abs(emp - ref)});
    }
  }

  // KS
  if (options.with_ks) {
    if (measure.kind() == MeasureKind::EmpiricalHaarGroup)
      report.ks = ks_two_sample(ks_coord, measure.empirical_samples());
    else
      report.ks = ks_statistic(ks_coord, measure);
  }

  return report;
}

/// B-bin histogram of the KS coordinate with the reference density column.
struct HistogramRow {
  double lo = 0, hi = 0;
  std::size_t count = 0;
  double density = 0;      // empirical
  double ref_density = 0;  // reference measure at the bin midpoint
};

inline std::vector<HistogramRow> histogram(std::span<const double> samples,
                                           unsigned bins,
                                           const ReferenceMeasure& measure) {
  if (samples.empty()) throw EmptySamplesError{};
  if (bins == 0) throw Error{"histogram needs at least one bin"};
  auto [lo, hi] = measure.support();
  if (measure.kind() == MeasureKind::EmpiricalHaarGroup) {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = std::min(lo, *mn);
    hi = std::max(hi, *mx);
  }
  const double width = (hi - lo) / bins;
  std::vector<HistogramRow> rows(bins);
  for (unsigned b = 0; b < bins; ++b) {
    rows[b].lo = lo + b * width;
    rows[b].hi = lo + (b + 1) * width;
    rows[b].ref_density = measure.density(0.5 * (rows[b].lo + rows[b].hi));
  }
  for (double s : samples) {
    const double t = (s - lo) / width;
    const unsigned b = std::min<unsigned>(
        bins - 1, static_cast<unsigned>(std::max(0.0, std::floor(t))));
    ++rows[b].count;
  }
  for (auto& row : rows)
    row.density = double(row.count) / (double(samples.size()) * width);
  return rows;
}

}  // namespace expsum
