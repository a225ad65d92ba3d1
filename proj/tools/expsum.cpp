// expsum: exponential-sum laboratory over finite fields.
//
// Subcommands: field, gauss, kloosterman, evans, rudnick, mellin, equidist,
// haar-sample, ramify, sweep. Exit codes: 0 ok, 1 bound violations or
// partial sweep failures, 2 configuration errors, 3 cost-guard rejection.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "expsum/expsum.hpp"

namespace fs = std::filesystem;
using namespace expsum;

namespace {

struct FieldArgs {
  std::uint64_t p = 0;
  unsigned k = 1;
  std::vector<std::uint32_t> psi_b = {1};
};

struct KernelContext {
  std::shared_ptr<const Field> field;
  std::shared_ptr<const LogTable> table;
  AdditiveCharacter psi;
};

KernelContext make_context(const FieldArgs& args) {
  auto field = build_field(args.p, args.k);
  auto table = build_log_table(field);
  const FieldElement b =
      field->from_coeffs(std::span<const std::uint32_t>(args.psi_b));
  return {field, table, AdditiveCharacter{field, b}};
}

KernelSpec parse_kernel_name(const std::string& name, unsigned n_flag,
                             bool raw) {
  KernelSpec spec;
  if (name == "gauss") spec = KernelSpec::gauss();
  else if (name == "evans") spec = KernelSpec::evans();
  else if (name == "rudnick") spec = KernelSpec::rudnick();
  else if (name == "kloosterman") spec = KernelSpec::kloosterman(n_flag);
  else if (name.rfind("kl", 0) == 0 && name.size() > 2)
    spec = KernelSpec::kloosterman(
        static_cast<unsigned>(std::stoul(name.substr(2))));
  else throw Error{"unknown kernel: " + name};
  spec.normalized = !raw;
  return spec;
}

ReferenceMeasure parse_measure(const std::string& name, std::size_t ref_count,
                               std::uint64_t seed) {
  if (name == "haar-circle") return ReferenceMeasure::haar_circle();
  if (name == "sato-tate") return ReferenceMeasure::sato_tate();
  if (name == "semicircle") return ReferenceMeasure::semicircle();
  // anything else is a Haar group sampled empirically
  return ReferenceMeasure::empirical_haar_group(GroupSpec::parse(name),
                                                ref_count, seed);
}

std::string default_measure_for(const KernelSpec& spec) {
  switch (spec.name) {
    case KernelKind::Gauss: return "haar-circle";
    case KernelKind::Evans:
    case KernelKind::Rudnick: return "semicircle";
    case KernelKind::Kloosterman:
      if (spec.n == 2) return "sato-tate";
      return spec.n % 2 == 0 ? "uspn:" + std::to_string(spec.n / 2)
                             : "sun:" + std::to_string(spec.n);
    default: return "semicircle";
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error{"cannot write " + path.string()};
  os << contents;
}

/// Trace+spectrum computation shared by the kernel subcommands and sweep.
struct KernelRun {
  TraceFunction trace;
  MellinSpectrum spectrum;
};

KernelRun run_kernel(const KernelContext& ctx, const KernelSpec& spec) {
  TraceFunction t = make_kernel(ctx.table, ctx.psi, spec);
  MellinSpectrum s = mellin_fast(t);
  return {std::move(t), std::move(s)};
}

SampleSet samples_for_report(const KernelRun& run, const KernelSpec& spec) {
  if (spec.name == KernelKind::Kloosterman)
    return kernel_value_samples(run.trace);
  SampleSet s = spectrum_samples(run.spectrum, run.trace.meta);
  const char* profile = spec.name == KernelKind::Gauss ? "gauss"
                        : spec.name == KernelKind::Evans ? "evans"
                                                         : "rudnick";
  const auto dims = analyze(builtin_profile(profile));
  s.katz = {static_cast<unsigned>(builtin_profile(profile).generic_rank),
            static_cast<unsigned>(dims.tannakian_dim)};
  if (spec.name == KernelKind::Gauss) {
    s.gauss_weyl_q = static_cast<unsigned>(s.q);
    s.range_halfwidth = 1.0;
  } else {
    s.range_halfwidth = 2.0;
  }
  return s;
}

int equidist_exit(const EquidistReport& report) {
  return report.violations.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  std::uint64_t q = 0, p = 0;
  unsigned k = 1;
  std::size_t count = 0;
  std::optional<EquidistReport> report;
  std::string error;
};

struct SweepConfig {
  std::string mode;  // vertical | horizontal
  std::uint64_t p = 0, pmin = 0, pmax = 0;
  unsigned kmax = 0;
  std::string kernel = "gauss";
  unsigned n = 2;
  std::string measure;  // empty = per-kernel default
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::vector<std::uint32_t> psi_b = {1};
};

SweepRow sweep_one(std::uint64_t p, unsigned k, const SweepConfig& cfg) {
  SweepRow row;
  row.p = p;
  row.k = k;
  try {
    const KernelSpec spec = parse_kernel_name(cfg.kernel, cfg.n, false);
    KernelContext ctx = make_context({p, k, cfg.psi_b});
    row.q = ctx.field->q();
    KernelRun run = run_kernel(ctx, spec);
    SampleSet samples = samples_for_report(run, spec);
    const std::string measure_name =
        cfg.measure.empty() ? default_measure_for(spec) : cfg.measure;
    ReferenceMeasure measure = parse_measure(measure_name, 100000, cfg.seed);
    ReportOptions options;
    options.moment_orders = {2, 4, 6};
    row.count = samples.raw.size();
    row.report = build_report(samples, measure, options);
  } catch (const std::exception& e) {
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i) q *= p;
    row.q = q;
    row.error = e.what();
  }
  return row;
}

std::string sweep_csv(std::vector<SweepRow>& rows) {
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.q < b.q; });
  std::ostringstream os;
  os << "q,p,k,count,ks,ks_delta,moment2,moment4,moment6,max_weyl,"
        "weyl_bound,katz_mean,katz_bound,violations,error\n";
  std::optional<double> prev_ks;
  for (const auto& row : rows) {
    os << row.q << ',' << row.p << ',' << row.k << ',' << row.count << ',';
    if (row.report && row.report->ks) {
      os << fmt17(*row.report->ks) << ',';
      if (prev_ks) os << fmt17(*row.report->ks - *prev_ks);
      os << ',';
      prev_ks = *row.report->ks;
    } else {
      os << ",,";
    }
    if (row.report) {
      const auto& r = *row.report;
      for (unsigned order : {2u, 4u, 6u}) {
        bool found = false;
        for (const auto& m : r.moments)
          if (m.order == order) {
            os << fmt17(m.empirical);
            found = true;
            break;
          }
        (void)found;
        os << ',';
      }
      // largest Weyl sum and the bound at the same order
      double max_w = 0.0;
      std::optional<double> bound_at_max;
      for (const auto& w : r.weyl)
        if (w.abs_value >= max_w) {
          max_w = w.abs_value;
          bound_at_max = w.bound;
        }
      os << fmt17(max_w) << ','
         << (bound_at_max ? fmt17(*bound_at_max) : "") << ',';
      if (r.katz_mean)
        os << fmt17(r.katz_mean->abs_value) << ','
           << fmt17(*r.katz_mean->bound) << ',';
      else
        os << ",,";
      os << r.violations.size() << ',';
    } else {
      os << ",,,,,,,,";
    }
    os << row.error << "\n";
  }
  return os.str();
}

int run_sweep(const SweepConfig& cfg, const fs::path& out_dir, bool json) {
  std::vector<std::pair<std::uint64_t, unsigned>> fields;
  if (cfg.mode == "vertical") {
    if (cfg.p == 0 || cfg.kmax < 2)
      throw Error{"vertical sweep needs --p and --kmax >= 2"};
    if (cfg.kernel == "rudnick" && cfg.p == 2) throw RudnickEvenCharError{};
    for (unsigned k = 1; k <= cfg.kmax; ++k) fields.push_back({cfg.p, k});
  } else if (cfg.mode == "horizontal") {
    const auto primes = primes_in_range(cfg.pmin, cfg.pmax);
    if (primes.size() < 2)
      throw Error{"horizontal sweep needs at least two primes in range"};
    if (cfg.kernel == "rudnick" &&
        std::find(primes.begin(), primes.end(), 2ull) != primes.end())
      throw RudnickEvenCharError{};
    for (std::uint64_t p : primes) fields.push_back({p, 1});
  } else {
    throw Error{"sweep mode must be vertical or horizontal"};
  }

  std::vector<SweepRow> rows(fields.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.threads, fields.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= fields.size()) break;
      rows[i] = sweep_one(fields[i].first, fields[i].second, cfg);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  const std::string csv = sweep_csv(rows);
  write_file(out_dir / "sweep.csv", csv);
  if (json) std::cout << csv;

  bool bad = false;
  for (const auto& row : rows) {
    if (!row.error.empty() || (row.report && !row.report->violations.empty()))
      bad = true;
  }
  std::cerr << "sweep: " << rows.size() << " fields -> "
            << (out_dir / "sweep.csv").string() << "\n";
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponential sums over finite fields"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  FieldArgs fargs;
  std::string out_dir = ".";
  bool json = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--json", json, "echo primary output as JSON/CSV on stdout");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (sweep)")
      ->capture_default_str();

  auto add_field_opts = [&](CLI::App* cmd, bool require_p = true) {
    auto* o = cmd->add_option("--p", fargs.p, "field characteristic");
    if (require_p) o->required();
    cmd->add_option("--k", fargs.k, "extension degree")->capture_default_str();
    cmd->add_option("--psi", fargs.psi_b,
                    "additive character twist b (coefficient vector)");
  };

  // field
  auto* cmd_field = app.add_subcommand("field", "print the field descriptor");
  add_field_opts(cmd_field);

  // kernels
  struct KernelCmd {
    CLI::App* cmd;
    std::string name;
  };
  std::vector<KernelCmd> kernel_cmds;
  unsigned kl_n = 2;
  bool raw = false;
  bool use_naive = false;
  std::int64_t chi_j = -1;
  for (const char* name : {"gauss", "kloosterman", "evans", "rudnick"}) {
    auto* cmd = app.add_subcommand(
        name, std::string("evaluate the ") + name + " kernel and its spectrum");
    add_field_opts(cmd);
    cmd->add_flag("--raw", raw, "skip normalization (no sign, no sqrt q)");
    cmd->add_flag("--naive", use_naive, "use the O(q^2) reference transform");
    if (std::string(name) == "kloosterman")
      cmd->add_option("--n", kl_n, "number of variables")
          ->capture_default_str();
    if (std::string(name) == "gauss")
      cmd->add_option("--chi", chi_j,
                      "print the single sum g(psi, chi_j) instead of CSVs");
    kernel_cmds.push_back({cmd, name});
  }

  // mellin
  auto* cmd_mellin =
      app.add_subcommand("mellin", "transform a trace CSV to its spectrum");
  std::string mellin_in;
  cmd_mellin->add_option("--in", mellin_in, "trace CSV path")->required();
  cmd_mellin->add_flag("--naive", use_naive,
                       "use the O(q^2) reference transform");

  // equidist
  auto* cmd_eq = app.add_subcommand(
      "equidist", "equidistribution report for a kernel or a sample file");
  std::string eq_kernel, eq_input, eq_measure;
  unsigned eq_moments = 8, eq_weyl = 10, eq_hist = 0;
  bool eq_ks = false;
  std::size_t eq_ref_samples = 100000;
  add_field_opts(cmd_eq, false);
  cmd_eq->add_option("--kernel", eq_kernel,
                     "gauss | kl<N> | evans | rudnick");
  cmd_eq->add_option("--input", eq_input, "samples CSV (re,im rows)");
  cmd_eq->add_option("--measure", eq_measure,
                     "haar-circle | sato-tate | semicircle | u1 | su2 | "
                     "sun:N | uspn:N");
  cmd_eq->add_option("--moments", eq_moments, "highest moment order")
      ->capture_default_str();
  cmd_eq->add_option("--weyl", eq_weyl, "highest Weyl order")
      ->capture_default_str();
  cmd_eq->add_flag("--ks", eq_ks, "include the KS statistic");
  cmd_eq->add_option("--hist", eq_hist, "emit a histogram CSV with B bins");
  cmd_eq->add_option("--ref-samples", eq_ref_samples,
                     "sample count for empirical group measures")
      ->capture_default_str();
  cmd_eq->add_option("--n", kl_n, "kloosterman variables (with --kernel)");

  // haar-sample
  auto* cmd_haar = app.add_subcommand("haar-sample",
                                      "emit Haar-random trace samples");
  std::string haar_group = "su2";
  std::size_t haar_count = 1000;
  cmd_haar->add_option("--group", haar_group, "u1 | su2 | sun:N | uspn:N")
      ->capture_default_str();
  cmd_haar->add_option("--samples", haar_count, "sample count")
      ->capture_default_str();

  // ramify
  auto* cmd_ram = app.add_subcommand(
      "ramify", "dimension report for a ramification profile");
  std::string ram_profile;
  cmd_ram
      ->add_option("--profile", ram_profile,
                   "builtin name (gauss, evans, rudnick, kloosterman(n)) or "
                   "a JSON file")
      ->required();

  // sweep
  auto* cmd_sweep = app.add_subcommand("sweep", "aggregate runs over fields");
  SweepConfig sweep_cfg;
  cmd_sweep->add_option("--mode", sweep_cfg.mode, "vertical | horizontal")
      ->required();
  cmd_sweep->add_option("--p", sweep_cfg.p, "fixed prime (vertical)");
  cmd_sweep->add_option("--kmax", sweep_cfg.kmax, "top degree (vertical)");
  cmd_sweep->add_option("--pmin", sweep_cfg.pmin, "lowest prime (horizontal)");
  cmd_sweep->add_option("--pmax", sweep_cfg.pmax,
                        "highest prime (horizontal)");
  cmd_sweep->add_option("--kernel", sweep_cfg.kernel,
                        "gauss | kl<N> | evans | rudnick")
      ->capture_default_str();
  cmd_sweep->add_option("--n", sweep_cfg.n, "kloosterman variables");
  cmd_sweep->add_option("--measure", sweep_cfg.measure,
                        "override the per-kernel default measure");
  cmd_sweep->add_option("--psi", sweep_cfg.psi_b, "additive twist b");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const fs::path out(out_dir);
    if (!out_dir.empty()) fs::create_directories(out);

    if (cmd_field->parsed()) {
      auto field = build_field(fargs.p, fargs.k);
      std::cout << field_json(*field).dump(2) << "\n";
      return 0;
    }

    for (const auto& kc : kernel_cmds) {
      if (!kc.cmd->parsed()) continue;
      const KernelSpec spec = parse_kernel_name(kc.name, kl_n, raw);
      KernelContext ctx = make_context(fargs);
      if (kc.name == "gauss" && chi_j >= 0) {
        const std::uint64_t n = ctx.field->q() - 1;
        const MultiplicativeCharacter chi{
            ctx.field, ctx.table,
            static_cast<std::uint32_t>(std::uint64_t(chi_j) % n)};
        const cdouble g = gauss_sum(*ctx.table, ctx.psi, chi);
        nlohmann::json j;
        j["p"] = ctx.field->p();
        j["k"] = ctx.field->k();
        j["j"] = chi.j;
        j["b"] = ctx.field->coeffs(ctx.psi.b);
        j["order"] = chi.order();
        j["re"] = g.real();
        j["im"] = g.imag();
        j["abs"] = std::abs(g);
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      TraceFunction t = make_kernel(ctx.table, ctx.psi, spec);
      MellinSpectrum s = use_naive ? mellin_naive(t) : mellin_fast(t);
      {
        std::ostringstream os;
        write_trace_csv(os, t);
        write_file(out / "trace.csv", os.str());
      }
      {
        std::ostringstream os;
        write_spectrum_csv(os, s);
        write_file(out / "spectrum.csv", os.str());
      }
      if (json) {
        nlohmann::json j;
        j["kernel"] = t.meta.name;
        j["q"] = ctx.field->q();
        j["normalized"] = t.meta.normalized;
        j["files"] = {(out / "trace.csv").string(),
                      (out / "spectrum.csv").string()};
        std::cout << j.dump(2) << "\n";
      } else {
        std::cerr << kc.name << ": q = " << ctx.field->q() << " -> "
                  << (out / "trace.csv").string() << ", "
                  << (out / "spectrum.csv").string() << "\n";
      }
      return 0;
    }

    if (cmd_mellin->parsed()) {
      std::ifstream is(mellin_in);
      if (!is) throw Error{"cannot read " + mellin_in};
      TraceFunction t = read_trace_csv(is);
      MellinSpectrum s = use_naive ? mellin_naive(t) : mellin_fast(t);
      std::ostringstream os;
      write_spectrum_csv(os, s);
      write_file(out / "spectrum.csv", os.str());
      if (json) std::cout << os.str();
      return 0;
    }

    if (cmd_eq->parsed()) {
      SampleSet samples;
      std::string measure_name = eq_measure;
      if (!eq_kernel.empty()) {
        if (fargs.p == 0) throw Error{"--kernel needs --p"};
        const KernelSpec spec = parse_kernel_name(eq_kernel, kl_n, false);
        KernelContext ctx = make_context(fargs);
        KernelRun run = run_kernel(ctx, spec);
        samples = samples_for_report(run, spec);
        if (measure_name.empty()) measure_name = default_measure_for(spec);
      } else if (!eq_input.empty()) {
        std::ifstream is(eq_input);
        if (!is) throw Error{"cannot read " + eq_input};
        samples.raw = read_samples_csv(is);
        samples.kernel_name = "file:" + fs::path(eq_input).filename().string();
        if (measure_name.empty())
          throw Error{"--input needs an explicit --measure"};
      } else {
        throw Error{"equidist needs --kernel or --input"};
      }
      ReferenceMeasure measure =
          parse_measure(measure_name, eq_ref_samples, seed);
      if (measure.kind() != MeasureKind::HaarCircle) {
        double max_im = 0.0, max_abs = 0.0;
        for (const auto& z : samples.raw) {
          max_im = std::max(max_im, std::abs(z.imag()));
          max_abs = std::max(max_abs, std::abs(z));
        }
        if (max_im > 1e-6 * std::max(1.0, max_abs))
          throw Error{"samples are not real-valued; measure " + measure_name +
                      " compares real samples"};
      }
      ReportOptions options;
      options.weyl_order = eq_weyl;
      options.moment_orders.clear();
      for (unsigned r = 1; r <= eq_moments; ++r)
        options.moment_orders.push_back(r);
      options.with_ks = eq_ks;
      EquidistReport report = build_report(samples, measure, options);
      const nlohmann::json j = report_json(report);
      write_file(out / "report.json", j.dump(2) + "\n");
      if (eq_hist > 0) {
        std::vector<double> coords;
        coords.reserve(samples.raw.size());
        for (const auto& z : samples.raw) {
          if (measure.kind() == MeasureKind::HaarCircle) {
            double a = std::arg(z);
            if (a < 0) a += 2.0 * std::numbers::pi;
            coords.push_back(a);
          } else if (measure.kind() == MeasureKind::SatoTate) {
            coords.push_back(angle_from_real(
                z.real(), samples.range_halfwidth > 0 ? samples.range_halfwidth
                                                      : 2.0));
          } else {
            coords.push_back(z.real());
          }
        }
        const auto rows = histogram(coords, eq_hist, measure);
        std::ostringstream os;
        write_histogram_csv(os, rows);
        write_file(out / "hist.csv", os.str());
      }
      if (json) std::cout << j.dump(2) << "\n";
      std::cerr << "equidist: " << report.count << " samples, "
                << report.violations.size() << " violations -> "
                << (out / "report.json").string() << "\n";
      return equidist_exit(report);
    }

    if (cmd_haar->parsed()) {
      const GroupSpec group = GroupSpec::parse(haar_group);
      const auto traces = trace_samples(group, haar_count, seed);
      std::ostringstream os;
      write_samples_csv(os, traces,
                        "group=" + group.name() + " seed=" +
                            std::to_string(seed) + " count=" +
                            std::to_string(haar_count) + " algorithm=" +
                            SeededRng::algorithm);
      write_file(out / "samples.csv", os.str());
      if (json) std::cout << os.str();
      std::cerr << "haar-sample: " << haar_count << " traces of "
                << group.name() << " -> " << (out / "samples.csv").string()
                << "\n";
      return 0;
    }

    if (cmd_ram->parsed()) {
      RamificationProfile profile;
      if (fs::exists(ram_profile)) {
        std::ifstream is(ram_profile);
        nlohmann::json j;
        is >> j;
        profile = profile_from_json(j);
      } else {
        profile = builtin_profile(ram_profile);
      }
      const DimensionReport report = analyze(profile);
      std::cout << dimension_report_json(profile.name, report).dump(2) << "\n";
      return 0;
    }

    if (cmd_sweep->parsed()) {
      sweep_cfg.threads = threads;
      sweep_cfg.seed = seed;
      return run_sweep(sweep_cfg, out, json);
    }
  } catch (const CostGuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
