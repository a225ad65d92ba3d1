#pragma once

// Serialization of the file formats the tools speak:
//
//   trace CSV     meta header, then rows  m,element,re,im
//   spectrum CSV  meta header, then rows  j,order,re,im,abs
//   samples CSV   meta header, then rows  re,im
//   report JSON   keys kernel, q, count, weyl[], moments[], ks, extremes,
//                 violations[]
//   field JSON    {"p":..,"k":..,"modulus":[..],"generator":[..]}
//   profile JSON  {"name":..,"rank":..,"swan0":..,"swan_inf":..,
//                  "finite_points":[[label,drop,swan]..],"genus":..,
//                  "slopes":[[label,slope]..]}
//
// Elements inside CSV cells print as [c0;c1;...]. Floats print with 17
// significant digits, which round-trips doubles exactly.

#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expsum/equidist.hpp"
#include "expsum/ffield.hpp"
#include "expsum/ramification.hpp"
#include "expsum/trace.hpp"

namespace expsum {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string element_str(const Field& f, FieldElement e) {
  const auto c = f.coeffs(e);
  std::string out = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(c[i]);
  }
  return out + "]";
}

inline std::string coeffs_str(const std::vector<std::uint32_t>& c) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(c[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Field descriptor JSON.

inline nlohmann::json field_json(const Field& f) {
  nlohmann::json j;
  j["p"] = f.p();
  j["k"] = f.k();
  j["modulus"] = f.modulus();
  j["generator"] = f.coeffs(f.generator());
  return j;
}

// ---------------------------------------------------------------------------
// Trace CSV.

inline void write_trace_csv(std::ostream& os, const TraceFunction& t) {
  const Field& f = *t.field;
  os << "# kernel=" << t.meta.name << " p=" << f.p() << " k=" << f.k()
     << " n=" << t.meta.n << " normalized=" << (t.meta.normalized ? 1 : 0)
     << " psi_b=" << coeffs_str(t.meta.psi_b) << "\n";
  os << "m,element,re,im\n";
  // rebuilding the exp sequence is O(q) and keeps the writer standalone
  FieldElement x = f.one();
  for (std::size_t m = 0; m < t.values.size(); ++m) {
    os << m << ',' << element_str(f, x) << ',' << fmt17(t.values[m].real())
       << ',' << fmt17(t.values[m].imag()) << "\n";
    x = f.mul(x, f.generator());
  }
}

struct TraceCsvHeader {
  std::string kernel;
  std::uint64_t p = 0;
  unsigned k = 1;
  unsigned n = 0;
  bool normalized = false;
};

inline TraceFunction read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# kernel=", 0) != 0)
    throw Error{"trace CSV: missing meta header"};
  TraceCsvHeader h;
  {
    std::istringstream hs(line.substr(2));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "kernel") h.kernel = val;
      else if (key == "p") h.p = std::stoull(val);
      else if (key == "k") h.k = static_cast<unsigned>(std::stoul(val));
      else if (key == "n") h.n = static_cast<unsigned>(std::stoul(val));
      else if (key == "normalized") h.normalized = val == "1";
    }
  }
  if (h.p == 0) throw Error{"trace CSV: bad header"};
  if (!std::getline(is, line)) throw Error{"trace CSV: missing column row"};
  auto field = build_field(h.p, h.k);
  std::vector<cdouble> values(field->q() - 1);
  std::size_t seen = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string m_s, elem_s, re_s, im_s;
    if (!std::getline(ls, m_s, ',') || !std::getline(ls, elem_s, ',') ||
        !std::getline(ls, re_s, ',') || !std::getline(ls, im_s, ','))
      throw Error{"trace CSV: malformed row: " + line};
    const std::size_t m = std::stoull(m_s);
    if (m >= values.size()) throw Error{"trace CSV: index out of range"};
    values[m] = {std::stod(re_s), std::stod(im_s)};
    ++seen;
  }
  if (seen != values.size())
    throw Error{"trace CSV: expected " + std::to_string(values.size()) +
                " rows, got " + std::to_string(seen)};
  KernelMeta meta;
  meta.name = h.kernel;
  meta.n = h.n;
  meta.normalized = h.normalized;
  return {std::move(field), std::move(values), std::move(meta)};
}

// ---------------------------------------------------------------------------
// Spectrum CSV.

inline void write_spectrum_csv(std::ostream& os, const MellinSpectrum& s) {
  const Field& f = *s.field;
  const std::uint64_t n = f.q() - 1;
  os << "# spectrum provenance=" << s.meta.provenance
     << " kernel=" << s.meta.kernel << " p=" << f.p() << " k=" << f.k()
     << " psi_b=" << coeffs_str(s.meta.psi_b) << "\n";
  os << "j,order,re,im,abs\n";
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    const std::uint64_t order = n / std::gcd<std::uint64_t>(j, n);
    os << j << ',' << order << ',' << fmt17(s.values[j].real()) << ','
       << fmt17(s.values[j].imag()) << ',' << fmt17(std::abs(s.values[j]))
       << "\n";
  }
}

// ---------------------------------------------------------------------------
// Sample CSV (haar-sample output, equidist input).

inline void write_samples_csv(std::ostream& os, std::span<const cdouble> v,
                              const std::string& meta) {
  os << "# samples " << meta << "\n";
  os << "re,im\n";
  for (const auto& z : v)
    os << fmt17(z.real()) << ',' << fmt17(z.imag()) << "\n";
}

inline std::vector<cdouble> read_samples_csv(std::istream& is) {
  std::vector<cdouble> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("re,", 0) == 0) continue;
    std::istringstream ls(line);
    std::string re_s, im_s;
    if (!std::getline(ls, re_s, ',')) continue;
    std::getline(ls, im_s, ',');
    out.emplace_back(std::stod(re_s), im_s.empty() ? 0.0 : std::stod(im_s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equidistribution report JSON / CSV.

inline nlohmann::json report_json(const EquidistReport& r) {
  nlohmann::json j;
  j["kernel"] = r.kernel;
  j["q"] = r.q;
  j["count"] = r.count;
  j["measure"] = r.measure;
  j["weyl"] = nlohmann::json::array();
  auto weyl_row = [](const WeylRow& row) {
    nlohmann::json w;
    w["n"] = row.order;
    w["abs"] = row.abs_value;
    if (row.bound) {
      w["bound"] = *row.bound;
      w["provenance"] = row.provenance;
    }
    return w;
  };
  for (const auto& row : r.weyl) j["weyl"].push_back(weyl_row(row));
  if (r.katz_mean) j["weyl"].push_back(weyl_row(*r.katz_mean));
  j["moments"] = nlohmann::json::array();
  for (const auto& row : r.moments) {
    j["moments"].push_back({{"order", row.order},
                            {"empirical", row.empirical},
                            {"reference", row.reference},
                            {"abs_diff", row.abs_diff}});
  }
  if (r.ks)
    j["ks"] = {{"statistic", *r.ks}, {"measure", r.measure}};
  else
    j["ks"] = nullptr;
  j["extremes"] = {{"max_abs", r.max_abs}, {"min_abs", r.min_abs}};
  j["violations"] = r.violations;
  return j;
}

inline void write_report_csv(std::ostream& os, const EquidistReport& r) {
  os << "metric,order,value,reference,bound\n";
  for (const auto& row : r.weyl)
    os << "weyl," << row.order << ',' << fmt17(row.abs_value) << ",,"
       << (row.bound ? fmt17(*row.bound) : "") << "\n";
  if (r.katz_mean)
    os << "katz_mean,," << fmt17(r.katz_mean->abs_value) << ",,"
       << (r.katz_mean->bound ? fmt17(*r.katz_mean->bound) : "") << "\n";
  for (const auto& row : r.moments)
    os << "moment," << row.order << ',' << fmt17(row.empirical) << ','
       << fmt17(row.reference) << ",\n";
  if (r.ks) os << "ks,," << fmt17(*r.ks) << ",,\n";
  os << "max_abs,," << fmt17(r.max_abs) << ",,\n";
  os << "min_abs,," << fmt17(r.min_abs) << ",,\n";
  os << "violations,," << r.violations.size() << ",,\n";
}

inline void write_histogram_csv(std::ostream& os,
                                std::span<const HistogramRow> rows) {
  os << "bin_lo,bin_hi,count,density,ref_density\n";
  for (const auto& row : rows)
    os << fmt17(row.lo) << ',' << fmt17(row.hi) << ',' << row.count << ','
       << fmt17(row.density) << ',' << fmt17(row.ref_density) << "\n";
}

// ---------------------------------------------------------------------------
// Ramification profile JSON.

inline RamificationProfile profile_from_json(const nlohmann::json& j) {
  RamificationProfile p;
  p.name = j.value("name", "profile");
  p.generic_rank = j.value("rank", 0u);
  p.swan0 = j.value("swan0", 0u);
  p.swan_inf = j.value("swan_inf", 0u);
  p.genus = j.value("genus", 0u);
  if (j.contains("finite_points")) {
    for (const auto& fp : j.at("finite_points")) {
      FinitePoint pt;
      if (fp.is_array()) {
        pt.label = fp.at(0).is_string() ? fp.at(0).get<std::string>()
                                        : fp.at(0).dump();
        pt.drop = fp.at(1).get<unsigned>();
        pt.swan = fp.at(2).get<unsigned>();
      } else {
        pt.label = fp.value("label", "?");
        pt.drop = fp.value("drop", 0u);
        pt.swan = fp.value("swan", 0u);
      }
      p.finite_points.push_back(std::move(pt));
    }
  }
  if (j.contains("slopes")) {
    for (const auto& sp : j.at("slopes")) {
      SlopePoint pt;
      pt.label = sp.at(0).is_string() ? sp.at(0).get<std::string>()
                                      : sp.at(0).dump();
      const auto& v = sp.at(1);
      if (v.is_string())
        pt.slope = Rational::parse(v.get<std::string>());
      else if (v.is_number_integer())
        pt.slope = Rational(v.get<long long>());
      else
        throw InvalidProfileError{
            "slopes must be integers or \"a/b\" strings"};
      p.slopes.push_back(std::move(pt));
    }
  }
  p.validate();
  return p;
}

inline nlohmann::json profile_json(const RamificationProfile& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["rank"] = p.generic_rank;
  j["swan0"] = p.swan0;
  j["swan_inf"] = p.swan_inf;
  j["genus"] = p.genus;
  j["finite_points"] = nlohmann::json::array();
  for (const auto& pt : p.finite_points)
    j["finite_points"].push_back({pt.label, pt.drop, pt.swan});
  j["slopes"] = nlohmann::json::array();
  for (const auto& pt : p.slopes)
    j["slopes"].push_back({pt.label, pt.slope.str()});
  return j;
}

inline nlohmann::json dimension_report_json(const std::string& name,
                                            const DimensionReport& r) {
  nlohmann::json j;
  j["name"] = name;
  j["euler_characteristic"] = r.euler_char;
  j["tannakian_dimension"] = r.tannakian_dim;
  j["bad_character_bound"] = r.bad_char_bound;
  if (r.deligne_constant)
    j["deligne_constant"] = r.deligne_constant->str();
  else
    j["deligne_constant"] = nullptr;
  return j;
}

}  // namespace expsum
