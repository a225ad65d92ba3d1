#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "expsum/io.hpp"
#include "expsum/kernels.hpp"

using namespace expsum;

TEST_CASE("fmt17 round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, std::sqrt(2.0), -1e-300, 2.0, 0.1 + 0.2,
                   123456789.123456789}) {
    CHECK(std::stod(fmt17(v)) == v);
  }
}

TEST_CASE("field descriptor json") {
  const auto j = field_json(*build_field(7, 1));
  CHECK(j["p"] == 7);
  CHECK(j["k"] == 1);
  CHECK(j["generator"] == std::vector<std::uint32_t>{3});
  CHECK(j["modulus"] == std::vector<std::uint32_t>{0, 1});

  const auto j9 = field_json(*build_field(3, 2));
  CHECK(j9["modulus"] == std::vector<std::uint32_t>{1, 0, 1});
  CHECK(j9["generator"] == std::vector<std::uint32_t>{1, 1});
}

TEST_CASE("trace csv round trip") {
  auto field = build_field(5, 1);
  auto table = build_log_table(field);
  AdditiveCharacter psi{field, field->one()};
  auto t = make_kernel(table, psi, KernelSpec::kloosterman(2));

  std::ostringstream os;
  write_trace_csv(os, t);
  const std::string text = os.str();
  CHECK(text.find("# kernel=kloosterman p=5 k=1 n=2 normalized=1") !=
        std::string::npos);
  CHECK(text.find("m,element,re,im") != std::string::npos);

  std::istringstream is(text);
  const TraceFunction back = read_trace_csv(is);
  REQUIRE(back.values.size() == t.values.size());
  for (std::size_t m = 0; m < t.values.size(); ++m)
    CHECK(back.values[m] == t.values[m]);  // exact: 17 digits
  CHECK(back.meta.name == "kloosterman");
  CHECK(back.meta.n == 2);
  CHECK(back.field->q() == 5);
}

TEST_CASE("spectrum csv structure") {
  auto field = build_field(7, 1);
  auto table = build_log_table(field);
  AdditiveCharacter psi{field, field->one()};
  auto s = mellin_fast(make_kernel(table, psi, KernelSpec::gauss()));
  std::ostringstream os;
  write_spectrum_csv(os, s);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("# spectrum provenance=fast kernel=gauss p=7", 0) == 0);
  std::getline(is, line);
  CHECK(line == "j,order,re,im,abs");
  // row for j=3 carries character order 2 (Legendre)
  std::size_t rows = 0;
  bool saw_legendre = false;
  while (std::getline(is, line)) {
    if (line.rfind("3,2,", 0) == 0) saw_legendre = true;
    ++rows;
  }
  CHECK(rows == 6);
  CHECK(saw_legendre);
}

TEST_CASE("samples csv round trip") {
  std::vector<cdouble> v{{1.0, -2.0}, {0.5, 0.0}, {-0.25, 1e-9}};
  std::ostringstream os;
  write_samples_csv(os, v, "group=su2 seed=1 count=3");
  std::istringstream is(os.str());
  const auto back = read_samples_csv(is);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == v[i]);
}

TEST_CASE("report json carries the documented keys") {
  EquidistReport r;
  r.kernel = "gauss";
  r.q = 7;
  r.count = 5;
  r.measure = "haar_circle";
  r.weyl = {{1, 0.5, 0.9, "(2n+1)/sqrt(q)"}};
  r.katz_mean = WeylRow{1, 0.1, 0.8, "2(rg(N)+dim w(N))/sqrt(q)"};
  r.moments = {{2, 1.01, 1.0, 0.01}};
  r.ks = 0.04;
  r.max_abs = 1.0;
  r.min_abs = 0.9;
  const auto j = report_json(r);
  for (const char* key :
       {"kernel", "q", "count", "weyl", "moments", "ks", "extremes",
        "violations"})
    CHECK(j.contains(key));
  CHECK(j["weyl"].size() == 2);  // the katz mean appends as a bound row
  CHECK(j["weyl"][0]["provenance"] == "(2n+1)/sqrt(q)");
  CHECK(j["weyl"][1]["provenance"] == "2(rg(N)+dim w(N))/sqrt(q)");
  CHECK(j["ks"]["statistic"] == 0.04);
  CHECK(j["violations"].empty());
}

TEST_CASE("histogram csv") {
  std::vector<HistogramRow> rows{{0.0, 0.5, 3, 0.6, 0.5},
                                 {0.5, 1.0, 7, 1.4, 1.5}};
  std::ostringstream os;
  write_histogram_csv(os, rows);
  const std::string text = os.str();
  CHECK(text.rfind("bin_lo,bin_hi,count,density,ref_density\n", 0) == 0);
  CHECK(text.find("0.5,1,7,") != std::string::npos);
}
