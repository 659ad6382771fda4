#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <filesystem>
#include <random>
#include <sstream>

#include "ecomplex/csv.hpp"
#include "ecomplex/error.hpp"
#include "ecomplex/ingest.hpp"
#include "ecomplex/provinces.hpp"

using namespace ecomplex;

namespace {

const char* kHeader = "firm_id,region,industry,list_date,delist_date\n";

FirmFile parse(const std::string& body) {
  std::istringstream in(kHeader + body);
  return parse_firm_records(in);
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::Io;
}

FirmRecord firm(std::string id, std::string region, std::string industry, int list, std::optional<int> delist = {}) {
  FirmRecord r{std::move(id), std::move(region), std::move(industry), {list, 1, 1}, std::nullopt};
  if (delist) r.delist_date = Date{*delist, 1, 1};
  return r;
}

}  // namespace

TEST_CASE("firm rows map onto records") {
  const auto f = parse("F001,SH,C38,1994-03-01,\n");
  REQUIRE(f.records.size() == 1);
  const auto& r = f.records[0];
  CHECK(r.firm_id == "F001");
  CHECK(r.region == "SH");
  CHECK(r.industry == "C38");
  CHECK(r.list_date == Date{1994, 3, 1});
  CHECK_FALSE(r.delist_date.has_value());
}

TEST_CASE("header only gives an empty list") {
  CHECK(parse("").records.empty());
}

TEST_CASE("firm file errors") {
  CHECK(code_of([] { parse("F1,SH,C1,2001-01-01,1994-03-01\n"); }) == Errc::OrderViolation);
  CHECK(code_of([] { parse("F1,SH,C1,2001-01-01,2001-01-01\n"); }) == Errc::OrderViolation);
  CHECK(code_of([] { parse("F1,SH,C1,2001-13-01,\n"); }) == Errc::MalformedDate);
  CHECK(code_of([] { parse("F1,SH,C1,2001-02-29,\n"); }) == Errc::MalformedDate);
  CHECK(code_of([] { parse("F1,SH,C1,01/02/2001,\n"); }) == Errc::MalformedDate);
  CHECK(code_of([] { parse("F1,SH,C1,2001-01-01,\nF1,BJ,C2,2002-01-01,\n"); }) == Errc::DuplicateFirmId);
  CHECK(code_of([] {
          std::istringstream in("firm_id,region,list_date,delist_date\n");
          parse_firm_records(in);
        }) == Errc::MissingColumn);
  CHECK(code_of([] { parse_firm_records(std::filesystem::path("/nonexistent/firms.csv")); }) == Errc::Io);
}

TEST_CASE("malformed date errors name the line and column") {
  try {
    parse("F1,SH,C1,2001-01-01,\nF2,SH,C1,2001-1-01,\n");
    FAIL("no error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":3") != std::string::npos);
    CHECK(msg.find("list_date") != std::string::npos);
  }
}

TEST_CASE("rows with blank identifiers are rejected with a diagnostic") {
  const auto f = parse("F1,SH,C1,2001-01-01,\nF2,,C1,2001-01-01,\nF3,BJ,C2,2000-05-05,\n");
  CHECK(f.records.size() == 2);
  REQUIRE(f.rejected.size() == 1);
  CHECK(f.rejected[0].line == 3);
}

TEST_CASE("leap days parse") {
  CHECK(Date::parse("2000-02-29").has_value());
  CHECK_FALSE(Date::parse("1900-02-29").has_value());
  CHECK(Date::parse("2016-02-29")->str() == "2016-02-29");
}

TEST_CASE("activity window") {
  CHECK(is_active(firm("a", "P", "I", 1995, 2003), 2000));
  CHECK_FALSE(is_active(firm("a", "P", "I", 1995, 2003), 2003));
  CHECK_FALSE(is_active(firm("a", "P", "I", 2005), 2000));
  CHECK(is_active(firm("a", "P", "I", 2005), 2005));
}

TEST_CASE("count matrix from records") {
  const std::vector<FirmRecord> recs = {firm("F1", "P1", "I1", 2000), firm("F2", "P1", "I1", 2000),
                                        firm("F3", "P2", "I2", 2000)};
  const auto c = build_count_matrix(recs, 2001);
  CHECK(c.regions == std::vector<std::string>{"P1", "P2"});
  CHECK(c.industries == std::vector<std::string>{"I1", "I2"});
  CHECK(c.counts(0, 0) == 2);
  CHECK(c.counts(0, 1) == 0);
  CHECK(c.counts(1, 0) == 0);
  CHECK(c.counts(1, 1) == 1);

  const std::vector<FirmRecord> one = {firm("F1", "P1", "I1", 2000)};
  const auto single = build_count_matrix(one, 2000);
  CHECK(single.counts.rows() == 1);
  CHECK(single.counts(0, 0) == 1);

  CHECK(code_of([&] { build_count_matrix(recs, 1999); }) == Errc::EmptyYear);
}

TEST_CASE("count totals, order invariance and round trip on random firm sets") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FirmRecord> recs;
    const int n = std::uniform_int_distribution<int>(1, 300)(rng);
    for (int i = 0; i < n; ++i) {
      const int list = std::uniform_int_distribution<int>(1990, 2015)(rng);
      std::optional<int> delist;
      if (rng() % 3 == 0) delist = std::uniform_int_distribution<int>(list + 1, 2020)(rng);
      recs.push_back(firm("F" + std::to_string(i), "P" + std::to_string(rng() % 12),
                          "I" + std::to_string(rng() % 17), list, delist));
    }
    const int year = std::uniform_int_distribution<int>(1995, 2015)(rng);
    const auto active = std::count_if(recs.begin(), recs.end(), [&](const auto& r) { return is_active(r, year); });
    if (active == 0) {
      CHECK_THROWS_AS(build_count_matrix(recs, year), Error);
      continue;
    }
    const auto c = build_count_matrix(recs, year);
    CHECK(c.total() == active);
    CHECK(std::is_sorted(c.regions.begin(), c.regions.end()));

    auto shuffled = recs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(build_count_matrix(shuffled, year) == c);

    std::ostringstream out;
    write_count_matrix(out, c);
    std::istringstream in(out.str());
    CHECK(read_count_matrix(in, year) == c);
  }
}

TEST_CASE("panel parsing") {
  const std::string header = "region,year,gdp_pc,population,urbanization,schooling,innovation,trade,ricu,ricr\n";
  {
    std::istringstream in(header + "SH,2010,76074,23.03,0.89,0.02,1000,5000,2.1,1.5\nBJ,2010,,20,0.86,0.03,10,20,,\n");
    const auto t = parse_panel(in);
    CHECK(t.size() == 2);
    const auto* sh = t.find("SH", 2010);
    REQUIRE(sh != nullptr);
    CHECK((*sh)[PanelColumn::GdpPc] == 76074.0);
    CHECK((*sh)[PanelColumn::Urbanization] == 0.89);
    const auto* bj = t.find("BJ", 2010);
    REQUIRE(bj != nullptr);
    CHECK_FALSE((*bj)[PanelColumn::GdpPc].has_value());
    CHECK_FALSE((*bj)[PanelColumn::Ricu].has_value());
    CHECK(t.find("BJ", 2011) == nullptr);
  }
  CHECK(code_of([&] {
          std::istringstream in(header + "SH,2010,1,1,0.5,0.1,1,1,1,1\nSH,2010,2,1,0.5,0.1,1,1,1,1\n");
          parse_panel(in);
        }) == Errc::DuplicateKey);
  CHECK(code_of([&] {
          std::istringstream in(header + "SH,2010,abc,1,0.5,0.1,1,1,1,1\n");
          parse_panel(in);
        }) == Errc::NonNumericCell);
  CHECK(code_of([&] {
          std::istringstream in(header + "SH,2010,1,1,1.5,0.1,1,1,1,1\n");
          parse_panel(in);
        }) == Errc::InvalidValue);
  CHECK(code_of([&] {
          std::istringstream in("region,year,gdp_pc\n");
          parse_panel(in);
        }) == Errc::MissingColumn);
}

TEST_CASE("csv helpers") {
  CHECK(csv::split_line("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
  CHECK(csv::split_line("a,,") == std::vector<std::string>{"a", "", ""});
  CHECK(csv::escape("x,y") == "\"x,y\"");
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(-0.0) == "0");
  CHECK(csv::format_double(1e-300) == "1e-300");
  CHECK(csv::format_optional(std::nullopt) == "");
  CHECK(csv::parse_double(" 1") == std::nullopt);
  CHECK(csv::parse_double("2.5") == 2.5);
  CHECK(csv::parse_int("2010") == 2010);
  CHECK(csv::parse_int("20x") == std::nullopt);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    double v;
    const auto bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(csv::parse_double(csv::format_double(v)) == (v == 0.0 ? 0.0 : v));
  }
}

TEST_CASE("province codes") {
  CHECK(kProvinces.size() == 31);
  REQUIRE(find_province("HN").has_value());
  CHECK(std::string(find_province("HN")->name) == "Hunan");
  CHECK(std::string(find_province("HI")->name) == "Hainan");
  CHECK_FALSE(find_province("XX").has_value());
}
