#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btcpanel/errors.hpp"
#include "btcpanel/regulation.hpp"
#include "btcpanel/rng.hpp"

using namespace btcpanel;

namespace {

AreaerRecord record_with(RegimeCategory regime) {
  AreaerRecord r;
  r.country = "Testland";
  r.currency = "NGN";
  r.effective_date = make_date(2017, 1, 1);
  r.regime = regime;
  return r;
}

void fill_all_flags(AreaerRecord& r, int value, int subcategories = 3) {
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < kAssetClasses; ++i)
      r.controls[k][i].assign(subcategories, value);
}

}  // namespace

TEST_CASE("peg dummy is zero only for floating") {
  CHECK(peg_dummy(record_with(RegimeCategory::Floating)) == 0);
  CHECK(peg_dummy(record_with(RegimeCategory::HardPeg)) == 1);
  CHECK(peg_dummy(record_with(RegimeCategory::SoftPeg)) == 1);
  CHECK(peg_dummy(record_with(RegimeCategory::Residual)) == 1);
}

TEST_CASE("cc index endpoints") {
  AreaerRecord r = record_with(RegimeCategory::SoftPeg);
  fill_all_flags(r, 0);
  CHECK(capital_control_index(r) == doctest::Approx(0.0));
  fill_all_flags(r, 1);
  CHECK(capital_control_index(r) == doctest::Approx(1.0));
}

TEST_CASE("single controlled class contributes 0.1") {
  AreaerRecord r = record_with(RegimeCategory::SoftPeg);
  // One flag per class, all 0; class 1 set to 1 in both directions.
  fill_all_flags(r, 0, 1);
  r.controls[0][0][0] = 1;
  r.controls[1][0][0] = 1;
  CHECK(capital_control_index(r) == doctest::Approx(0.1));
}

TEST_CASE("missing flags shrink the denominator") {
  AreaerRecord r = record_with(RegimeCategory::SoftPeg);
  fill_all_flags(r, 0, 2);
  // Class 1 inflow: one flag 1, one missing -> m' = 1, class share 1.
  r.controls[0][0][0] = 1;
  r.controls[0][0][1] = std::nullopt;
  CHECK(capital_control_index(r) == doctest::Approx(0.5 * 0.1 * 1.0));
}

TEST_CASE("all-missing group contributes zero and is reported") {
  AreaerRecord r = record_with(RegimeCategory::SoftPeg);
  fill_all_flags(r, 1, 2);
  r.controls[1][4].assign(2, std::nullopt);
  CcReport report;
  double cc = capital_control_index(r, &report);
  CHECK(cc == doctest::Approx(1.0 - 0.5 * 0.1));
  REQUIRE(report.all_missing_groups.size() == 1);
  CHECK(report.all_missing_groups[0] == std::pair<int, int>{1, 5});
}

TEST_CASE("cc monotone in flags") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    AreaerRecord r = record_with(RegimeCategory::SoftPeg);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < kAssetClasses; ++i) {
        int m = static_cast<int>(rng.uniform_int(1, 4));
        for (int j = 0; j < m; ++j) {
          double u = rng.uniform();
          if (u < 0.2) r.controls[k][i].push_back(std::nullopt);
          else r.controls[k][i].push_back(u < 0.6 ? 0 : 1);
        }
      }
    double base = capital_control_index(r);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    // Raise one random flag to 1.
    int k = static_cast<int>(rng.uniform_int(0, 1));
    int i = static_cast<int>(rng.uniform_int(0, kAssetClasses - 1));
    auto& group = r.controls[k][i];
    group[static_cast<std::size_t>(rng.uniform_int(0, group.size() - 1))] = 1;
    CHECK(capital_control_index(r) >= base - 1e-12);
  }
}

TEST_CASE("constrained dummy truth table") {
  CHECK(constrained_dummy(1, 0.75, 0.7) == 1);
  CHECK(constrained_dummy(1, 0.7, 0.7) == 1);
  CHECK(constrained_dummy(1, 0.69, 0.7) == 0);
  CHECK(constrained_dummy(0, 0.99, 0.7) == 0);
  CHECK(constrained_dummy(1, 0.6, 0.5) == 1);
}

TEST_CASE("currency average") {
  std::vector<double> one = {42.0};
  CHECK(currency_average(one) == 42.0);
  std::vector<double> eur = {60.0, 80.0};
  CHECK(currency_average(eur) == 70.0);
  CHECK(!currency_average({}).has_value());
  // Order invariance over an 8-member union.
  std::vector<double> xof = {1, 2, 3, 4, 5, 6, 7, 9};
  double mean = *currency_average(xof);
  std::reverse(xof.begin(), xof.end());
  CHECK(*currency_average(xof) == doctest::Approx(mean));
  CHECK(mean == doctest::Approx(37.0 / 8));
}

TEST_CASE("step series equals brute-force latest-at-or-before lookup") {
  Rng rng(3);
  StepSeries<double> series;
  std::vector<std::pair<std::int64_t, double>> records;
  std::int64_t day = 17000;
  for (int i = 0; i < 20; ++i) {
    day += rng.uniform_int(1, 40);
    double v = rng.normal();
    series.add(Date{day}, v);
    records.emplace_back(day, v);
  }
  for (std::int64_t d = 16990; d < day + 50; ++d) {
    std::optional<double> expect;
    for (const auto& [eff, v] : records)
      if (eff <= d) expect = v;
    CHECK(series.at(Date{d}) == expect);
  }
}

TEST_CASE("step series rejects duplicate effective dates") {
  StepSeries<int> s;
  s.add(make_date(2018, 1, 1), 1);
  CHECK_THROWS_AS(s.add(make_date(2018, 1, 1), 2), ConfigError);
}

TEST_CASE("remittance index averages within week and carries forward") {
  std::int64_t w = week_serial(make_date(2017, 1, 2));
  std::vector<RemittanceQuote> quotes = {
      {make_date(2017, 1, 2), "NGN", 10.94},
      {make_date(2017, 1, 5), "NGN", 2.87},
      {make_date(2017, 1, 12), "NGN", 5.28},
  };
  RemittanceIndex idx(quotes, 8);
  REQUIRE(idx.at("NGN", w).has_value());
  CHECK(*idx.at("NGN", w) == doctest::Approx(6.905));
  CHECK(*idx.at("NGN", w + 1) == doctest::Approx(5.28));
  // Carry-forward for up to 8 weeks after the last quoted week.
  CHECK(*idx.at("NGN", w + 9) == doctest::Approx(5.28));
  CHECK(!idx.at("NGN", w + 10).has_value());
  CHECK(!idx.at("NGN", w - 1).has_value());
  CHECK(!idx.at("KES", w).has_value());
}

TEST_CASE("daily regulatory series combines countries sharing a currency") {
  std::vector<AreaerRecord> areaer;
  // Two XOF countries: one pegged with full controls, one floating with none.
  AreaerRecord a = record_with(RegimeCategory::HardPeg);
  a.country = "Alpha";
  a.currency = "XOF";
  fill_all_flags(a, 1, 1);
  AreaerRecord b = record_with(RegimeCategory::Floating);
  b.country = "Beta";
  b.currency = "XOF";
  fill_all_flags(b, 0, 1);
  areaer.push_back(a);
  areaer.push_back(b);

  std::vector<FreedomScore> freedom = {{2017, "Alpha", "XOF", 40.0},
                                       {2017, "Beta", "XOF", 60.0}};
  auto rows = build_regulatory_daily(areaer, {}, freedom, make_date(2017, 2, 1),
                                     make_date(2017, 2, 1));
  REQUIRE(rows.size() == 1);
  const RegulatorySeries& r = rows[0];
  CHECK(r.currency == "XOF");
  // Average peg 0.5 re-binarized at the 0.5 cutoff -> 1; average cc 0.5.
  REQUIRE(r.peg.has_value());
  CHECK(*r.peg == 1);
  REQUIRE(r.cc.has_value());
  CHECK(*r.cc == doctest::Approx(0.5));
  REQUIRE(r.constrained.has_value());
  CHECK(*r.constrained == 0);  // cc 0.5 < 0.7
  REQUIRE(r.freedom_score.has_value());
  CHECK(*r.freedom_score == doctest::Approx(50.0));
  CHECK(!r.remittance_cost_pct.has_value());
}

TEST_CASE("regulatory series starts only at the first effective date") {
  std::vector<AreaerRecord> areaer = {record_with(RegimeCategory::SoftPeg)};
  fill_all_flags(areaer[0], 1, 1);
  auto rows = build_regulatory_daily(areaer, {}, {}, make_date(2016, 12, 30),
                                     make_date(2017, 1, 2));
  // 4 days requested; peg defined only from 2017-01-01.
  REQUIRE(rows.size() == 4);
  CHECK(!rows[0].peg.has_value());
  CHECK(!rows[1].peg.has_value());
  REQUIRE(rows[2].peg.has_value());
  CHECK(rows[2].date == make_date(2017, 1, 1));
  CHECK(*rows[2].peg == 1);
  CHECK(*rows[3].cc == doctest::Approx(1.0));
  CHECK(*rows[3].constrained == 1);
}
