#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btcpanel/dates.hpp"

using namespace btcpanel;

TEST_CASE("civil round trip") {
  CHECK(days_from_civil(1970, 1, 1) == 0);
  CHECK(days_from_civil(2017, 1, 2) == 17168);
  for (std::int64_t d = -1000; d <= 40000; d += 37) {
    CivilDate c = civil_from_days(d);
    CHECK(days_from_civil(c.year, c.month, c.day) == d);
  }
}

TEST_CASE("weekday anchors") {
  CHECK(weekday(Date{0}) == 3);                       // 1970-01-01 Thursday
  CHECK(weekday(make_date(2017, 1, 2)) == 0);         // Monday
  CHECK(weekday(make_date(2017, 1, 8)) == 6);         // Sunday
  CHECK(weekday(make_date(2024, 2, 29)) == 3);        // Thursday
}

TEST_CASE("week serial is Monday-anchored and consecutive") {
  std::int64_t w = week_serial(make_date(2017, 1, 2));
  CHECK(week_serial(make_date(2017, 1, 8)) == w);
  CHECK(week_serial(make_date(2017, 1, 9)) == w + 1);
  CHECK(week_monday(w) == make_date(2017, 1, 2));
  CHECK(week_sunday(w) == make_date(2017, 1, 8));
}

TEST_CASE("iso week edge cases") {
  // 2016-01-01 falls in ISO week 53 of 2015.
  IsoWeek a = iso_week(make_date(2016, 1, 1));
  CHECK(a.year == 2015);
  CHECK(a.week == 53);
  // 2018-12-31 falls in ISO week 1 of 2019.
  IsoWeek b = iso_week(make_date(2018, 12, 31));
  CHECK(b.year == 2019);
  CHECK(b.week == 1);
  IsoWeek c = iso_week(make_date(2017, 2, 1));
  CHECK(c.year == 2017);
  CHECK(c.week == 5);
}

TEST_CASE("week ids round trip") {
  std::int64_t w = week_serial(make_date(2017, 2, 1));
  CHECK(week_id(w) == "2017-W05");
  auto parsed = parse_week_id("2017-W05");
  REQUIRE(parsed.has_value());
  CHECK(*parsed == w);
  CHECK(!parse_week_id("2017-05").has_value());
  CHECK(!parse_week_id("2017-W60").has_value());
  for (std::int64_t s = 2300; s < 2600; ++s) {
    auto back = parse_week_id(week_id(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
}

TEST_CASE("time buckets") {
  std::int64_t w = week_serial(make_date(2017, 2, 1));
  CHECK(biweek_bucket(w) == 201702);  // iso week 5 -> bucket 2
  CHECK(month_bucket(w) == 201701);   // Monday is 2017-01-30
}

TEST_CASE("timestamp parsing") {
  auto t = parse_timestamp("2017-01-02T03:04:05Z");
  REQUIRE(t.has_value());
  CHECK(t->date() == make_date(2017, 1, 2));
  CHECK(t->hour_bucket() == t->seconds / 3600);
  CHECK(format_timestamp(*t) == "2017-01-02T03:04:05Z");
  CHECK(parse_timestamp("2017-01-02T03:04:05+00:00").has_value());
  CHECK(!parse_timestamp("2017-01-02 03:04:05").has_value());
  CHECK(!parse_timestamp("2017-13-02T03:04:05Z").has_value());
  CHECK(!parse_timestamp("2017-02-29T00:00:00Z").has_value());
}

TEST_CASE("date parsing") {
  auto d = parse_date("2016-02-29");
  REQUIRE(d.has_value());
  CHECK(format_date(*d) == "2016-02-29");
  CHECK(!parse_date("2015-02-29").has_value());
  CHECK(!parse_date("2015-2-9").has_value());
  CHECK(!parse_date("2015-00-09").has_value());
}
