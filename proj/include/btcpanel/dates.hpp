#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace btcpanel {

// Calendar date stored as days since 1970-01-01 (negative values allowed).
struct Date {
  std::int64_t days = 0;

  friend auto operator<=>(const Date&, const Date&) = default;

  Date next() const { return Date{days + 1}; }
  Date prev() const { return Date{days - 1}; }
};

// UTC timestamp with second resolution.
struct Timestamp {
  std::int64_t seconds = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

  Date date() const {
    std::int64_t d = seconds / 86400;
    if (seconds < 0 && seconds % 86400 != 0) --d;
    return Date{d};
  }
  std::int64_t hour_bucket() const {
    std::int64_t h = seconds / 3600;
    if (seconds < 0 && seconds % 3600 != 0) --h;
    return h;
  }
};

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
};

std::int64_t days_from_civil(int y, unsigned m, unsigned d);
CivilDate civil_from_days(std::int64_t z);

Date make_date(int y, unsigned m, unsigned d);
CivilDate to_civil(Date d);

// 0 = Monday .. 6 = Sunday.
int weekday(Date d);

// Serial index of the ISO week containing d (consecutive integers, Monday
// start), suitable for lag arithmetic.
std::int64_t week_serial(Date d);

Date week_monday(std::int64_t week_serial);
Date week_sunday(std::int64_t week_serial);

// ISO-8601 week-numbering year and week (1..53) for display ids.
struct IsoWeek {
  int year = 1970;
  int week = 1;
};
IsoWeek iso_week(Date d);

// "2017-W05"-style id for a week serial.
std::string week_id(std::int64_t week_serial);
std::int64_t week_serial_from_iso(int year, int week);
std::optional<std::int64_t> parse_week_id(std::string_view s);

// Bi-week bucket: ISO week number / 2, floor, within the ISO year.
std::int64_t biweek_bucket(std::int64_t week_serial);
// Month bucket (year*100 + month) of the week's Monday.
std::int64_t month_bucket(std::int64_t week_serial);

std::string format_date(Date d);
std::string format_timestamp(Timestamp t);

// Strict ISO-8601 parsers; nullopt on any deviation.
std::optional<Date> parse_date(std::string_view s);
// Accepts "YYYY-MM-DDTHH:MM:SSZ" (and "+00:00" suffix).
std::optional<Timestamp> parse_timestamp(std::string_view s);

}  // namespace btcpanel
