#include "btcpanel/dates.hpp"

#include <array>
#include <cstdio>
#include <charconv>

namespace btcpanel {

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

Date make_date(int y, unsigned m, unsigned d) { return Date{days_from_civil(y, m, d)}; }

CivilDate to_civil(Date d) { return civil_from_days(d.days); }

int weekday(Date d) {
  // 1970-01-01 was a Thursday.
  std::int64_t w = (d.days + 3) % 7;
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

std::int64_t week_serial(Date d) {
  // Monday-start weeks; 1970-01-05 (Monday) is the start of week 1.
  std::int64_t shifted = d.days - 4;
  std::int64_t w = shifted / 7;
  if (shifted < 0 && shifted % 7 != 0) --w;
  return w;
}

Date week_monday(std::int64_t ws) { return Date{ws * 7 + 4}; }
Date week_sunday(std::int64_t ws) { return Date{ws * 7 + 10}; }

IsoWeek iso_week(Date d) {
  // ISO week-numbering year is the year of the week's Thursday.
  Date thursday{week_monday(week_serial(d)).days + 3};
  CivilDate cd = to_civil(thursday);
  std::int64_t jan1 = days_from_civil(cd.year, 1, 1);
  int week = static_cast<int>((thursday.days - jan1) / 7) + 1;
  return IsoWeek{cd.year, week};
}

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

std::string week_id(std::int64_t ws) {
  IsoWeek iw = iso_week(week_monday(ws));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-W%02d", iw.year, iw.week);
  return buf;
}

std::int64_t week_serial_from_iso(int year, int week) {
  // ISO week 1 is the week containing January 4.
  return week_serial(make_date(year, 1, 4)) + (week - 1);
}

std::optional<std::int64_t> parse_week_id(std::string_view s) {
  if (s.size() != 8 || s[4] != '-' || s[5] != 'W') return std::nullopt;
  unsigned y, w;
  if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(6, 2), w))
    return std::nullopt;
  if (w < 1 || w > 53) return std::nullopt;
  return week_serial_from_iso(static_cast<int>(y), static_cast<int>(w));
}

std::int64_t biweek_bucket(std::int64_t ws) {
  IsoWeek iw = iso_week(week_monday(ws));
  return static_cast<std::int64_t>(iw.year) * 100 + iw.week / 2;
}

std::int64_t month_bucket(std::int64_t ws) {
  CivilDate cd = to_civil(week_monday(ws));
  return static_cast<std::int64_t>(cd.year) * 100 + cd.month;
}

std::string format_date(Date d) {
  CivilDate cd = to_civil(d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", cd.year, cd.month, cd.day);
  return buf;
}

std::string format_timestamp(Timestamp t) {
  Date d = t.date();
  std::int64_t rem = t.seconds - d.days * 86400;
  char buf[32];
  CivilDate cd = to_civil(d);
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", cd.year, cd.month,
                cd.day, static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  unsigned y, m, d;
  if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(5, 2), m) ||
      !parse_uint(s.substr(8, 2), d))
    return std::nullopt;
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  Date date = make_date(static_cast<int>(y), m, d);
  CivilDate back = to_civil(date);
  if (back.month != m || back.day != d) return std::nullopt;  // e.g. Feb 30
  return date;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (s.size() < 20 || s[10] != 'T') return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  std::string_view time = s.substr(11);
  std::string_view zone;
  if (time.size() == 9 && time.back() == 'Z') {
    zone = time.substr(8);
    time = time.substr(0, 8);
  } else if (time.size() == 14 && time.substr(8) == "+00:00") {
    time = time.substr(0, 8);
  } else {
    return std::nullopt;
  }
  (void)zone;
  if (time[2] != ':' || time[5] != ':') return std::nullopt;
  unsigned hh, mm, ss;
  if (!parse_uint(time.substr(0, 2), hh) || !parse_uint(time.substr(3, 2), mm) ||
      !parse_uint(time.substr(6, 2), ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  return Timestamp{date->days * 86400 + hh * 3600 + mm * 60 + ss};
}

}  // namespace btcpanel
