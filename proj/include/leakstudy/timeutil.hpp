#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace leakstudy {

using Date = std::chrono::sys_days;
using Instant = std::chrono::sys_seconds;

// ISO-8601 calendar date, "YYYY-MM-DD".
Date parse_date(std::string_view text);
// ISO-8601 instant with a zone designator ("Z" or "+hh:mm").
Instant parse_instant(std::string_view text);

std::string format_date(Date d);
// Always rendered in UTC with a trailing "Z".
std::string format_instant(Instant t);

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline int days_between(Date a, Date b) { return static_cast<int>((b - a).count()); }

// 1 = Jan 1.
int day_of_year(Date d);
int year_of(Date d);

// ISO weekday, Monday = 1 .. Sunday = 7.
unsigned iso_weekday(Date d);

// Three-letter English weekday ("Mon" .. "Sun").
std::string_view weekday_name(unsigned iso_day);

}  // namespace leakstudy
