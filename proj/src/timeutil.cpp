#include "leakstudy/timeutil.hpp"

#include <array>

#include <absl/time/civil_time.h>
#include <absl/time/time.h>
#include <fmt/format.h>

#include "leakstudy/error.hpp"

namespace leakstudy {

Date parse_date(std::string_view text) {
  absl::CivilDay day;
  if (text.size() != 10 || !absl::ParseCivilTime(std::string(text), &day)) {
    throw Error(ErrorCode::Domain, fmt::format("invalid date '{}'", text));
  }
  return make_date(static_cast<int>(day.year()), static_cast<unsigned>(day.month()),
                   static_cast<unsigned>(day.day()));
}

Instant parse_instant(std::string_view text) {
  absl::Time t;
  std::string err;
  if (!absl::ParseTime("%Y-%m-%dT%H:%M:%E*S%Ez", std::string(text), &t, &err) &&
      !absl::ParseTime("%Y-%m-%dT%H:%M:%E*SZ", std::string(text), absl::UTCTimeZone(), &t, &err)) {
    throw Error(ErrorCode::Domain, fmt::format("invalid instant '{}': {}", text, err));
  }
  return Instant{std::chrono::seconds{absl::ToUnixSeconds(t)}};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string format_instant(Instant t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const auto secs = (t - day).count();
  return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", format_date(day), secs / 3600, (secs / 60) % 60,
                     secs % 60);
}

int day_of_year(Date d) {
  const std::chrono::year_month_day ymd{d};
  const Date jan1{ymd.year() / std::chrono::January / 1};
  return days_between(jan1, d) + 1;
}

int year_of(Date d) { return static_cast<int>(std::chrono::year_month_day{d}.year()); }

unsigned iso_weekday(Date d) { return std::chrono::weekday{d}.iso_encoding(); }

std::string_view weekday_name(unsigned iso_day) {
  static constexpr std::array<std::string_view, 8> names{"?",   "Mon", "Tue", "Wed",
                                                         "Thu", "Fri", "Sat", "Sun"};
  return iso_day < names.size() ? names[iso_day] : names[0];
}

}  // namespace leakstudy
