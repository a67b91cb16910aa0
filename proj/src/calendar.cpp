#include "leakstudy/calendar.hpp"

#include <absl/time/civil_time.h>
#include <fmt/format.h>

#include "leakstudy/error.hpp"

namespace leakstudy {

namespace {

absl::CivilDay to_civil(Date d) {
  const std::chrono::year_month_day ymd{d};
  return absl::CivilDay(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()));
}

constexpr int kMaxScanDays = 3660;

}  // namespace

ExchangeCalendar::ExchangeCalendar(std::string exchange_id, std::string timezone, int open_minute,
                                   int close_minute, std::set<Date> holidays,
                                   std::set<unsigned> weekend_days, std::map<Date, int> early_closes,
                                   std::optional<Date> coverage_start,
                                   std::optional<Date> coverage_end)
    : exchange_id_(std::move(exchange_id)),
      timezone_name_(std::move(timezone)),
      open_minute_(open_minute),
      close_minute_(close_minute),
      holidays_(std::move(holidays)),
      weekend_days_(std::move(weekend_days)),
      early_closes_(std::move(early_closes)),
      coverage_start_(coverage_start),
      coverage_end_(coverage_end) {
  if (!absl::LoadTimeZone(timezone_name_, &zone_)) {
    throw Error(ErrorCode::Validation,
                fmt::format("calendar {}: unknown time zone '{}'", exchange_id_, timezone_name_));
  }
  if (open_minute_ < 0 || close_minute_ > 24 * 60 || open_minute_ >= close_minute_) {
    throw Error(ErrorCode::Validation,
                fmt::format("calendar {}: session open must precede close", exchange_id_));
  }
  for (const auto& [day, close] : early_closes_) {
    if (close <= open_minute_ || close > close_minute_) {
      throw Error(ErrorCode::Validation,
                  fmt::format("calendar {}: early close on {} outside the regular session",
                              exchange_id_, format_date(day)));
    }
  }
  for (unsigned wd : weekend_days_) {
    if (wd < 1 || wd > 7) {
      throw Error(ErrorCode::Validation, fmt::format("calendar {}: bad weekday {}", exchange_id_, wd));
    }
  }
  if (coverage_start_ && coverage_end_ && *coverage_end_ < *coverage_start_) {
    throw Error(ErrorCode::Validation, fmt::format("calendar {}: empty coverage", exchange_id_));
  }
}

int ExchangeCalendar::close_minute(Date d) const {
  const auto it = early_closes_.find(d);
  return it == early_closes_.end() ? close_minute_ : it->second;
}

bool ExchangeCalendar::covers(Date d) const {
  return (!coverage_start_ || d >= *coverage_start_) && (!coverage_end_ || d <= *coverage_end_);
}

void ExchangeCalendar::require_covered(Date d) const {
  if (!covers(d)) {
    throw Error(ErrorCode::CalendarGap,
                fmt::format("calendar {} does not cover {}", exchange_id_, format_date(d)));
  }
}

bool ExchangeCalendar::is_trading_day(Date d) const {
  require_covered(d);
  return !weekend_days_.contains(iso_weekday(d)) && !holidays_.contains(d);
}

Date ExchangeCalendar::next_trading_day(Date d) const {
  for (int i = 1; i <= kMaxScanDays; ++i) {
    const Date c = d + std::chrono::days{i};
    if (is_trading_day(c)) return c;
  }
  throw Error(ErrorCode::CalendarGap,
              fmt::format("calendar {} has no trading day after {}", exchange_id_, format_date(d)));
}

Date ExchangeCalendar::session_on_or_after(Date d) const {
  return is_trading_day(d) ? d : next_trading_day(d);
}

Date ExchangeCalendar::local_date(Instant t) const {
  const absl::CivilDay day =
      absl::ToCivilDay(absl::FromUnixSeconds(t.time_since_epoch().count()), zone_);
  return make_date(static_cast<int>(day.year()), static_cast<unsigned>(day.month()),
                   static_cast<unsigned>(day.day()));
}

Instant ExchangeCalendar::local_instant(Date d, int minute_of_day) const {
  const absl::CivilMinute m = absl::CivilMinute(to_civil(d)) + minute_of_day;
  return Instant{std::chrono::seconds{absl::ToUnixSeconds(absl::FromCivil(m, zone_))}};
}

Instant ExchangeCalendar::session_open(Date d) const { return local_instant(d, open_minute_); }

Instant ExchangeCalendar::session_close(Date d) const { return local_instant(d, close_minute(d)); }

SessionPosition classify_timestamp(Instant ts, const ExchangeCalendar& cal) {
  const Date day = cal.local_date(ts);
  if (!cal.is_trading_day(day)) return {SessionClass::NonTradingDay, 0, day};
  const Instant open = cal.session_open(day);
  const Instant close = cal.session_close(day);
  if (ts < open) return {SessionClass::PreMarket, 0, day};
  if (ts >= close) return {SessionClass::PostMarket, 0, day};
  const auto offset = std::chrono::floor<std::chrono::minutes>(ts - open).count();
  return {SessionClass::InSession, static_cast<int>(offset), day};
}

int business_days_between(Date a, Date b, const ExchangeCalendar& cal) {
  if (b < a) {
    throw Error(ErrorCode::Ordering, fmt::format("business_days_between: {} is after {}",
                                                 format_date(a), format_date(b)));
  }
  int count = 0;
  for (Date d = a + std::chrono::days{1}; d <= b; d += std::chrono::days{1}) {
    if (cal.is_trading_day(d)) ++count;
  }
  return count;
}

}  // namespace leakstudy
