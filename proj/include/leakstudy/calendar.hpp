#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include <absl/time/time.h>

#include "leakstudy/timeutil.hpp"

namespace leakstudy {

enum class SessionClass { PreMarket, InSession, PostMarket, NonTradingDay };

struct SessionPosition {
  SessionClass kind;
  // Whole minutes since the session open; only meaningful for InSession.
  int offset_minutes = 0;
  // Exchange-local calendar date of the timestamp.
  Date local_date;

  bool operator==(const SessionPosition&) const = default;
};

// Trading sessions of one exchange. Session bounds are local wall-clock
// minutes after midnight; early closes shorten individual sessions.
class ExchangeCalendar {
public:
  ExchangeCalendar(std::string exchange_id, std::string timezone, int open_minute, int close_minute,
                   std::set<Date> holidays = {}, std::set<unsigned> weekend_days = {6, 7},
                   std::map<Date, int> early_closes = {}, std::optional<Date> coverage_start = {},
                   std::optional<Date> coverage_end = {});

  const std::string& exchange_id() const { return exchange_id_; }
  const std::string& timezone_name() const { return timezone_name_; }
  int open_minute() const { return open_minute_; }
  int close_minute(Date d) const;
  int session_minutes(Date d) const { return close_minute(d) - open_minute_; }

  bool covers(Date d) const;
  bool is_trading_day(Date d) const;
  // Smallest trading day strictly after d.
  Date next_trading_day(Date d) const;
  // d itself when it trades, else the next trading day.
  Date session_on_or_after(Date d) const;

  Date local_date(Instant t) const;
  Instant session_open(Date d) const;
  Instant session_close(Date d) const;
  Instant local_instant(Date d, int minute_of_day) const;

  const std::set<Date>& holidays() const { return holidays_; }
  const std::set<unsigned>& weekend_days() const { return weekend_days_; }
  const std::map<Date, int>& early_closes() const { return early_closes_; }

private:
  void require_covered(Date d) const;

  std::string exchange_id_;
  std::string timezone_name_;
  absl::TimeZone zone_;
  int open_minute_;
  int close_minute_;
  std::set<Date> holidays_;
  std::set<unsigned> weekend_days_;
  std::map<Date, int> early_closes_;
  std::optional<Date> coverage_start_;
  std::optional<Date> coverage_end_;
};

SessionPosition classify_timestamp(Instant ts, const ExchangeCalendar& cal);

// Trading days d with a < d <= b.
int business_days_between(Date a, Date b, const ExchangeCalendar& cal);

}  // namespace leakstudy
