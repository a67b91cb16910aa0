#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakstudy/calendar.hpp"
#include "leakstudy/domain.hpp"
#include "leakstudy/ingest.hpp"

namespace leakstudy {

inline constexpr int kDefaultHorizonDays = 60;

struct BondRecord {
  std::string currency;
  double amount = 0.0;  // millions, listing currency
  double term_years = 0.0;
  double coupon_pct = 0.0;
  bool has_option = false;
  bool perpetual = false;
};

// Every bond one issuer announced on one date.
struct AnnouncementEvent {
  std::string ticker;
  Date announce_date;
  std::vector<BondRecord> bonds;
};

struct IssueAggregates {
  int n_bonds = 0;
  double size_usd = 0.0;  // millions
  double avg_coupon = 0.0;
  double avg_term = 0.0;
  bool has_option = false;
};

std::vector<AnnouncementEvent> condense_announcements(const std::vector<RawAnnouncement>& raw);

// Count, cumulative USD size, average coupon and term, any-option flag.
// Non-USD amounts are converted at `at`.
IssueAggregates summarize_issue(const AnnouncementEvent& event, const FxTable& fx, Instant at);

// Case-insensitive whole-word test.
bool contains_word(std::string_view text, std::string_view word);

// "Mandate" and "Green" present and the article carries the green-bond label.
bool matches_search_terms(const Headline& h);

// Search-term filter plus at least one attached ticker.
std::vector<Headline> filter_headlines(const std::vector<Headline>& headlines);

struct DedupStats {
  std::size_t duplicate_text = 0;
  std::size_t update_chain = 0;
};

// Same-text duplicates keep the longer article (ties: earlier, then feed
// name). Later headlines for the same primary ticker within horizon_days of a
// retained headline are updates of that issue and are dropped.
std::vector<Headline> dedup_headlines(const std::vector<Headline>& candidates,
                                      int horizon_days = kDefaultHorizonDays,
                                      DedupStats* stats = nullptr);

enum class LeakTiming { EarlyMarket, LateMarket };
enum class Liquidity { Unknown, Pass, Fail };

std::string_view to_string(LeakTiming t);
std::string_view to_string(Liquidity l);

struct LeakEvent {
  Headline headline;
  AnnouncementEvent announcement;
  std::string ticker;
  Instant leak_ts;
  SessionPosition position;
  // First session whose prices can react: the leak day when it lands before
  // the close, otherwise the next trading day.
  Date session_date;
  LeakTiming timing = LeakTiming::LateMarket;
  Liquidity liquidity = Liquidity::Unknown;
  IssueAggregates issue;

  bool passes_liquidity() const { return liquidity == Liquidity::Pass; }
};

struct MatchContext {
  const std::map<std::string, SecurityRecord>* securities = nullptr;
  const std::map<std::string, ExchangeCalendar>* calendars = nullptr;
  const FxTable* fx = nullptr;
};

LeakTiming classify_leak_timing(const SessionPosition& pos);

// Date of the session a leak at `ts` first trades into.
Date reaction_session(Instant ts, const ExchangeCalendar& cal);

// Matches each headline's primary ticker to the earliest announcement event
// at least one business day later and at most horizon_days calendar days
// after the leak's local date. Output is sorted by (leak_ts, ticker).
std::vector<LeakEvent> match_leaks(const std::vector<Headline>& candidates,
                                   const std::vector<AnnouncementEvent>& events,
                                   const MatchContext& ctx, int horizon_days = kDefaultHorizonDays);

inline constexpr double kMinLeakVolume = 10'000.0;
inline constexpr int kMinActiveBars = 2;

struct LiquidityCheck {
  Liquidity status = Liquidity::Unknown;
  int active_bars_first_hour = 0;
  double volume_24h = 0.0;
};

// Two or more non-zero-volume bars in the hour after the leak (the first
// trading hour for leaks outside the session) and strictly more than 10,000
// units traded in the 24 hours after the leak.
LiquidityCheck check_liquidity(const LeakEvent& leak, const std::vector<IntradayBar>* bars,
                               const ExchangeCalendar& cal);

void apply_liquidity(std::vector<LeakEvent>& leaks, const IntradaySeries& intraday,
                     const MatchContext& ctx);

// First five-minute grid point at or after the leak that the intraday
// analysis starts from.
Instant intraday_start(const LeakEvent& leak, const ExchangeCalendar& cal);

}  // namespace leakstudy
