#include "leakstudy/leak_matcher.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace leakstudy {

namespace {

std::string normalized_text(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

const std::string& primary_ticker(const Headline& h) {
  static const std::string kNone;
  return h.tickers.empty() ? kNone : h.tickers.front();
}

// Total order used wherever ties must not depend on input order.
auto headline_key(const Headline& h) {
  return std::tie(h.timestamp, primary_ticker(h), h.feed, h.text, h.article_chars, h.tickers,
                  h.green_label);
}

Date utc_date(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

}  // namespace

std::string_view to_string(LeakTiming t) {
  return t == LeakTiming::EarlyMarket ? "EarlyMarket" : "LateMarket";
}

std::string_view to_string(Liquidity l) {
  switch (l) {
    case Liquidity::Pass: return "true";
    case Liquidity::Fail: return "false";
    case Liquidity::Unknown: break;
  }
  return "unknown";
}

std::vector<AnnouncementEvent> condense_announcements(const std::vector<RawAnnouncement>& raw) {
  std::map<std::pair<std::string, Date>, AnnouncementEvent> grouped;
  for (const auto& a : raw) {
    BondRecord bond;
    bond.currency = a.currency;
    bond.amount = a.amount;
    bond.coupon_pct = a.coupon_pct;
    bond.has_option = a.has_option;
    bond.perpetual = a.perpetual;
    if (a.perpetual) {
      if (!a.yield) {
        throw Error(ErrorCode::Data, fmt::format("perpetual bond of {} on {} has no yield", a.ticker,
                                                 format_date(a.announce_date)));
      }
      bond.term_years = macaulay_perpetual(*a.yield);
    } else {
      if (!a.maturity_date) {
        throw Error(ErrorCode::Data, fmt::format("bond of {} on {} has no maturity", a.ticker,
                                                 format_date(a.announce_date)));
      }
      bond.term_years = days_between(a.announce_date, *a.maturity_date) / 365.25;
    }
    auto& ev = grouped[{a.ticker, a.announce_date}];
    ev.ticker = a.ticker;
    ev.announce_date = a.announce_date;
    ev.bonds.push_back(std::move(bond));
  }
  std::vector<AnnouncementEvent> out;
  out.reserve(grouped.size());
  for (auto& [key, ev] : grouped) out.push_back(std::move(ev));
  return out;
}

IssueAggregates summarize_issue(const AnnouncementEvent& event, const FxTable& fx, Instant at) {
  IssueAggregates agg;
  agg.n_bonds = static_cast<int>(event.bonds.size());
  for (const auto& b : event.bonds) {
    agg.size_usd += rebase_usd(b.amount, b.currency, at, fx);
    agg.avg_coupon += b.coupon_pct;
    agg.avg_term += b.term_years;
    agg.has_option = agg.has_option || b.has_option;
  }
  if (agg.n_bonds > 0) {
    agg.avg_coupon /= agg.n_bonds;
    agg.avg_term /= agg.n_bonds;
  }
  return agg;
}

bool contains_word(std::string_view text, std::string_view word) {
  if (word.empty()) return false;
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  auto eq = [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  };
  for (std::size_t i = 0; i + word.size() <= text.size(); ++i) {
    if (i > 0 && is_word(text[i - 1])) continue;
    const std::size_t end = i + word.size();
    if (end < text.size() && is_word(text[end])) continue;
    if (std::equal(word.begin(), word.end(), text.begin() + static_cast<std::ptrdiff_t>(i), eq)) {
      return true;
    }
  }
  return false;
}

bool matches_search_terms(const Headline& h) {
  return h.green_label && contains_word(h.text, "mandate") && contains_word(h.text, "green");
}

std::vector<Headline> filter_headlines(const std::vector<Headline>& headlines) {
  std::vector<Headline> out;
  for (const auto& h : headlines) {
    if (matches_search_terms(h) && !h.tickers.empty()) out.push_back(h);
  }
  return out;
}

std::vector<Headline> dedup_headlines(const std::vector<Headline>& candidates, int horizon_days,
                                      DedupStats* stats) {
  DedupStats local;
  // Same text on several feeds: keep the richest article.
  std::map<std::pair<std::string, std::string>, const Headline*> best;
  for (const auto& h : candidates) {
    auto key = std::pair{normalized_text(h.text), primary_ticker(h)};
    auto [it, inserted] = best.emplace(std::move(key), &h);
    if (inserted) continue;
    ++local.duplicate_text;
    const Headline* cur = it->second;
    const bool better = h.article_chars > cur->article_chars ||
                        (h.article_chars == cur->article_chars && headline_key(h) < headline_key(*cur));
    if (better) it->second = &h;
  }

  std::vector<const Headline*> unique;
  unique.reserve(best.size());
  for (const auto& [key, h] : best) unique.push_back(h);
  std::sort(unique.begin(), unique.end(),
            [](const Headline* a, const Headline* b) { return headline_key(*a) < headline_key(*b); });

  // Update chains: the earliest headline of a ticker stands for the issue.
  std::map<std::string, Date> chain_head;
  std::vector<Headline> out;
  for (const Headline* h : unique) {
    const std::string& ticker = primary_ticker(*h);
    if (!ticker.empty()) {
      const Date day = utc_date(h->timestamp);
      auto it = chain_head.find(ticker);
      if (it != chain_head.end() && days_between(it->second, day) <= horizon_days) {
        ++local.update_chain;
        continue;
      }
      chain_head[ticker] = day;
    }
    out.push_back(*h);
  }
  if (stats) *stats = local;
  return out;
}

LeakTiming classify_leak_timing(const SessionPosition& pos) {
  switch (pos.kind) {
    case SessionClass::PreMarket:
    case SessionClass::PostMarket:
    case SessionClass::NonTradingDay:
      return LeakTiming::EarlyMarket;
    case SessionClass::InSession:
      return pos.offset_minutes < 60 ? LeakTiming::EarlyMarket : LeakTiming::LateMarket;
  }
  return LeakTiming::LateMarket;
}

Date reaction_session(Instant ts, const ExchangeCalendar& cal) {
  const SessionPosition pos = classify_timestamp(ts, cal);
  switch (pos.kind) {
    case SessionClass::PreMarket:
    case SessionClass::InSession:
      return pos.local_date;
    case SessionClass::PostMarket:
    case SessionClass::NonTradingDay:
      break;
  }
  return cal.next_trading_day(pos.local_date);
}

std::vector<LeakEvent> match_leaks(const std::vector<Headline>& candidates,
                                   const std::vector<AnnouncementEvent>& events,
                                   const MatchContext& ctx, int horizon_days) {
  if (!ctx.securities || !ctx.calendars) {
    throw Error(ErrorCode::Config, "match_leaks needs securities and calendars");
  }
  static const FxTable kNoFx;
  const FxTable& fx = ctx.fx ? *ctx.fx : kNoFx;

  std::map<std::string, std::vector<const AnnouncementEvent*>> by_ticker;
  for (const auto& e : events) by_ticker[e.ticker].push_back(&e);
  for (auto& [t, list] : by_ticker) {
    std::sort(list.begin(), list.end(), [](const auto* a, const auto* b) {
      return a->announce_date < b->announce_date;
    });
  }

  std::vector<LeakEvent> leaks;
  for (const auto& h : candidates) {
    if (h.tickers.empty()) continue;
    const std::string& ticker = h.tickers.front();
    const auto evs = by_ticker.find(ticker);
    if (evs == by_ticker.end()) continue;

    const auto sec = ctx.securities->find(ticker);
    if (sec == ctx.securities->end()) {
      throw Error(ErrorCode::CalendarGap, fmt::format("ticker {} has no listing record", ticker));
    }
    const auto cal_it = ctx.calendars->find(sec->second.exchange_id);
    if (cal_it == ctx.calendars->end()) {
      throw Error(ErrorCode::CalendarGap, fmt::format("no calendar for exchange {} (ticker {})",
                                                      sec->second.exchange_id, ticker));
    }
    const ExchangeCalendar& cal = cal_it->second;
    const Date leak_date = cal.local_date(h.timestamp);

    for (const AnnouncementEvent* ev : evs->second) {
      if (ev->announce_date <= leak_date) continue;
      if (days_between(leak_date, ev->announce_date) > horizon_days) break;
      if (business_days_between(leak_date, ev->announce_date, cal) < 1) continue;

      LeakEvent leak;
      leak.headline = h;
      leak.announcement = *ev;
      leak.ticker = ticker;
      leak.leak_ts = h.timestamp;
      leak.position = classify_timestamp(h.timestamp, cal);
      leak.session_date = reaction_session(h.timestamp, cal);
      leak.timing = classify_leak_timing(leak.position);
      leak.issue = summarize_issue(*ev, fx, h.timestamp);
      leaks.push_back(std::move(leak));
      break;
    }
  }

  auto order = [](const LeakEvent& a, const LeakEvent& b) {
    return std::tie(a.leak_ts, a.ticker) < std::tie(b.leak_ts, b.ticker) ||
           (std::tie(a.leak_ts, a.ticker) == std::tie(b.leak_ts, b.ticker) &&
            headline_key(a.headline) < headline_key(b.headline));
  };
  std::sort(leaks.begin(), leaks.end(), order);

  // One retained headline per announcement event: the earliest.
  std::vector<LeakEvent> out;
  std::set<std::pair<std::string, Date>> claimed;
  for (auto& leak : leaks) {
    if (claimed.emplace(leak.ticker, leak.announcement.announce_date).second) {
      out.push_back(std::move(leak));
    }
  }
  return out;
}

Instant intraday_start(const LeakEvent& leak, const ExchangeCalendar& cal) {
  if (leak.position.kind != SessionClass::InSession) return cal.session_open(leak.session_date);
  const Instant open = cal.session_open(leak.session_date);
  const auto elapsed = (leak.leak_ts - open).count();
  const auto snapped = open + std::chrono::seconds{((elapsed + 299) / 300) * 300};
  return std::min(snapped, cal.session_close(leak.session_date));
}

LiquidityCheck check_liquidity(const LeakEvent& leak, const std::vector<IntradayBar>* bars,
                               const ExchangeCalendar& cal) {
  LiquidityCheck out;
  if (!bars || bars->empty()) return out;

  const Instant session_open = cal.session_open(leak.session_date);
  const Instant session_close = cal.session_close(leak.session_date);
  auto in_range = [&](Instant lo, Instant hi) {
    const auto b = std::lower_bound(bars->begin(), bars->end(), lo,
                                    [](const IntradayBar& bar, Instant t) { return bar.timestamp < t; });
    const auto e = std::lower_bound(b, bars->end(), hi,
                                    [](const IntradayBar& bar, Instant t) { return bar.timestamp < t; });
    return std::pair{b, e};
  };

  const auto [sb, se] = in_range(session_open, session_close);
  if (sb == se) return out;  // no coverage of the reaction session

  const Instant start = intraday_start(leak, cal);
  const auto [hb, he] = in_range(start, start + std::chrono::minutes{60});
  for (auto it = hb; it != he; ++it) {
    if (it->volume > 0.0) ++out.active_bars_first_hour;
  }
  const auto [db, de] = in_range(leak.leak_ts, leak.leak_ts + std::chrono::hours{24});
  for (auto it = db; it != de; ++it) out.volume_24h += it->volume;

  const bool active = out.active_bars_first_hour >= kMinActiveBars;
  const bool traded = out.volume_24h > kMinLeakVolume;
  out.status = active && traded ? Liquidity::Pass : Liquidity::Fail;
  return out;
}

void apply_liquidity(std::vector<LeakEvent>& leaks, const IntradaySeries& intraday,
                     const MatchContext& ctx) {
  for (auto& leak : leaks) {
    const auto& sec = ctx.securities->at(leak.ticker);
    const auto& cal = ctx.calendars->at(sec.exchange_id);
    const auto it = intraday.find(leak.ticker);
    leak.liquidity = check_liquidity(leak, it == intraday.end() ? nullptr : &it->second, cal).status;
  }
}

}  // namespace leakstudy
