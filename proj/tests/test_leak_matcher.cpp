#include <doctest.h>

#include <algorithm>
#include <random>

#include "leakstudy/error.hpp"
#include "leakstudy/leak_matcher.hpp"
#include "support.hpp"

using namespace leakstudy;
using testsupport::announcement;
using testsupport::headline;
using testsupport::ny;
using testsupport::nyse;

namespace {

struct World {
  std::map<std::string, SecurityRecord> securities{{"AAA", testsupport::security("AAA")},
                                                   {"BBB", testsupport::security("BBB")}};
  std::map<std::string, ExchangeCalendar> calendars = testsupport::calendars();
  FxTable fx;
  MatchContext ctx() const { return {&securities, &calendars, &fx}; }
};

std::vector<LeakEvent> match_one(const Headline& h, Date announce, int horizon = kDefaultHorizonDays) {
  static const World w;
  return match_leaks({h}, {announcement(h.tickers.front(), announce)}, w.ctx(), horizon);
}

}  // namespace

TEST_CASE("search terms") {
  CHECK(matches_search_terms(headline("AAA", ny(2021, 3, 1, 10, 0), "AAA MANDATE: Green bond")));
  CHECK_FALSE(matches_search_terms(headline("AAA", ny(2021, 3, 1, 10, 0), "AAA mandates greenish bond")));
  auto h = headline("AAA", ny(2021, 3, 1, 10, 0));
  h.green_label = false;
  CHECK_FALSE(matches_search_terms(h));
  h.green_label = true;
  h.tickers.clear();
  CHECK(filter_headlines({h}).empty());
}

TEST_CASE("business-day gap between leak and announcement") {
  SUBCASE("same day is rejected") {
    CHECK(match_one(headline("AAA", ny(2021, 3, 1, 8, 0)), make_date(2021, 3, 1)).empty());
  }
  SUBCASE("next business day is accepted") {
    CHECK(match_one(headline("AAA", ny(2021, 3, 1, 9, 0)), make_date(2021, 3, 2)).size() == 1);
  }
  SUBCASE("Friday to Monday is accepted") {
    CHECK(match_one(headline("AAA", ny(2021, 3, 5, 15, 0)), make_date(2021, 3, 8)).size() == 1);
  }
  SUBCASE("weekend leak counts the Monday") {
    CHECK(match_one(headline("AAA", ny(2021, 3, 6, 11, 0)), make_date(2021, 3, 8)).size() == 1);
    CHECK(match_one(headline("AAA", ny(2021, 3, 6, 11, 0)), make_date(2021, 3, 7)).empty());
  }
  SUBCASE("horizon") {
    const auto h = headline("AAA", ny(2021, 3, 1, 11, 0));
    CHECK(match_one(h, make_date(2021, 3, 1) + std::chrono::days{60}).size() == 1);
    CHECK(match_one(h, make_date(2021, 3, 1) + std::chrono::days{61}).empty());
    CHECK(match_one(h, make_date(2021, 3, 1) + std::chrono::days{61}, 90).size() == 1);
  }
}

TEST_CASE("leak timing") {
  const auto cal = nyse();
  auto timing = [&](Instant t) { return classify_leak_timing(classify_timestamp(t, cal)); };
  CHECK(timing(ny(2021, 3, 2, 10, 29)) == LeakTiming::EarlyMarket);
  CHECK(timing(ny(2021, 3, 2, 10, 30)) == LeakTiming::LateMarket);
  CHECK(timing(ny(2021, 3, 2, 10, 31)) == LeakTiming::LateMarket);
  CHECK(timing(ny(2021, 3, 2, 7, 0)) == LeakTiming::EarlyMarket);

  const auto leaks = match_one(headline("AAA", ny(2021, 3, 1, 18, 0)), make_date(2021, 3, 5));
  REQUIRE(leaks.size() == 1);
  CHECK(leaks[0].timing == LeakTiming::EarlyMarket);
  CHECK(leaks[0].session_date == make_date(2021, 3, 2));
  CHECK(reaction_session(ny(2021, 7, 2, 17, 0), cal) == make_date(2021, 7, 6));
}

TEST_CASE("dedup keeps the largest article for identical text") {
  const Instant t = ny(2021, 3, 1, 11, 0);
  auto small = headline("AAA", t, "AAA mandate: green bond", 300, "wire-a");
  auto big = headline("AAA", t + std::chrono::minutes{2}, "aaa  MANDATE: green bond", 900, "wire-b");
  DedupStats stats;
  const auto out = dedup_headlines({small, big}, kDefaultHorizonDays, &stats);
  REQUIRE(out.size() == 1);
  CHECK(out[0].article_chars == 900);
  CHECK(stats.duplicate_text == 1);
}

TEST_CASE("dedup keeps the earliest headline of an update chain") {
  const auto first = headline("AAA", ny(2021, 3, 1, 11, 0), "AAA mandate: green bond", 400);
  const auto update = headline("AAA", ny(2021, 3, 9, 11, 0), "AAA green mandate update: books open", 800);
  const auto later = headline("AAA", ny(2021, 6, 1, 11, 0), "AAA second green mandate", 100);
  DedupStats stats;
  const auto out = dedup_headlines({update, later, first}, kDefaultHorizonDays, &stats);
  REQUIRE(out.size() == 2);
  CHECK(out[0].timestamp == first.timestamp);
  CHECK(out[1].timestamp == later.timestamp);
  CHECK(stats.update_chain == 1);
}

TEST_CASE("dedup is idempotent and order independent") {
  std::mt19937 gen(11);
  std::vector<Headline> hs;
  const std::vector<std::string> tickers{"AAA", "BBB"};
  for (int i = 0; i < 60; ++i) {
    const auto& tk = tickers[gen() % 2];
    const Instant t = ny(2021, 1, 4, 10, 0) + std::chrono::hours{static_cast<int>(gen() % (24 * 300))};
    hs.push_back(headline(tk, t, tk + " mandate green " + std::to_string(gen() % 5),
                          static_cast<long long>(gen() % 1000), "f" + std::to_string(gen() % 3)));
  }
  const auto once = dedup_headlines(hs);
  CHECK(dedup_headlines(once).size() == once.size());
  for (int k = 0; k < 5; ++k) {
    auto shuffled = hs;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto again = dedup_headlines(shuffled);
    REQUIRE(again.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(again[i].timestamp == once[i].timestamp);
      CHECK(again[i].text == once[i].text);
      CHECK(again[i].feed == once[i].feed);
    }
  }
}

TEST_CASE("matching properties over random fixtures") {
  World w;
  const auto cal = nyse();
  std::mt19937 gen(5);
  std::vector<Headline> hs;
  std::vector<AnnouncementEvent> evs;
  for (int i = 0; i < 80; ++i) {
    const std::string tk = i % 2 ? "AAA" : "BBB";
    hs.push_back(headline(tk, ny(2021, 1, 4, 4, 0) + std::chrono::minutes{static_cast<int>(gen() % (60 * 24 * 300))}));
  }
  for (int i = 0; i < 20; ++i) {
    evs.push_back(announcement(i % 2 ? "AAA" : "BBB", make_date(2021, 1, 4) + std::chrono::days{static_cast<int>(gen() % 320)}));
  }
  const auto leaks = match_leaks(hs, evs, w.ctx());
  REQUIRE_FALSE(leaks.empty());
  std::set<std::pair<std::string, Date>> seen;
  for (const auto& l : leaks) {
    const Date ld = cal.local_date(l.leak_ts);
    CHECK(business_days_between(ld, l.announcement.announce_date, cal) >= 1);
    CHECK(days_between(ld, l.announcement.announce_date) <= kDefaultHorizonDays);
    CHECK(seen.emplace(l.ticker, l.announcement.announce_date).second);
  }
  auto hs2 = hs;
  auto evs2 = evs;
  std::reverse(hs2.begin(), hs2.end());
  std::reverse(evs2.begin(), evs2.end());
  const auto again = match_leaks(hs2, evs2, w.ctx());
  REQUIRE(again.size() == leaks.size());
  for (std::size_t i = 0; i < leaks.size(); ++i) {
    CHECK(again[i].leak_ts == leaks[i].leak_ts);
    CHECK(again[i].announcement.announce_date == leaks[i].announcement.announce_date);
  }
}

TEST_CASE("unknown exchange raises a calendar gap") {
  World w;
  w.securities["AAA"].exchange_id = "XLON";
  try {
    match_leaks({headline("AAA", ny(2021, 3, 1, 11, 0))}, {announcement("AAA", make_date(2021, 3, 3))}, w.ctx());
    FAIL("expected a calendar gap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CalendarGap);
  }
}

TEST_CASE("liquidity screen") {
  const auto cal = nyse();
  const auto leaks = match_one(headline("AAA", ny(2021, 3, 2, 11, 0)), make_date(2021, 3, 5));
  REQUIRE(leaks.size() == 1);
  const auto& leak = leaks[0];
  auto bars_with = [&](double total, int active) {
    auto bars = testsupport::session_bars(cal, make_date(2021, 3, 2), 0.0);
    const auto start = std::find_if(bars.begin(), bars.end(), [&](const IntradayBar& b) { return b.timestamp >= leak.leak_ts; });
    for (int i = 0; i < active; ++i) (start + i)->volume = total / active;
    return bars;
  };
  SUBCASE("24h volume of exactly 10,000 is excluded") {
    const auto bars = bars_with(10'000.0, 3);
    CHECK(check_liquidity(leak, &bars, cal).status == Liquidity::Fail);
  }
  SUBCASE("10,001 with three active bars is included") {
    const auto bars = bars_with(10'001.0, 3);
    const auto c = check_liquidity(leak, &bars, cal);
    CHECK(c.active_bars_first_hour == 3);
    CHECK(c.volume_24h == 10'001.0);
    CHECK(c.status == Liquidity::Pass);
  }
  SUBCASE("a single trade in the hour is excluded") {
    const auto bars = bars_with(50'000.0, 1);
    CHECK(check_liquidity(leak, &bars, cal).status == Liquidity::Fail);
  }
  SUBCASE("missing coverage is unknown") {
    CHECK(check_liquidity(leak, nullptr, cal).status == Liquidity::Unknown);
    std::vector<IntradayBar> none;
    CHECK(check_liquidity(leak, &none, cal).status == Liquidity::Unknown);
  }
}

TEST_CASE("pre-market leak uses the first trading hour") {
  const auto cal = nyse();
  const auto leaks = match_one(headline("AAA", ny(2021, 3, 2, 7, 0)), make_date(2021, 3, 5));
  REQUIRE(leaks.size() == 1);
  CHECK(intraday_start(leaks[0], cal) == cal.session_open(make_date(2021, 3, 2)));
  auto bars = testsupport::session_bars(cal, make_date(2021, 3, 2), 0.0);
  bars[0].volume = 6000;
  bars[11].volume = 6000;
  bars[12].volume = 1e6;  // first bar after the first hour
  CHECK(check_liquidity(leaks[0], &bars, cal).active_bars_first_hour == 2);
}

TEST_CASE("announcement condensation and perpetual term") {
  RawAnnouncement a;
  a.ticker = "AAA";
  a.announce_date = make_date(2021, 3, 1);
  a.amount = 300;
  a.maturity_date = make_date(2031, 3, 1);
  a.coupon_pct = 2.0;
  RawAnnouncement p = a;
  p.maturity_date.reset();
  p.perpetual = true;
  p.yield = 0.05;
  p.coupon_pct = 4.0;
  const auto evs = condense_announcements({a, p});
  REQUIRE(evs.size() == 1);
  REQUIRE(evs[0].bonds.size() == 2);
  CHECK(evs[0].bonds[1].term_years == 21.0);
  const auto agg = summarize_issue(evs[0], FxTable{}, ny(2021, 2, 1, 10, 0));
  CHECK(agg.n_bonds == 2);
  CHECK(agg.size_usd == 600.0);
  CHECK(agg.avg_coupon == 3.0);
  p.yield.reset();
  CHECK_THROWS_AS(condense_announcements({p}), Error);
}
