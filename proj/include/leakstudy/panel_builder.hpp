#pragma once

#include <map>
#include <string>
#include <vector>

#include "leakstudy/event_study.hpp"
#include "leakstudy/factor_model.hpp"
#include "leakstudy/ingest.hpp"

namespace leakstudy {

// Borrowed views of everything the panel builders read.
struct MarketData {
  const std::map<std::string, SecurityRecord>* securities = nullptr;
  const std::map<std::string, ExchangeCalendar>* calendars = nullptr;
  const DailySeries* daily = nullptr;
  const IntradaySeries* intraday = nullptr;
  const IndexDailySeries* index_daily = nullptr;
  const IndexIntradaySeries* index_intraday = nullptr;
  // Keyed by region.
  const std::map<std::string, FactorTable>* factors = nullptr;

  const SecurityRecord& security(const std::string& ticker) const;
  const ExchangeCalendar& calendar_for(const std::string& ticker) const;
  // nullptr when the security's region has no factor table.
  const FactorTable* factors_for(const std::string& ticker) const;
};

struct EventInput {
  PanelEvent event;
  // Relative day 0: the first session that can react.
  Date day0;
  // Intraday minute 0 on the exchange's five-minute grid.
  Instant intraday_start;
};

EventInput leak_input(const LeakEvent& leak, const ExchangeCalendar& cal);
EventInput announcement_input(const LeakEvent& leak, const ExchangeCalendar& cal);

struct PanelBuild {
  EventPanel panel;
  // Dropped events per error code name.
  std::map<std::string, std::size_t> dropped;
};

// Close-to-close returns on consecutive bars of the security, with the market
// index over the same two dates and rf from the factor table (0 without one).
std::vector<ReturnObservation> daily_returns(const std::vector<DailyBar>& bars,
                                             const std::vector<IndexBar>& index,
                                             const FactorTable* factors);

std::vector<int> offsets_of(RelativeWindow grid);

// Daily abnormal returns over `grid`, one model fit per event.
PanelBuild daily_ar_panel(const std::vector<EventInput>& events, const MarketData& data,
                          const ModelSpec& spec, RelativeWindow grid, int workers = 1);

// Market-adjusted cumulative abnormal return from minute 0 to each five-minute
// offset up to 480, bar price to bar price, stopping at the session close.
PanelBuild intraday_car_panel(const std::vector<EventInput>& events, const MarketData& data,
                              int workers = 1);

// Abnormal log turnover per day over `grid` against the T days before day 0.
PanelBuild daily_volume_panel(const std::vector<EventInput>& events, const MarketData& data,
                              RelativeWindow grid, int T = kDailyBaseline, int workers = 1);

// Abnormal ln(1 + volume) per five-minute bar after minute 0 against the T
// bars before it; the cell at offset m is the bar ending m minutes in.
PanelBuild intraday_volume_panel(const std::vector<EventInput>& events, const MarketData& data,
                                 int T = kIntradayBaseline, int workers = 1);

}  // namespace leakstudy
