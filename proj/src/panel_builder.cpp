#include "leakstudy/panel_builder.hpp"

#include <algorithm>
#include <optional>

#include <fmt/format.h>

#include "leakstudy/error.hpp"
#include "leakstudy/parallel.hpp"

namespace leakstudy {

using namespace std::chrono_literals;

const SecurityRecord& MarketData::security(const std::string& ticker) const {
  auto it = securities->find(ticker);
  if (it == securities->end()) throw Error(ErrorCode::Data, fmt::format("unknown ticker '{}'", ticker));
  return it->second;
}

const ExchangeCalendar& MarketData::calendar_for(const std::string& ticker) const {
  const auto& sec = security(ticker);
  auto it = calendars->find(sec.exchange_id);
  if (it == calendars->end()) {
    throw Error(ErrorCode::CalendarGap, fmt::format("no calendar for exchange '{}'", sec.exchange_id));
  }
  return it->second;
}

const FactorTable* MarketData::factors_for(const std::string& ticker) const {
  if (factors == nullptr) return nullptr;
  auto it = factors->find(security(ticker).region);
  return it == factors->end() ? nullptr : &it->second;
}

EventInput leak_input(const LeakEvent& leak, const ExchangeCalendar& cal) {
  EventInput in;
  in.event = PanelEvent{leak.ticker, leak.leak_ts, AnchorRole::Leak, leak.timing,
                        SectorClass::NonFinancial};
  in.day0 = leak.session_date;
  in.intraday_start = intraday_start(leak, cal);
  return in;
}

EventInput announcement_input(const LeakEvent& leak, const ExchangeCalendar& cal) {
  EventInput in;
  in.day0 = cal.session_on_or_after(leak.announcement.announce_date);
  in.intraday_start = cal.session_open(in.day0);
  in.event = PanelEvent{leak.ticker, in.intraday_start, AnchorRole::Announcement, leak.timing,
                        SectorClass::NonFinancial};
  return in;
}

std::vector<ReturnObservation> daily_returns(const std::vector<DailyBar>& bars,
                                             const std::vector<IndexBar>& index,
                                             const FactorTable* factors) {
  auto index_close = [&](Date d) -> std::optional<double> {
    auto it = std::lower_bound(index.begin(), index.end(), d,
                               [](const IndexBar& b, Date x) { return b.date < x; });
    if (it == index.end() || it->date != d) return std::nullopt;
    return it->close;
  };
  std::vector<ReturnObservation> out;
  out.reserve(bars.size());
  for (std::size_t i = 1; i < bars.size(); ++i) {
    const auto m0 = index_close(bars[i - 1].date);
    const auto m1 = index_close(bars[i].date);
    if (!m0 || !m1) continue;
    ReturnObservation obs;
    obs.date = bars[i].date;
    obs.r_i = simple_return(bars[i - 1].close, bars[i].close);
    obs.r_m = simple_return(*m0, *m1);
    if (factors != nullptr) {
      if (const FactorRow* f = factors->find(obs.date)) obs.rf = f->rf;
    }
    out.push_back(obs);
  }
  return out;
}

std::vector<int> offsets_of(RelativeWindow grid) {
  std::vector<int> out;
  for (int t = grid.first; t <= grid.last; ++t) out.push_back(t);
  return out;
}

namespace {

using Cells = std::vector<std::optional<double>>;

// Either a row of cells or the reason the event was dropped.
struct Outcome {
  std::optional<Cells> cells;
  std::string reason;
};

template <class Build>
PanelBuild assemble(const std::vector<EventInput>& events, const MarketData& data, std::vector<int> offsets,
                    int workers, Build build) {
  auto outcomes = parallel_map(events.size(), workers, [&](std::size_t i) -> Outcome {
    try {
      return {build(events[i]), {}};
    } catch (const Error& e) {
      return {std::nullopt, std::string(error_code_name(e.code()))};
    }
  });
  PanelBuild out{EventPanel(std::move(offsets)), {}};
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!outcomes[i].cells) {
      ++out.dropped[outcomes[i].reason];
      continue;
    }
    PanelEvent ev = events[i].event;
    ev.sector = data.security(ev.ticker).sector_class;
    out.panel.add_event(std::move(ev), std::move(*outcomes[i].cells));
  }
  return out;
}

template <class Map>
const typename Map::mapped_type& require_series(const Map* m, const std::string& key, const char* what) {
  if (m == nullptr) throw Error(ErrorCode::Data, fmt::format("no {} series loaded", what));
  auto it = m->find(key);
  if (it == m->end() || it->second.empty()) {
    throw Error(ErrorCode::Data, fmt::format("no {} series for '{}'", what, key));
  }
  return it->second;
}

int grid_steps(Instant from, Instant to) {
  return static_cast<int>((to - from) / std::chrono::minutes{kIntradayBarMinutes});
}

}  // namespace

PanelBuild daily_ar_panel(const std::vector<EventInput>& events, const MarketData& data,
                          const ModelSpec& spec, RelativeWindow grid, int workers) {
  const auto offsets = offsets_of(grid);
  return assemble(events, data, offsets, workers, [&](const EventInput& in) {
    const auto& sec = data.security(in.event.ticker);
    const auto& bars = require_series(data.daily, sec.ticker, "daily price");
    const auto& index = require_series(data.index_daily, sec.market_index, "daily index");
    const FactorTable* factors = data.factors_for(sec.ticker);
    if (spec.kind != ModelKind::MarketAdjusted && factors == nullptr) {
      throw Error(ErrorCode::FactorGap, fmt::format("no factor set for region '{}'", sec.region));
    }
    const auto returns = daily_returns(bars, index, factors);
    const auto e = event_index(returns, in.day0);
    if (!e || returns[*e].date != in.day0) {
      throw Error(ErrorCode::InsufficientHistory, "no return on the event day");
    }
    static const FactorTable kNoFactors;
    const ModelFit fit = fit_model(spec, returns, factors ? *factors : kNoFactors, *e);

    Cells cells(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      const long i = static_cast<long>(*e) + offsets[k];
      if (i < 0 || i >= static_cast<long>(returns.size())) continue;
      const auto& obs = returns[static_cast<std::size_t>(i)];
      const FactorRow* f = factors ? factors->find(obs.date) : nullptr;
      if (spec.kind != ModelKind::MarketAdjusted && f == nullptr) continue;
      cells[k] = abnormal_return(fit, obs, f);
    }
    return cells;
  });
}

PanelBuild intraday_car_panel(const std::vector<EventInput>& events, const MarketData& data, int workers) {
  const int steps = kIntradayHorizonMinutes / kIntradayBarMinutes;
  std::vector<int> offsets;
  for (int k = 1; k <= steps; ++k) offsets.push_back(k * kIntradayBarMinutes);

  return assemble(events, data, offsets, workers, [&](const EventInput& in) {
    const auto& sec = data.security(in.event.ticker);
    const auto& cal = data.calendar_for(sec.ticker);
    const auto& bars = require_series(data.intraday, sec.ticker, "intraday price");
    const auto& index = require_series(data.index_intraday, sec.market_index, "intraday index");

    auto find_bar = [&](Instant t) -> const IntradayBar* {
      auto it = std::lower_bound(bars.begin(), bars.end(), t,
                                 [](const IntradayBar& b, Instant x) { return b.timestamp < x; });
      return it != bars.end() && it->timestamp == t ? &*it : nullptr;
    };
    auto index_pos = [&](Instant t) -> std::optional<std::size_t> {
      auto it = std::lower_bound(index.begin(), index.end(), t,
                                 [](const StampedPrice& p, Instant x) { return p.timestamp < x; });
      if (it == index.end() || it->timestamp != t) return std::nullopt;
      return static_cast<std::size_t>(it - index.begin());
    };

    const Instant close = cal.session_close(cal.local_date(in.intraday_start));
    const int available = std::min(steps, grid_steps(in.intraday_start, close));
    Cells cells(offsets.size());
    double car = 0.0;
    for (int k = 0; k < available; ++k) {
      const Instant t = in.intraday_start + std::chrono::minutes{k * kIntradayBarMinutes};
      const IntradayBar* bar = find_bar(t);
      const auto ip = index_pos(t);
      if (bar == nullptr || !ip || *ip == 0 || bar == bars.data()) break;
      const IntradayBar& prev = *(bar - 1);
      if (index[*ip - 1].timestamp != prev.timestamp) break;
      car += simple_return(prev.price, bar->price) - simple_return(index[*ip - 1].price, index[*ip].price);
      cells[static_cast<std::size_t>(k)] = car;
    }
    if (!cells.front()) throw Error(ErrorCode::Data, "no intraday bars from minute 0");
    return cells;
  });
}

PanelBuild daily_volume_panel(const std::vector<EventInput>& events, const MarketData& data,
                              RelativeWindow grid, int T, int workers) {
  const auto offsets = offsets_of(grid);
  return assemble(events, data, offsets, workers, [&](const EventInput& in) {
    const auto& bars = require_series(data.daily, in.event.ticker, "daily price");
    auto it = std::lower_bound(bars.begin(), bars.end(), in.day0,
                               [](const DailyBar& b, Date d) { return b.date < d; });
    if (it == bars.end() || it->date != in.day0) {
      throw Error(ErrorCode::InsufficientHistory, "no daily bar on the event day");
    }
    const long e = it - bars.begin();
    auto tau = [&](long i) -> std::optional<double> {
      if (i < 0 || i >= static_cast<long>(bars.size())) return std::nullopt;
      const auto& b = bars[static_cast<std::size_t>(i)];
      if (b.volume <= 0.0) return std::nullopt;
      return log_turnover(b.volume, b.shares_outstanding, TurnoverScope::Daily);
    };
    std::vector<std::optional<double>> baseline;
    for (long i = e - T; i < e; ++i) baseline.push_back(tau(i));
    const double mean = baseline_mean(baseline, T);

    Cells cells(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      if (auto v = tau(e + offsets[k])) cells[k] = abnormal_volume(*v, mean);
    }
    return cells;
  });
}

PanelBuild intraday_volume_panel(const std::vector<EventInput>& events, const MarketData& data, int T,
                                 int workers) {
  const int steps = kIntradayHorizonMinutes / kIntradayBarMinutes;
  std::vector<int> offsets;
  for (int k = 1; k <= steps; ++k) offsets.push_back(k * kIntradayBarMinutes);

  return assemble(events, data, offsets, workers, [&](const EventInput& in) {
    const auto& cal = data.calendar_for(in.event.ticker);
    const auto& bars = require_series(data.intraday, in.event.ticker, "intraday price");
    const auto start = std::lower_bound(bars.begin(), bars.end(), in.intraday_start,
                                        [](const IntradayBar& b, Instant x) { return b.timestamp < x; });
    const long s = start - bars.begin();

    std::vector<std::optional<double>> baseline;
    for (long i = s - T; i < s; ++i) {
      if (i < 0) {
        baseline.emplace_back();
      } else {
        baseline.emplace_back(log_turnover(bars[static_cast<std::size_t>(i)].volume, 0.0, TurnoverScope::Intraday));
      }
    }
    const double mean = baseline_mean(baseline, T);

    const Instant close = cal.session_close(cal.local_date(in.intraday_start));
    const int available = std::min(steps, grid_steps(in.intraday_start, close));
    Cells cells(offsets.size());
    auto it = start;
    for (int k = 0; k < available; ++k) {
      const Instant t = in.intraday_start + std::chrono::minutes{k * kIntradayBarMinutes};
      if (it == bars.end() || it->timestamp != t) break;
      cells[static_cast<std::size_t>(k)] =
          abnormal_volume(log_turnover(it->volume, 0.0, TurnoverScope::Intraday), mean);
      ++it;
    }
    if (!cells.front()) throw Error(ErrorCode::Data, "no intraday bars from minute 0");
    return cells;
  });
}

}  // namespace leakstudy
