#include "leakstudy/event_study.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "leakstudy/error.hpp"

namespace leakstudy {

EventPanel::EventPanel(std::vector<int> offsets) : offsets_(std::move(offsets)) {
  if (!std::is_sorted(offsets_.begin(), offsets_.end()) ||
      std::adjacent_find(offsets_.begin(), offsets_.end()) != offsets_.end()) {
    throw Error(ErrorCode::Validation, "panel offsets must be strictly increasing");
  }
}

void EventPanel::add_event(PanelEvent event, std::vector<std::optional<double>> cells) {
  if (cells.size() != offsets_.size()) {
    throw Error(ErrorCode::Validation,
                fmt::format("event {} has {} cells for {} offsets", event.ticker, cells.size(), offsets_.size()));
  }
  events_.push_back(std::move(event));
  cells_.push_back(std::move(cells));
}

bool EventPanel::has_offset(int offset) const {
  return std::binary_search(offsets_.begin(), offsets_.end(), offset);
}

std::size_t EventPanel::column(int offset) const {
  auto it = std::lower_bound(offsets_.begin(), offsets_.end(), offset);
  if (it == offsets_.end() || *it != offset) {
    throw Error(ErrorCode::Validation, fmt::format("offset {} outside the panel grid", offset));
  }
  return static_cast<std::size_t>(it - offsets_.begin());
}

const std::optional<double>& EventPanel::cell(std::size_t event, std::size_t col) const {
  return cells_.at(event).at(col);
}

std::vector<double> EventPanel::column_values(int offset) const {
  const std::size_t c = column(offset);
  std::vector<double> out;
  out.reserve(cells_.size());
  for (const auto& row : cells_) {
    if (row[c]) out.push_back(*row[c]);
  }
  return out;
}

std::string window_label(const RelativeWindow& w) {
  if (w.first == w.last) return fmt::format("{}", w.first);
  return fmt::format("[{},{}]", w.first, w.last);
}

StudyRow aar(const EventPanel& panel, int t, Tail tail) {
  const auto xs = panel.column_values(t);
  return {RelativeWindow{t, t}, mean_test(xs, tail)};
}

std::vector<double> event_cars(const EventPanel& panel, RelativeWindow w) {
  if (w.first > w.last) throw Error(ErrorCode::Validation, "window start after end");
  const std::size_t c0 = panel.column(w.first);
  const std::size_t c1 = panel.column(w.last);
  std::vector<double> cars;
  for (std::size_t e = 0; e < panel.size(); ++e) {
    double sum = 0.0;
    bool complete = true;
    for (std::size_t c = c0; c <= c1; ++c) {
      const auto& v = panel.cell(e, c);
      if (!v) {
        complete = false;
        break;
      }
      sum += *v;
    }
    if (complete) cars.push_back(sum);
  }
  return cars;
}

StudyRow caar(const EventPanel& panel, RelativeWindow w, Tail tail) {
  const auto cars = event_cars(panel, w);
  return {w, mean_test(cars, tail)};
}

WindowEstimate window_remainder(const WindowEstimate& outer, const WindowEstimate& part) {
  const auto& o = outer.window;
  const auto& p = part.window;
  if (p.first < o.first || p.last > o.last || p == o) {
    throw Error(ErrorCode::Validation,
                fmt::format("{} is not a proper sub-window of {}", window_label(p), window_label(o)));
  }
  RelativeWindow rest;
  if (p.last == o.last) {
    rest = {o.first, p.first - 1};
  } else if (p.first == o.first) {
    rest = {p.last + 1, o.last};
  } else {
    throw Error(ErrorCode::Validation, "sub-window must share an endpoint with the outer window");
  }
  return {rest, outer.estimate - part.estimate};
}

std::vector<RelativeWindow> daily_window_presets(AnchorRole role) {
  static const std::vector<RelativeWindow> kAll{{-10, 10}, {-5, 5}, {-3, 3},  {0, 1},   {0, 2},  {0, 3},
                                                {0, 5},    {0, 7},  {0, 10}, {11, 21}, {21, 30}};
  if (role == AnchorRole::Announcement) return kAll;
  std::vector<RelativeWindow> out;
  std::copy_if(kAll.begin(), kAll.end(), std::back_inserter(out),
               [](const RelativeWindow& w) { return w.first >= 0; });
  return out;
}

std::vector<int> intraday_offsets() {
  std::vector<int> out;
  for (int m = 5; m <= 60; m += 5) out.push_back(m);
  for (int m = 120; m <= kIntradayHorizonMinutes; m += 60) out.push_back(m);
  return out;
}

std::vector<StudyRow> intraday_caar(const EventPanel& cumulative_panel, const std::vector<int>& offsets,
                                    Tail tail) {
  std::vector<StudyRow> out;
  out.reserve(offsets.size());
  for (int m : offsets) {
    auto row = aar(cumulative_panel, m, tail);
    row.window = {0, m};
    out.push_back(std::move(row));
  }
  return out;
}

Split parse_split(std::string_view text) {
  if (text == "all") return Split::All;
  if (text == "timing") return Split::Timing;
  if (text == "sector") return Split::Sector;
  throw Error(ErrorCode::Config, fmt::format("unknown split '{}'", text));
}

std::vector<PanelGroup> split_panel(const EventPanel& panel, Split split) {
  switch (split) {
    case Split::All:
      return {{"all", panel}};
    case Split::Timing:
      return {{"early", panel.filter([](const PanelEvent& e) { return e.timing == LeakTiming::EarlyMarket; })},
              {"late", panel.filter([](const PanelEvent& e) { return e.timing == LeakTiming::LateMarket; })}};
    case Split::Sector:
      return {
          {"financial", panel.filter([](const PanelEvent& e) { return e.sector == SectorClass::Financial; })},
          {"nonfinancial",
           panel.filter([](const PanelEvent& e) { return e.sector == SectorClass::NonFinancial; })}};
  }
  return {};
}

double log_turnover(double volume, double shares_outstanding, TurnoverScope scope) {
  if (!(volume >= 0.0) || !std::isfinite(volume)) throw Error(ErrorCode::Domain, "volume must be >= 0");
  if (scope == TurnoverScope::Intraday) return std::log1p(volume);
  if (!(shares_outstanding > 0.0)) throw Error(ErrorCode::Domain, "shares outstanding must be > 0");
  if (volume == 0.0) throw Error(ErrorCode::UndefinedTurnover, "zero daily volume has no log turnover");
  return std::log(volume / shares_outstanding);
}

double baseline_mean(std::span<const std::optional<double>> baseline, int T) {
  double sum = 0.0;
  int valid = 0;
  for (const auto& v : baseline) {
    if (v) {
      sum += *v;
      ++valid;
    }
  }
  if (2 * valid < T || valid == 0) {
    throw Error(ErrorCode::InsufficientBaseline,
                fmt::format("{} valid baseline periods, need {} of {}", valid, (T + 1) / 2, T));
  }
  return sum / valid;
}

double display_percent(double log_points) { return 100.0 * std::expm1(log_points); }

std::vector<VolumeRow> aav_caav(const EventPanel& panel, const std::vector<int>& report_offsets, Tail tail) {
  std::vector<VolumeRow> out;
  if (panel.offsets().empty()) return out;
  const int first = panel.offsets().front();
  for (int t : report_offsets) {
    VolumeRow row;
    row.offset = t;
    row.aav = aar(panel, t, tail);
    row.caav = caar(panel, RelativeWindow{first, t}, tail);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace leakstudy
