#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leakstudy/domain.hpp"
#include "leakstudy/factor_model.hpp"
#include "leakstudy/inference.hpp"
#include "leakstudy/leak_matcher.hpp"

namespace leakstudy {

struct PanelEvent {
  std::string ticker;
  Instant anchor;
  AnchorRole role = AnchorRole::Leak;
  LeakTiming timing = LeakTiming::LateMarket;
  SectorClass sector = SectorClass::NonFinancial;
};

// Events x relative offsets. Offsets are trading days for daily panels and
// elapsed minutes for intraday ones; empty cells are unavailable.
class EventPanel {
public:
  explicit EventPanel(std::vector<int> offsets);

  void add_event(PanelEvent event, std::vector<std::optional<double>> cells);

  const std::vector<int>& offsets() const { return offsets_; }
  const std::vector<PanelEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  // Column of an offset; throws Validation when the grid lacks it.
  std::size_t column(int offset) const;
  bool has_offset(int offset) const;
  const std::optional<double>& cell(std::size_t event, std::size_t column) const;

  // Available values at one offset.
  std::vector<double> column_values(int offset) const;

  template <class Pred>
  EventPanel filter(Pred keep) const {
    EventPanel out(offsets_);
    for (std::size_t e = 0; e < events_.size(); ++e) {
      if (keep(events_[e])) out.add_event(events_[e], cells_[e]);
    }
    return out;
  }

private:
  std::vector<int> offsets_;
  std::vector<PanelEvent> events_;
  std::vector<std::vector<std::optional<double>>> cells_;
};

struct StudyRow {
  RelativeWindow window;
  MeanTest test;
};

std::string window_label(const RelativeWindow& w);

// Cross-sectional mean of the cells at offset t.
StudyRow aar(const EventPanel& panel, int t, Tail tail = Tail::OneSided);

// Per-event sums over [a,b] (events missing any offset dropped), then their
// cross-sectional mean.
StudyRow caar(const EventPanel& panel, RelativeWindow w, Tail tail = Tail::OneSided);

// Per-event CARs over a window, complete cases only.
std::vector<double> event_cars(const EventPanel& panel, RelativeWindow w);

struct WindowEstimate {
  RelativeWindow window;
  double estimate = 0.0;
};

// Estimate on the part of `outer` not covered by `part`, which must share one
// endpoint with it: CAAR[-3,-1] = CAAR[-3,3] - CAAR[0,3].
WindowEstimate window_remainder(const WindowEstimate& outer, const WindowEstimate& part);

// Daily presets; leak anchors drop the windows that start before day 0.
std::vector<RelativeWindow> daily_window_presets(AnchorRole role);
// 5, 10, ..., 60 minutes, then hourly to 480.
std::vector<int> intraday_offsets();

inline constexpr int kIntradayBarMinutes = 5;
inline constexpr int kIntradayHorizonMinutes = 480;

// Each row reports the intraday panel's cross-section at one offset.
std::vector<StudyRow> intraday_caar(const EventPanel& cumulative_panel, const std::vector<int>& offsets,
                                    Tail tail = Tail::OneSided);

enum class Split { All, Timing, Sector };
Split parse_split(std::string_view text);

struct PanelGroup {
  std::string label;
  EventPanel panel;
};

// "all"; "early"/"late"; "financial"/"nonfinancial".
std::vector<PanelGroup> split_panel(const EventPanel& panel, Split split);

// ---------------------------------------------------------------------------
// Volume

enum class TurnoverScope { Daily, Intraday };

inline constexpr int kDailyBaseline = 20;
inline constexpr int kIntradayBaseline = 96;

// Daily: ln(volume / shares), volume must be positive (UndefinedTurnover).
// Intraday: ln(1 + volume).
double log_turnover(double volume, double shares_outstanding, TurnoverScope scope);

// Mean of the valid baseline values; needs at least T/2 of the T periods.
double baseline_mean(std::span<const std::optional<double>> baseline, int T);

inline double abnormal_volume(double tau, double baseline) { return tau - baseline; }

// 100 (exp(x) - 1).
double display_percent(double log_points);

struct VolumeRow {
  int offset = 0;
  StudyRow aav;
  StudyRow caav;
};

// AAV at each offset and CAAV from the panel's first offset through it. The
// cumulative sums run over every grid offset, not only the reported ones.
std::vector<VolumeRow> aav_caav(const EventPanel& panel, const std::vector<int>& report_offsets,
                                Tail tail = Tail::OneSided);

}  // namespace leakstudy
