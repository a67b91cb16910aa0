#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "leakstudy/calendar.hpp"
#include "leakstudy/domain.hpp"
#include "leakstudy/factor_model.hpp"
#include "leakstudy/ingest.hpp"

namespace leakstudy {

struct ReturnInjection {
  int offset = 0;    // trading days (daily) or minutes after minute 0 (intraday)
  double bp = 0.0;
};

struct VolumeInjection {
  int offset = 0;
  double multiplier = 1.0;
};

struct SimSpec {
  std::uint64_t seed = 1;
  int n_securities = 50;
  int n_days = 360;
  bool intraday = false;

  double sigma = 0.01;          // daily idiosyncratic sd
  double intraday_sigma = 0.001;  // per five-minute bar
  double beta = 1.0;
  double beta_spread = 0.0;     // betas uniform in beta +- spread
  double smb_loading = 0.0;
  double hml_loading = 0.0;
  double mom_loading = 0.0;

  // Trading-day index of the leak; -1 places it 31 days before the end.
  int event_day = -1;
  int announce_lag = 5;         // trading days from leak to announcement
  // Minutes after the open on the event day; negative means pre-market.
  int leak_minute = 30;

  double daily_volume = 200'000.0;  // median shares per day
  double intraday_volume = 2'000.0; // median shares per bar
  double volume_sigma = 0.3;        // lognormal sd
  double shares_outstanding = 1e7;

  std::vector<std::string> regions{"US"};
  double financial_share = 0.3;

  std::vector<ReturnInjection> inject_return;
  std::vector<VolumeInjection> inject_volume;
  std::vector<ReturnInjection> inject_intraday_return;
  std::vector<VolumeInjection> inject_intraday_volume;
};

// key=value lines; '#' starts a comment. Injection lists are comma-separated
// offset:value pairs, regions a comma-separated list.
SimSpec parse_sim_spec(const std::string& text);
SimSpec read_sim_spec(const std::string& path);
void validate(const SimSpec& spec);
int resolved_event_day(const SimSpec& spec);

inline constexpr const char* kSimExchange = "SIMX";
inline constexpr const char* kSimIndex = "SIMIDX";

struct SimSecurity {
  SecurityRecord record;
  std::string industry;
  double beta = 1.0;
};

struct SimDataset {
  ExchangeCalendar calendar;
  std::vector<Date> trading_days;
  std::vector<SimSecurity> securities;
  DailySeries daily;
  IntradaySeries intraday;
  IndexDailySeries index_daily;
  IndexIntradaySeries index_intraday;
  std::vector<FactorRow> factors;
  std::vector<Headline> headlines;
  std::vector<RawAnnouncement> announcements;
  std::vector<FundamentalsFiling> fundamentals;
  int event_day = 0;
  Instant leak_ts;
};

SimDataset generate(const SimSpec& spec);

// Writes the dataset as the ingest CSV files (factors_<region>.csv per region).
void write_dataset(const SimDataset& data, const std::string& dir);

enum class Alternative { Less, Greater, TwoSided, EstimateSign };

struct PowerSizeResult {
  int trials = 0;
  int rejections = 0;
  double rejection_rate = 0.0;
  double mean_estimate = 0.0;
  double sd_estimate = 0.0;
  double mean_std_err = 0.0;
  // Trials whose estimate lies within 2 of its own standard errors of truth.
  int covered = 0;
};

struct PowerSizeConfig {
  ModelKind model = ModelKind::MarketAdjusted;
  double alpha = 0.05;
  int trials = 200;
  int test_offset = 0;
  // Value the coverage count compares against (decimal).
  double truth = 0.0;
  Alternative alternative = Alternative::EstimateSign;
  int workers = 1;
};

// Runs `trials` independent simulations (seeds derived from spec.seed) and
// tests the daily AAR at test_offset.
PowerSizeResult power_size(const SimSpec& spec, const PowerSizeConfig& config);

}  // namespace leakstudy
