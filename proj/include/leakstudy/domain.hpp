#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leakstudy/timeutil.hpp"

namespace leakstudy {

enum class SectorClass { Financial, NonFinancial };

std::string_view to_string(SectorClass s);

// Financial iff the industry tag names a bank, government agency, real estate
// firm, financial-services firm, or consumer/commercial finance company.
SectorClass classify_sector(std::string_view industry_tag);

struct SecurityRecord {
  std::string ticker;
  std::string exchange_id;
  std::string region;
  SectorClass sector_class = SectorClass::NonFinancial;
  std::string currency = "USD";
  // Ticker of the local market index used for market-adjusted returns.
  std::string market_index;
};

struct DailyBar {
  Date date;
  double close = 0.0;
  double volume = 0.0;
  double shares_outstanding = 0.0;
};

// Bar timestamp marks the start of a five-minute interval.
struct IntradayBar {
  Instant timestamp;
  double price = 0.0;
  double volume = 0.0;
};

struct IndexBar {
  Date date;
  double close = 0.0;
};

struct ReturnObservation {
  Date date;
  double r_i = 0.0;
  double r_m = 0.0;
  double rf = 0.0;
};

struct FactorRow {
  Date date;
  double mkt_rf = 0.0;
  double smb = 0.0;
  double hml = 0.0;
  std::optional<double> mom;
  double rf = 0.0;
};

// p_curr / p_prev - 1. Both prices must be strictly positive.
double simple_return(double p_prev, double p_curr);

void validate(const DailyBar& bar);
void validate(const IntradayBar& bar);
void validate(const ReturnObservation& obs);
void validate(const FactorRow& row);

}  // namespace leakstudy
