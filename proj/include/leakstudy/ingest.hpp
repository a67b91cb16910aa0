#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakstudy/calendar.hpp"
#include "leakstudy/csv.hpp"
#include "leakstudy/domain.hpp"
#include "leakstudy/error.hpp"

namespace leakstudy {

// A schema names the columns a file must carry and turns one data row into a
// record. Parsers may throw Error; load_table rewraps it with the location.
template <class Record>
struct Schema {
  std::string name;
  std::vector<std::string> required_columns;
  std::function<Record(const CsvTable&, std::size_t row)> parse;
};

template <class Record>
std::vector<Record> load_table(const CsvTable& table, const Schema<Record>& schema) {
  for (const auto& col : schema.required_columns) table.column(col);
  std::vector<Record> out;
  out.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    try {
      out.push_back(schema.parse(table, r));
    } catch (const IngestError&) {
      throw;
    } catch (const Error& e) {
      throw IngestError(table.source(), table.file_row(r), "", e.what());
    }
  }
  return out;
}

template <class Record>
std::vector<Record> load_table(const std::string& path, const Schema<Record>& schema) {
  return load_table(CsvTable::read_file(path), schema);
}

// ---------------------------------------------------------------------------
// Input records

struct Headline {
  std::string feed;
  Instant timestamp;
  std::string text;
  long long article_chars = 0;
  // Primary ticker first.
  std::vector<std::string> tickers;
  bool green_label = false;
};

struct RawAnnouncement {
  std::string ticker;
  Date announce_date;
  std::string currency = "USD";
  double amount = 0.0;  // millions, listing currency
  std::optional<Date> maturity_date;
  bool perpetual = false;
  double coupon_pct = 0.0;
  bool has_option = false;
  std::optional<double> yield;  // decimal
};

enum class FilingPeriod { FiscalYear, Trailing12M };

struct FundamentalsFiling {
  std::string ticker;
  int fiscal_year = 0;
  FilingPeriod period = FilingPeriod::FiscalYear;
  double mktcap = 0.0;
  double assets = 0.0;
  double roa = 0.0;
  double de = 0.0;
  double fcf = 0.0;
  bool first_time_issuer = false;
};

struct FxRate {
  std::string currency;  // foreign currency; rate quotes USD per unit of it
  Instant timestamp;
  double rate = 0.0;
};

enum class FactorUnits { Decimal, Percent };

struct StampedPrice {
  Instant timestamp;
  double price = 0.0;
};

// ---------------------------------------------------------------------------
// Schemas (one per input file format)

Schema<SecurityRecord> securities_schema();
Schema<ExchangeCalendar> calendar_schema();
Schema<std::pair<std::string, DailyBar>> daily_price_schema();
Schema<std::pair<std::string, IntradayBar>> intraday_price_schema();
Schema<std::pair<std::string, IndexBar>> index_daily_schema();
Schema<std::pair<std::string, StampedPrice>> index_intraday_schema();
Schema<FactorRow> factor_schema(FactorUnits units);
Schema<Headline> headline_schema();
Schema<RawAnnouncement> announcement_schema();
Schema<FundamentalsFiling> fundamentals_schema();
Schema<FxRate> fx_schema();

// ---------------------------------------------------------------------------
// Keyed containers built from loaded records

using DailySeries = std::map<std::string, std::vector<DailyBar>>;
using IntradaySeries = std::map<std::string, std::vector<IntradayBar>>;
using IndexDailySeries = std::map<std::string, std::vector<IndexBar>>;
using IndexIntradaySeries = std::map<std::string, std::vector<StampedPrice>>;

// Groups by ticker, sorts by time and rejects duplicate timestamps.
DailySeries group_daily(std::vector<std::pair<std::string, DailyBar>> rows);
IntradaySeries group_intraday(std::vector<std::pair<std::string, IntradayBar>> rows);
IndexDailySeries group_index_daily(std::vector<std::pair<std::string, IndexBar>> rows);
IndexIntradaySeries group_index_intraday(std::vector<std::pair<std::string, StampedPrice>> rows);

// Validates the five-minute grid: bars inside one session are strictly
// increasing and exactly 300 s apart.
void validate_intraday_grid(const std::vector<IntradayBar>& bars, const ExchangeCalendar& cal);

class FactorTable {
public:
  FactorTable() = default;
  explicit FactorTable(std::vector<FactorRow> rows);

  const FactorRow* find(Date d) const;
  bool has_momentum() const { return has_momentum_; }
  std::size_t size() const { return rows_.size(); }

private:
  std::map<Date, FactorRow> rows_;
  bool has_momentum_ = false;
};

class FxTable {
public:
  FxTable() = default;
  explicit FxTable(std::vector<FxRate> rates);

  // Most recent rate at or before ts; throws FxGap when none exists.
  double rate_at(const std::string& currency, Instant ts) const;

private:
  std::map<std::string, std::map<Instant, double>> by_currency_;
};

// amount * (latest USD-per-unit rate at or before leak_ts). USD passes through.
double rebase_usd(double amount, const std::string& currency, Instant leak_ts, const FxTable& fx);

// ---------------------------------------------------------------------------
// Firm fundamentals

enum class FundamentalsBasis { ThreeYearAverage, Trailing12M };

struct FirmFundamentals {
  bool fti = false;
  double mktcap_usd = 0.0;
  double assets_usd = 0.0;
  double fcf_usd = 0.0;
  double roa = 0.0;
  double de = 0.0;
  double tobins_q = 0.0;
  FundamentalsBasis basis = FundamentalsBasis::ThreeYearAverage;
};

// True when the announcement falls in the first 45 calendar days of its year.
bool uses_trailing_basis(Date announcement_date);

// Averages the three fiscal years preceding the announcement year, or takes
// the trailing-twelve-month filing reported in the prior year when the
// announcement lands in the first 45 days. Amounts stay in listing currency.
FirmFundamentals prepare_fundamentals(const std::vector<FundamentalsFiling>& filings,
                                      Date announcement_date);

// Converts the monetary fields to USD at the leak timestamp.
FirmFundamentals rebase_fundamentals(FirmFundamentals f, const std::string& currency,
                                     Instant leak_ts, const FxTable& fx);

// Macaulay duration of a perpetual: (1 + y) / y.
double macaulay_perpetual(double yield);

}  // namespace leakstudy
