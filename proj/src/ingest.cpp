#include "leakstudy/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace leakstudy {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char c : s) {
    if (c == sep) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

int parse_clock(const std::string& hhmm) {
  int h = 0;
  int m = 0;
  if (std::sscanf(hhmm.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 24 || m < 0 || m > 59) {
    throw Error(ErrorCode::Domain, fmt::format("invalid clock time '{}'", hhmm));
  }
  return h * 60 + m;
}

unsigned parse_weekday(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static const std::map<std::string, unsigned> names{
      {"mon", 1}, {"tue", 2}, {"wed", 3}, {"thu", 4}, {"fri", 5}, {"sat", 6}, {"sun", 7}};
  const auto it = names.find(s.substr(0, 3));
  if (it == names.end()) throw Error(ErrorCode::Domain, fmt::format("invalid weekday '{}'", s));
  return it->second;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

double require_positive(const CsvTable& t, std::size_t r, std::size_t c) {
  const double v = t.number(r, c);
  if (!(v > 0.0)) t.fail(r, c, fmt::format("must be > 0, got {}", t.text(r, c)));
  return v;
}

double require_non_negative(const CsvTable& t, std::size_t r, std::size_t c) {
  const double v = t.number(r, c);
  if (!(v >= 0.0)) t.fail(r, c, fmt::format("must be >= 0, got {}", t.text(r, c)));
  return v;
}

Date date_cell(const CsvTable& t, std::size_t r, std::size_t c) {
  try {
    return parse_date(t.text(r, c));
  } catch (const Error& e) {
    t.fail(r, c, e.what());
  }
}

Instant instant_cell(const CsvTable& t, std::size_t r, std::size_t c) {
  try {
    return parse_instant(t.text(r, c));
  } catch (const Error& e) {
    t.fail(r, c, e.what());
  }
}

template <class Bar, class Key>
std::map<std::string, std::vector<Bar>> group_by_ticker(std::vector<std::pair<std::string, Bar>> rows,
                                                        Key key, const char* what) {
  std::map<std::string, std::vector<Bar>> out;
  for (auto& [ticker, bar] : rows) out[ticker].push_back(std::move(bar));
  for (auto& [ticker, bars] : out) {
    std::stable_sort(bars.begin(), bars.end(),
                     [&](const Bar& a, const Bar& b) { return key(a) < key(b); });
    for (std::size_t i = 1; i < bars.size(); ++i) {
      if (key(bars[i]) == key(bars[i - 1])) {
        throw Error(ErrorCode::Data, fmt::format("duplicate {} for {}", what, ticker));
      }
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Schema<SecurityRecord> securities_schema() {
  return {"securities",
          {"ticker", "exchange_id", "region", "industry", "currency", "market_index"},
          [](const CsvTable& t, std::size_t r) {
            SecurityRecord s;
            s.ticker = t.text(r, t.column("ticker"));
            s.exchange_id = t.text(r, t.column("exchange_id"));
            s.region = t.text(r, t.column("region"));
            s.sector_class = classify_sector(t.text(r, t.column("industry")));
            s.currency = upper(t.text(r, t.column("currency")));
            s.market_index = t.text(r, t.column("market_index"));
            if (s.ticker.empty()) t.fail(r, t.column("ticker"), "empty ticker");
            if (s.currency.size() != 3) t.fail(r, t.column("currency"), "expected ISO currency code");
            return s;
          }};
}

Schema<ExchangeCalendar> calendar_schema() {
  return {"calendar",
          {"exchange_id", "timezone", "open", "close", "holiday_dates"},
          [](const CsvTable& t, std::size_t r) {
            std::set<Date> holidays;
            std::map<Date, int> early;
            for (const auto& item : split_list(t.text(r, t.column("holiday_dates")), ';')) {
              const auto at = item.find('@');
              try {
                if (at == std::string::npos) {
                  holidays.insert(parse_date(item));
                } else {
                  early.emplace(parse_date(item.substr(0, at)), parse_clock(item.substr(at + 1)));
                }
              } catch (const Error& e) {
                t.fail(r, t.column("holiday_dates"), e.what());
              }
            }
            std::set<unsigned> weekend{6, 7};
            if (auto c = t.find_column("weekend_days"); c && !t.text(r, *c).empty()) {
              weekend.clear();
              for (const auto& d : split_list(t.text(r, *c), ';')) weekend.insert(parse_weekday(d));
            }
            std::optional<Date> from;
            std::optional<Date> to;
            if (auto c = t.find_column("coverage_start"); c && !t.text(r, *c).empty()) {
              from = date_cell(t, r, *c);
            }
            if (auto c = t.find_column("coverage_end"); c && !t.text(r, *c).empty()) {
              to = date_cell(t, r, *c);
            }
            return ExchangeCalendar(t.text(r, t.column("exchange_id")), t.text(r, t.column("timezone")),
                                    parse_clock(t.text(r, t.column("open"))),
                                    parse_clock(t.text(r, t.column("close"))), std::move(holidays),
                                    std::move(weekend), std::move(early), from, to);
          }};
}

Schema<std::pair<std::string, DailyBar>> daily_price_schema() {
  return {"prices_daily",
          {"ticker", "date", "close", "volume", "shares_outstanding"},
          [](const CsvTable& t, std::size_t r) {
            DailyBar b;
            b.date = date_cell(t, r, t.column("date"));
            b.close = require_positive(t, r, t.column("close"));
            b.volume = require_non_negative(t, r, t.column("volume"));
            b.shares_outstanding = require_positive(t, r, t.column("shares_outstanding"));
            return std::pair{t.text(r, t.column("ticker")), b};
          }};
}

Schema<std::pair<std::string, IntradayBar>> intraday_price_schema() {
  return {"prices_intraday",
          {"ticker", "timestamp", "price", "volume"},
          [](const CsvTable& t, std::size_t r) {
            IntradayBar b;
            b.timestamp = instant_cell(t, r, t.column("timestamp"));
            b.price = require_positive(t, r, t.column("price"));
            b.volume = require_non_negative(t, r, t.column("volume"));
            return std::pair{t.text(r, t.column("ticker")), b};
          }};
}

Schema<std::pair<std::string, IndexBar>> index_daily_schema() {
  return {"index_daily",
          {"index", "date", "close"},
          [](const CsvTable& t, std::size_t r) {
            IndexBar b;
            b.date = date_cell(t, r, t.column("date"));
            b.close = require_positive(t, r, t.column("close"));
            return std::pair{t.text(r, t.column("index")), b};
          }};
}

Schema<std::pair<std::string, StampedPrice>> index_intraday_schema() {
  return {"index_intraday",
          {"index", "timestamp", "price"},
          [](const CsvTable& t, std::size_t r) {
            StampedPrice p;
            p.timestamp = instant_cell(t, r, t.column("timestamp"));
            p.price = require_positive(t, r, t.column("price"));
            return std::pair{t.text(r, t.column("index")), p};
          }};
}

Schema<FactorRow> factor_schema(FactorUnits units) {
  const double scale = units == FactorUnits::Percent ? 0.01 : 1.0;
  return {"factors",
          {"date", "mkt_rf", "smb", "hml", "rf"},
          [scale](const CsvTable& t, std::size_t r) {
            FactorRow f;
            f.date = date_cell(t, r, t.column("date"));
            f.mkt_rf = t.number(r, t.column("mkt_rf")) * scale;
            f.smb = t.number(r, t.column("smb")) * scale;
            f.hml = t.number(r, t.column("hml")) * scale;
            f.rf = t.number(r, t.column("rf")) * scale;
            if (auto c = t.find_column("mom")) {
              if (auto v = t.optional_number(r, *c)) f.mom = *v * scale;
            }
            validate(f);
            return f;
          }};
}

Schema<Headline> headline_schema() {
  return {"headlines",
          {"feed", "timestamp", "headline", "article_chars", "tickers", "green_label"},
          [](const CsvTable& t, std::size_t r) {
            Headline h;
            h.feed = t.text(r, t.column("feed"));
            h.timestamp = instant_cell(t, r, t.column("timestamp"));
            h.text = t.text(r, t.column("headline"));
            h.article_chars = t.integer(r, t.column("article_chars"));
            if (h.article_chars < 0) t.fail(r, t.column("article_chars"), "must be >= 0");
            h.tickers = split_list(t.text(r, t.column("tickers")), ';');
            h.green_label = t.boolean(r, t.column("green_label"));
            return h;
          }};
}

Schema<RawAnnouncement> announcement_schema() {
  return {"announcements",
          {"ticker", "announce_date", "currency", "amount", "maturity_date", "perpetual",
           "coupon_pct", "has_option", "yield"},
          [](const CsvTable& t, std::size_t r) {
            RawAnnouncement a;
            a.ticker = t.text(r, t.column("ticker"));
            a.announce_date = date_cell(t, r, t.column("announce_date"));
            a.currency = upper(t.text(r, t.column("currency")));
            a.amount = require_positive(t, r, t.column("amount"));
            a.perpetual = t.boolean(r, t.column("perpetual"));
            if (!t.text(r, t.column("maturity_date")).empty()) {
              a.maturity_date = date_cell(t, r, t.column("maturity_date"));
              if (*a.maturity_date <= a.announce_date) {
                t.fail(r, t.column("maturity_date"), "maturity must follow the announcement");
              }
            } else if (!a.perpetual) {
              t.fail(r, t.column("maturity_date"), "dated bond without maturity");
            }
            a.coupon_pct = require_non_negative(t, r, t.column("coupon_pct"));
            a.has_option = t.boolean(r, t.column("has_option"));
            a.yield = t.optional_number(r, t.column("yield"));
            return a;
          }};
}

Schema<FundamentalsFiling> fundamentals_schema() {
  return {"fundamentals",
          {"ticker", "fiscal_year", "mktcap", "assets", "roa", "de", "fcf", "first_time_issuer"},
          [](const CsvTable& t, std::size_t r) {
            FundamentalsFiling f;
            f.ticker = t.text(r, t.column("ticker"));
            f.fiscal_year = static_cast<int>(t.integer(r, t.column("fiscal_year")));
            if (auto c = t.find_column("period")) {
              const std::string p = upper(t.text(r, *c));
              if (p == "TTM") {
                f.period = FilingPeriod::Trailing12M;
              } else if (!p.empty() && p != "FY") {
                t.fail(r, *c, "period must be FY or TTM");
              }
            }
            f.mktcap = require_positive(t, r, t.column("mktcap"));
            f.assets = require_positive(t, r, t.column("assets"));
            f.roa = t.number(r, t.column("roa"));
            f.de = require_non_negative(t, r, t.column("de"));
            f.fcf = t.number(r, t.column("fcf"));
            f.first_time_issuer = t.boolean(r, t.column("first_time_issuer"));
            return f;
          }};
}

Schema<FxRate> fx_schema() {
  return {"fx",
          {"pair", "timestamp", "rate"},
          [](const CsvTable& t, std::size_t r) {
            std::string pair;
            for (char c : t.text(r, t.column("pair"))) {
              if (std::isalpha(static_cast<unsigned char>(c))) pair.push_back(c);
            }
            pair = upper(pair);
            if (pair.size() != 6 || pair.substr(3) != "USD") {
              t.fail(r, t.column("pair"), "expected a CCYUSD pair quoting USD per unit");
            }
            FxRate fx;
            fx.currency = pair.substr(0, 3);
            fx.timestamp = instant_cell(t, r, t.column("timestamp"));
            fx.rate = require_positive(t, r, t.column("rate"));
            return fx;
          }};
}

// ---------------------------------------------------------------------------

DailySeries group_daily(std::vector<std::pair<std::string, DailyBar>> rows) {
  return group_by_ticker(std::move(rows), [](const DailyBar& b) { return b.date; }, "date");
}

IntradaySeries group_intraday(std::vector<std::pair<std::string, IntradayBar>> rows) {
  return group_by_ticker(std::move(rows), [](const IntradayBar& b) { return b.timestamp; },
                         "timestamp");
}

IndexDailySeries group_index_daily(std::vector<std::pair<std::string, IndexBar>> rows) {
  return group_by_ticker(std::move(rows), [](const IndexBar& b) { return b.date; }, "date");
}

IndexIntradaySeries group_index_intraday(std::vector<std::pair<std::string, StampedPrice>> rows) {
  return group_by_ticker(std::move(rows), [](const StampedPrice& b) { return b.timestamp; },
                         "timestamp");
}

void validate_intraday_grid(const std::vector<IntradayBar>& bars, const ExchangeCalendar& cal) {
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto pos = classify_timestamp(bars[i].timestamp, cal);
    if (pos.kind != SessionClass::InSession || pos.offset_minutes % 5 != 0 ||
        (bars[i].timestamp - cal.session_open(pos.local_date)).count() % 300 != 0) {
      throw Error(ErrorCode::Data, fmt::format("bar at {} is off the five-minute session grid",
                                               format_instant(bars[i].timestamp)));
    }
    if (i > 0 && bars[i].timestamp <= bars[i - 1].timestamp) {
      throw Error(ErrorCode::Data, "intraday bars must be strictly increasing");
    }
  }
}

FactorTable::FactorTable(std::vector<FactorRow> rows) {
  has_momentum_ = !rows.empty();
  for (auto& row : rows) {
    has_momentum_ = has_momentum_ && row.mom.has_value();
    if (!rows_.emplace(row.date, row).second) {
      throw Error(ErrorCode::Data, fmt::format("duplicate factor date {}", format_date(row.date)));
    }
  }
}

const FactorRow* FactorTable::find(Date d) const {
  const auto it = rows_.find(d);
  return it == rows_.end() ? nullptr : &it->second;
}

FxTable::FxTable(std::vector<FxRate> rates) {
  for (const auto& r : rates) by_currency_[r.currency][r.timestamp] = r.rate;
}

double FxTable::rate_at(const std::string& currency, Instant ts) const {
  const auto it = by_currency_.find(currency);
  if (it != by_currency_.end()) {
    auto at = it->second.upper_bound(ts);
    if (at != it->second.begin()) return std::prev(at)->second;
  }
  throw Error(ErrorCode::FxGap,
              fmt::format("no {}USD rate at or before {}", currency, format_instant(ts)));
}

double rebase_usd(double amount, const std::string& currency, Instant leak_ts, const FxTable& fx) {
  if (currency == "USD") return amount;
  return amount * fx.rate_at(currency, leak_ts);
}

// ---------------------------------------------------------------------------

bool uses_trailing_basis(Date announcement_date) { return day_of_year(announcement_date) <= 45; }

FirmFundamentals prepare_fundamentals(const std::vector<FundamentalsFiling>& filings,
                                      Date announcement_date) {
  const int year = year_of(announcement_date);
  FirmFundamentals out;

  if (uses_trailing_basis(announcement_date)) {
    const FundamentalsFiling* ttm = nullptr;
    for (const auto& f : filings) {
      if (f.period == FilingPeriod::Trailing12M && f.fiscal_year < year &&
          (!ttm || f.fiscal_year > ttm->fiscal_year)) {
        ttm = &f;
      }
    }
    if (!ttm) {
      throw Error(ErrorCode::InsufficientHistory,
                  fmt::format("no trailing-12M filing available before {}",
                              format_date(announcement_date)));
    }
    out.fti = ttm->first_time_issuer;
    out.mktcap_usd = ttm->mktcap;
    out.assets_usd = ttm->assets;
    out.fcf_usd = ttm->fcf;
    out.roa = ttm->roa;
    out.de = ttm->de;
    out.tobins_q = out.mktcap_usd / out.assets_usd;
    out.basis = FundamentalsBasis::Trailing12M;
    return out;
  }

  std::vector<const FundamentalsFiling*> years;
  for (const auto& f : filings) {
    if (f.period == FilingPeriod::FiscalYear && f.fiscal_year < year) years.push_back(&f);
  }
  // Canonical order keeps the averages bit-identical under input permutation.
  std::sort(years.begin(), years.end(), [](const auto* a, const auto* b) {
    return a->fiscal_year > b->fiscal_year;
  });
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i]->fiscal_year == years[i - 1]->fiscal_year) {
      throw Error(ErrorCode::Data, fmt::format("duplicate fiscal year {} for {}",
                                               years[i]->fiscal_year, years[i]->ticker));
    }
  }
  if (years.size() < 3) {
    throw Error(ErrorCode::InsufficientHistory,
                fmt::format("{} fiscal years of filings before {}, need 3", years.size(),
                            format_date(announcement_date)));
  }
  years.resize(3);
  std::sort(years.begin(), years.end(), [](const auto* a, const auto* b) {
    return a->fiscal_year < b->fiscal_year;
  });

  auto mean = [&](double FundamentalsFiling::*field) {
    double s = 0.0;
    for (const auto* f : years) s += f->*field;
    return s / 3.0;
  };
  out.fti = years.back()->first_time_issuer;
  out.mktcap_usd = mean(&FundamentalsFiling::mktcap);
  out.assets_usd = mean(&FundamentalsFiling::assets);
  out.fcf_usd = mean(&FundamentalsFiling::fcf);
  out.roa = mean(&FundamentalsFiling::roa);
  out.de = mean(&FundamentalsFiling::de);
  out.tobins_q = out.mktcap_usd / out.assets_usd;
  out.basis = FundamentalsBasis::ThreeYearAverage;
  return out;
}

FirmFundamentals rebase_fundamentals(FirmFundamentals f, const std::string& currency,
                                     Instant leak_ts, const FxTable& fx) {
  f.mktcap_usd = rebase_usd(f.mktcap_usd, currency, leak_ts, fx);
  f.assets_usd = rebase_usd(f.assets_usd, currency, leak_ts, fx);
  f.fcf_usd = rebase_usd(f.fcf_usd, currency, leak_ts, fx);
  f.tobins_q = f.mktcap_usd / f.assets_usd;
  return f;
}

double macaulay_perpetual(double yield) {
  if (!(yield > 0.0) || !std::isfinite(yield)) {
    throw Error(ErrorCode::Domain, fmt::format("perpetual yield must be > 0, got {}", yield));
  }
  return (1.0 + yield) / yield;
}

}  // namespace leakstudy
