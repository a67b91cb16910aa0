#include "leakstudy/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "leakstudy/csv.hpp"
#include "leakstudy/error.hpp"
#include "leakstudy/event_study.hpp"
#include "leakstudy/panel_builder.hpp"
#include "leakstudy/parallel.hpp"
#include "leakstudy/rng.hpp"

namespace leakstudy {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Config, fmt::format("sim spec: '{}' is not a number for {}", v, key));
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::fabs(d) > 1e9) {
    throw Error(ErrorCode::Config, fmt::format("sim spec: {} must be an integer", key));
  }
  return static_cast<int>(d);
}

template <class Injection>
std::vector<Injection> to_injections(const std::string& key, const std::string& v) {
  std::vector<Injection> out;
  for (const auto& item : split(v, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::Config, fmt::format("sim spec: {} expects offset:value pairs", key));
    }
    out.push_back({to_int(key, trim(item.substr(0, colon))), to_double(key, trim(item.substr(colon + 1)))});
  }
  return out;
}

// Stream layout: factors and the index own low ids, each security a block.
constexpr std::uint64_t kFactorStream = 1;
constexpr std::uint64_t kIndexIntradayStream = 2;
std::uint64_t security_stream(int k, int purpose) { return 1000 + static_cast<std::uint64_t>(k) * 16 + purpose; }
enum Purpose { kMeta = 0, kDailyEps = 1, kDailyVolume = 2, kIntradayEps = 3, kIntradayVolume = 4, kIssue = 5 };

double find_bp(const std::vector<ReturnInjection>& inj, int offset) {
  double s = 0.0;
  for (const auto& i : inj) {
    if (i.offset == offset) s += i.bp;
  }
  return s * 1e-4;
}

double find_mult(const std::vector<VolumeInjection>& inj, int offset) {
  double m = 1.0;
  for (const auto& i : inj) {
    if (i.offset == offset) m *= i.multiplier;
  }
  return m;
}

}  // namespace

SimSpec parse_sim_spec(const std::string& text) {
  SimSpec s;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Config, fmt::format("sim spec line {}: expected key=value", lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "seed") {
      try {
        s.seed = std::stoull(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Config, "sim spec: seed must be a non-negative integer");
      }
    } else if (key == "n_securities") {
      s.n_securities = to_int(key, v);
    } else if (key == "n_days") {
      s.n_days = to_int(key, v);
    } else if (key == "intraday") {
      if (v != "true" && v != "false") throw Error(ErrorCode::Config, "sim spec: intraday must be true or false");
      s.intraday = v == "true";
    } else if (key == "sigma") {
      s.sigma = to_double(key, v);
    } else if (key == "intraday_sigma") {
      s.intraday_sigma = to_double(key, v);
    } else if (key == "beta") {
      s.beta = to_double(key, v);
    } else if (key == "beta_spread") {
      s.beta_spread = to_double(key, v);
    } else if (key == "smb_loading") {
      s.smb_loading = to_double(key, v);
    } else if (key == "hml_loading") {
      s.hml_loading = to_double(key, v);
    } else if (key == "mom_loading") {
      s.mom_loading = to_double(key, v);
    } else if (key == "event_day") {
      s.event_day = to_int(key, v);
    } else if (key == "announce_lag") {
      s.announce_lag = to_int(key, v);
    } else if (key == "leak_minute") {
      s.leak_minute = to_int(key, v);
    } else if (key == "daily_volume") {
      s.daily_volume = to_double(key, v);
    } else if (key == "intraday_volume") {
      s.intraday_volume = to_double(key, v);
    } else if (key == "volume_sigma") {
      s.volume_sigma = to_double(key, v);
    } else if (key == "shares_outstanding") {
      s.shares_outstanding = to_double(key, v);
    } else if (key == "regions") {
      s.regions = split(v, ',');
    } else if (key == "financial_share") {
      s.financial_share = to_double(key, v);
    } else if (key == "inject_return") {
      s.inject_return = to_injections<ReturnInjection>(key, v);
    } else if (key == "inject_volume") {
      s.inject_volume = to_injections<VolumeInjection>(key, v);
    } else if (key == "inject_intraday_return") {
      s.inject_intraday_return = to_injections<ReturnInjection>(key, v);
    } else if (key == "inject_intraday_volume") {
      s.inject_intraday_volume = to_injections<VolumeInjection>(key, v);
    } else {
      throw Error(ErrorCode::Config, fmt::format("sim spec line {}: unknown key '{}'", lineno, key));
    }
  }
  validate(s);
  return s;
}

SimSpec read_sim_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open sim spec '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sim_spec(ss.str());
}

int resolved_event_day(const SimSpec& spec) { return spec.event_day >= 0 ? spec.event_day : spec.n_days - 31; }

void validate(const SimSpec& s) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::Validation, "sim spec: " + m); };
  if (s.n_securities < 1) fail("n_securities must be >= 1");
  if (s.n_days < 2) fail("n_days must be >= 2");
  if (!(s.sigma > 0.0) || !(s.intraday_sigma > 0.0)) fail("sigma must be > 0");
  if (s.beta_spread < 0.0) fail("beta_spread must be >= 0");
  if (s.regions.empty()) fail("regions must not be empty");
  if (s.financial_share < 0.0 || s.financial_share > 1.0) fail("financial_share must be in [0,1]");
  if (!(s.daily_volume > 0.0) || !(s.intraday_volume > 0.0) || !(s.shares_outstanding > 0.0)) {
    fail("volumes and shares must be > 0");
  }
  if (s.volume_sigma < 0.0) fail("volume_sigma must be >= 0");
  if (s.announce_lag < 1) fail("announce_lag must be >= 1");
  if (s.leak_minute < -540 || s.leak_minute >= 480) fail("leak_minute must lie in [-540, 480)");
  const int e = resolved_event_day(s);
  if (e < 1 || e >= s.n_days) fail("event_day outside the simulated days");
  if (s.intraday && (e < 1 || e + 1 >= s.n_days)) fail("intraday needs a day on each side of the event");
  for (const auto& i : s.inject_volume) {
    if (!(i.multiplier > 0.0)) fail("volume multipliers must be > 0");
  }
  for (const auto& i : s.inject_intraday_volume) {
    if (!(i.multiplier > 0.0)) fail("volume multipliers must be > 0");
  }
}

SimDataset generate(const SimSpec& spec) {
  validate(spec);
  constexpr int kOpen = 9 * 60;
  constexpr int kClose = 17 * 60;
  constexpr int kBars = (kClose - kOpen) / 5;

  SimDataset ds{ExchangeCalendar(kSimExchange, "UTC", kOpen, kClose), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, 0, {}};
  const int E = resolved_event_day(spec);
  ds.event_day = E;

  for (Date d = make_date(2019, 1, 2); static_cast<int>(ds.trading_days.size()) < spec.n_days; d += std::chrono::days{1}) {
    if (ds.calendar.is_trading_day(d)) ds.trading_days.push_back(d);
  }
  const Date event_date = ds.trading_days[static_cast<std::size_t>(E)];
  const int leak_minute_of_day = kOpen + spec.leak_minute;
  ds.leak_ts = ds.calendar.local_instant(event_date, leak_minute_of_day);
  const int start_minute = spec.leak_minute <= 0 ? 0 : ((spec.leak_minute + 4) / 5) * 5;
  const Instant minute0 = ds.calendar.session_open(event_date) + std::chrono::minutes{start_minute};

  // Factors and market index.
  const CounterRng frng(spec.seed, kFactorStream);
  auto& index_daily = ds.index_daily[kSimIndex];
  double idx = 1000.0;
  for (int d = 0; d < spec.n_days; ++d) {
    FactorRow f;
    f.date = ds.trading_days[static_cast<std::size_t>(d)];
    const auto base = static_cast<std::uint64_t>(d) * 4;
    f.mkt_rf = 0.0003 + 0.01 * frng.normal(base);
    f.smb = 0.005 * frng.normal(base + 1);
    f.hml = 0.005 * frng.normal(base + 2);
    f.mom = 0.005 * frng.normal(base + 3);
    f.rf = 0.0001;
    if (d > 0) idx *= 1.0 + f.mkt_rf + f.rf;
    index_daily.push_back({f.date, idx});
    ds.factors.push_back(f);
  }

  // Intraday market index over the sessions around the event.
  std::vector<Date> intraday_days;
  std::vector<double> index_bar_returns;
  if (spec.intraday) {
    intraday_days = {ds.trading_days[static_cast<std::size_t>(E - 1)], event_date,
                     ds.trading_days[static_cast<std::size_t>(E + 1)]};
    const CounterRng irng(spec.seed, kIndexIntradayStream);
    auto& series = ds.index_intraday[kSimIndex];
    double p = 1000.0;
    std::uint64_t b = 0;
    for (Date day : intraday_days) {
      for (int k = 0; k < kBars; ++k, ++b) {
        const double r = b == 0 ? 0.0 : 0.0005 * irng.normal(b);
        p *= 1.0 + r;
        index_bar_returns.push_back(r);
        series.push_back({ds.calendar.local_instant(day, kOpen + 5 * k), p});
      }
    }
  }

  const Date announce_date = ds.trading_days.size() > static_cast<std::size_t>(E + spec.announce_lag)
                                 ? ds.trading_days[static_cast<std::size_t>(E + spec.announce_lag)]
                                 : ds.calendar.session_on_or_after(event_date + std::chrono::days{spec.announce_lag + 2});

  for (int k = 0; k < spec.n_securities; ++k) {
    RngStream meta(spec.seed, security_stream(k, kMeta));
    SimSecurity sec;
    sec.record.ticker = fmt::format("S{:04d}", k + 1);
    sec.record.exchange_id = kSimExchange;
    sec.record.region = spec.regions[static_cast<std::size_t>(k) % spec.regions.size()];
    sec.record.currency = "USD";
    sec.record.market_index = kSimIndex;
    const bool financial = meta.uniform() < spec.financial_share;
    sec.industry = financial ? "bank" : "industrials";
    sec.record.sector_class = financial ? SectorClass::Financial : SectorClass::NonFinancial;
    sec.beta = spec.beta + spec.beta_spread * (2.0 * meta.uniform() - 1.0);

    const CounterRng eps(spec.seed, security_stream(k, kDailyEps));
    const CounterRng vol(spec.seed, security_stream(k, kDailyVolume));
    auto& bars = ds.daily[sec.record.ticker];
    double price = 50.0;
    for (int d = 0; d < spec.n_days; ++d) {
      const auto& f = ds.factors[static_cast<std::size_t>(d)];
      if (d > 0) {
        double r = f.rf + sec.beta * f.mkt_rf + spec.smb_loading * f.smb + spec.hml_loading * f.hml +
                   spec.mom_loading * *f.mom + spec.sigma * eps.normal(static_cast<std::uint64_t>(d)) +
                   find_bp(spec.inject_return, d - E);
        r = std::max(r, -0.95);
        price *= 1.0 + r;
      }
      const double v = spec.daily_volume * std::exp(spec.volume_sigma * vol.normal(static_cast<std::uint64_t>(d))) *
                       find_mult(spec.inject_volume, d - E);
      bars.push_back({f.date, price, std::max(1.0, std::round(v)), spec.shares_outstanding});
    }

    if (spec.intraday) {
      const CounterRng ieps(spec.seed, security_stream(k, kIntradayEps));
      const CounterRng ivol(spec.seed, security_stream(k, kIntradayVolume));
      auto& ibars = ds.intraday[sec.record.ticker];
      double p = 50.0;
      std::uint64_t b = 0;
      for (Date day : intraday_days) {
        for (int j = 0; j < kBars; ++j, ++b) {
          const Instant t = ds.calendar.local_instant(day, kOpen + 5 * j);
          int offset = -1;
          if (t >= minute0) offset = static_cast<int>((t - minute0) / std::chrono::minutes{1}) + 5;
          if (b > 0) {
            double r = sec.beta * index_bar_returns[b] + spec.intraday_sigma * ieps.normal(b);
            if (day == event_date && offset > 0) r += find_bp(spec.inject_intraday_return, offset);
            p *= 1.0 + std::max(r, -0.95);
          }
          double v = spec.intraday_volume * std::exp(spec.volume_sigma * ivol.normal(b));
          if (day == event_date && offset > 0) v *= find_mult(spec.inject_intraday_volume, offset);
          ibars.push_back({t, p, std::round(v)});
        }
      }
    }

    RngStream issue(spec.seed, security_stream(k, kIssue));
    Headline h;
    h.feed = k % 2 == 0 ? "wire-a" : "wire-b";
    h.timestamp = ds.leak_ts;
    h.text = fmt::format("{} Mandate: Green bond issue planned", sec.record.ticker);
    h.article_chars = issue.uniform_int(300, 2000);
    h.tickers = {sec.record.ticker};
    h.green_label = true;
    ds.headlines.push_back(h);

    const int n_bonds = issue.uniform_int(1, 3);
    for (int b = 0; b < n_bonds; ++b) {
      RawAnnouncement a;
      a.ticker = sec.record.ticker;
      a.announce_date = announce_date;
      a.currency = "USD";
      a.amount = std::round(500.0 / n_bonds * std::exp(0.5 * issue.normal()) * 100.0) / 100.0;
      a.maturity_date = announce_date + std::chrono::days{365 * issue.uniform_int(3, 12)};
      a.coupon_pct = std::round((1.0 + 3.0 * issue.uniform()) * 1000.0) / 1000.0;
      a.has_option = issue.uniform() < 0.3;
      ds.announcements.push_back(a);
    }

    const int year = year_of(announce_date);
    const double mktcap = 5000.0 * std::exp(issue.normal());
    for (int fy = year - 3; fy < year; ++fy) {
      FundamentalsFiling f;
      f.ticker = sec.record.ticker;
      f.fiscal_year = fy;
      f.mktcap = std::round(mktcap * (1.0 + 0.1 * issue.normal()) * 100.0) / 100.0;
      f.assets = std::round(f.mktcap * (1.0 + issue.uniform()) * 100.0) / 100.0;
      f.roa = std::round(5.0 * issue.normal() * 1000.0) / 1000.0;
      f.de = std::round(2.0 * issue.uniform() * 1000.0) / 1000.0;
      f.fcf = std::round(200.0 * issue.normal() * 100.0) / 100.0;
      f.first_time_issuer = issue.uniform() < 0.5;
      if (f.mktcap <= 0.0) f.mktcap = 1.0;
      ds.fundamentals.push_back(f);
    }
    FundamentalsFiling ttm = ds.fundamentals.back();
    ttm.period = FilingPeriod::Trailing12M;
    ds.fundamentals.push_back(ttm);

    ds.securities.push_back(std::move(sec));
  }
  return ds;
}

namespace {

std::string num(double x) { return fmt::format("{}", x); }
std::string flag(bool b) { return b ? "true" : "false"; }

std::string clock(int minute) { return fmt::format("{:02d}:{:02d}", minute / 60, minute % 60); }

class FileOut {
public:
  explicit FileOut(const std::filesystem::path& p) : out_(p, std::ios::binary), csv_(out_), path_(p) {
    if (!out_) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", p.string()));
  }
  ~FileOut() = default;
  CsvWriter& csv() { return csv_; }
  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::Io, fmt::format("failed writing '{}'", path_.string()));
  }

private:
  std::ofstream out_;
  CsvWriter csv_;
  std::filesystem::path path_;
};

}  // namespace

void write_dataset(const SimDataset& data, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create '{}': {}", dir, ec.message()));

  {
    FileOut f(root / "calendar.csv");
    const auto& c = data.calendar;
    f.csv().row({"exchange_id", "timezone", "open", "close", "holiday_dates"});
    f.csv().row({c.exchange_id(), c.timezone_name(), clock(c.open_minute()),
                 clock(c.close_minute(data.trading_days.front())), ""});
    f.close();
  }
  {
    FileOut f(root / "securities.csv");
    f.csv().row({"ticker", "exchange_id", "region", "industry", "currency", "market_index"});
    for (const auto& s : data.securities) {
      f.csv().row({s.record.ticker, s.record.exchange_id, s.record.region, s.industry, s.record.currency,
                   s.record.market_index});
    }
    f.close();
  }
  {
    FileOut f(root / "prices_daily.csv");
    f.csv().row({"ticker", "date", "close", "volume", "shares_outstanding"});
    for (const auto& [ticker, bars] : data.daily) {
      for (const auto& b : bars) {
        f.csv().row({ticker, format_date(b.date), num(b.close), num(b.volume), num(b.shares_outstanding)});
      }
    }
    f.close();
  }
  {
    FileOut f(root / "prices_intraday.csv");
    f.csv().row({"ticker", "timestamp", "price", "volume"});
    for (const auto& [ticker, bars] : data.intraday) {
      for (const auto& b : bars) f.csv().row({ticker, format_instant(b.timestamp), num(b.price), num(b.volume)});
    }
    f.close();
  }
  {
    FileOut f(root / "index_daily.csv");
    f.csv().row({"index", "date", "close"});
    for (const auto& [name, bars] : data.index_daily) {
      for (const auto& b : bars) f.csv().row({name, format_date(b.date), num(b.close)});
    }
    f.close();
  }
  {
    FileOut f(root / "index_intraday.csv");
    f.csv().row({"index", "timestamp", "price"});
    for (const auto& [name, bars] : data.index_intraday) {
      for (const auto& b : bars) f.csv().row({name, format_instant(b.timestamp), num(b.price)});
    }
    f.close();
  }
  std::vector<std::string> regions;
  for (const auto& s : data.securities) {
    if (std::find(regions.begin(), regions.end(), s.record.region) == regions.end()) {
      regions.push_back(s.record.region);
    }
  }
  for (const auto& region : regions) {
    FileOut f(root / fmt::format("factors_{}.csv", region));
    f.csv().row({"date", "mkt_rf", "smb", "hml", "mom", "rf"});
    for (const auto& r : data.factors) {
      f.csv().row({format_date(r.date), num(r.mkt_rf), num(r.smb), num(r.hml), r.mom ? num(*r.mom) : "", num(r.rf)});
    }
    f.close();
  }
  {
    FileOut f(root / "headlines.csv");
    f.csv().row({"feed", "timestamp", "headline", "article_chars", "tickers", "green_label"});
    for (const auto& h : data.headlines) {
      std::string tickers;
      for (const auto& t : h.tickers) tickers += (tickers.empty() ? "" : ";") + t;
      f.csv().row({h.feed, format_instant(h.timestamp), h.text, std::to_string(h.article_chars), tickers,
                   flag(h.green_label)});
    }
    f.close();
  }
  {
    FileOut f(root / "announcements.csv");
    f.csv().row({"ticker", "announce_date", "currency", "amount", "maturity_date", "perpetual", "coupon_pct",
                 "has_option", "yield"});
    for (const auto& a : data.announcements) {
      f.csv().row({a.ticker, format_date(a.announce_date), a.currency, num(a.amount),
                   a.maturity_date ? format_date(*a.maturity_date) : "", flag(a.perpetual), num(a.coupon_pct),
                   flag(a.has_option), a.yield ? num(*a.yield) : ""});
    }
    f.close();
  }
  {
    FileOut f(root / "fundamentals.csv");
    f.csv().row({"ticker", "fiscal_year", "period", "mktcap", "assets", "roa", "de", "fcf", "first_time_issuer"});
    for (const auto& r : data.fundamentals) {
      f.csv().row({r.ticker, std::to_string(r.fiscal_year), r.period == FilingPeriod::Trailing12M ? "TTM" : "FY",
                   num(r.mktcap), num(r.assets), num(r.roa), num(r.de), num(r.fcf), flag(r.first_time_issuer)});
    }
    f.close();
  }
  {
    FileOut f(root / "fx.csv");
    f.csv().row({"pair", "timestamp", "rate"});
    f.close();
  }
}

PowerSizeResult power_size(const SimSpec& spec, const PowerSizeConfig& config) {
  if (config.trials < 100) throw Error(ErrorCode::Validation, "power_size needs at least 100 trials");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error(ErrorCode::Validation, "alpha must be in (0,1)");
  validate(spec);

  struct Trial {
    double estimate = 0.0;
    double std_err = 0.0;
    bool reject = false;
  };
  const auto trials = parallel_map(static_cast<std::size_t>(config.trials), config.workers, [&](std::size_t t) {
    SimSpec s = spec;
    s.seed = derive_seed(spec.seed, t);
    s.intraday = false;
    const SimDataset ds = generate(s);

    std::map<std::string, SecurityRecord> securities;
    std::map<std::string, FactorTable> factors;
    for (const auto& sec : ds.securities) {
      securities.emplace(sec.record.ticker, sec.record);
      if (!factors.count(sec.record.region)) factors.emplace(sec.record.region, FactorTable(ds.factors));
    }
    const std::map<std::string, ExchangeCalendar> calendars{{kSimExchange, ds.calendar}};
    MarketData md;
    md.securities = &securities;
    md.calendars = &calendars;
    md.daily = &ds.daily;
    md.index_daily = &ds.index_daily;
    md.factors = &factors;

    std::vector<EventInput> events;
    const Date day0 = ds.trading_days[static_cast<std::size_t>(ds.event_day)];
    for (const auto& sec : ds.securities) {
      EventInput in;
      in.event.ticker = sec.record.ticker;
      in.event.anchor = ds.leak_ts;
      in.day0 = day0;
      in.intraday_start = ds.leak_ts;
      events.push_back(in);
    }
    const ModelSpec model = ModelSpec::for_anchor(config.model, AnchorRole::Leak);
    const auto build =
        daily_ar_panel(events, md, model, RelativeWindow{config.test_offset, config.test_offset}, 1);
    const auto row = aar(build.panel, config.test_offset, Tail::OneSided);
    if (!row.test.has_inference()) throw Error(ErrorCode::InferenceUnavailable, "power trial without inference");

    const double tstat = *row.test.t;
    const double df = row.test.n - 1.0;
    const boost::math::students_t dist(df);
    double p = 0.0;
    switch (config.alternative) {
      case Alternative::Less: p = std::isinf(tstat) ? (tstat < 0 ? 0.0 : 1.0) : boost::math::cdf(dist, tstat); break;
      case Alternative::Greater:
        p = std::isinf(tstat) ? (tstat > 0 ? 0.0 : 1.0) : boost::math::cdf(boost::math::complement(dist, tstat));
        break;
      case Alternative::TwoSided: p = *row.test.p * 2.0; break;
      case Alternative::EstimateSign: p = *row.test.p; break;
    }
    return Trial{row.test.estimate, *row.test.std_err, p < config.alpha};
  });

  PowerSizeResult out;
  out.trials = config.trials;
  double sum = 0.0;
  double sum_se = 0.0;
  for (const auto& t : trials) {
    out.rejections += t.reject ? 1 : 0;
    sum += t.estimate;
    sum_se += t.std_err;
    if (std::fabs(t.estimate - config.truth) <= 2.0 * t.std_err) ++out.covered;
  }
  const double n = static_cast<double>(trials.size());
  out.rejection_rate = out.rejections / n;
  out.mean_estimate = sum / n;
  out.mean_std_err = sum_se / n;
  double ss = 0.0;
  for (const auto& t : trials) ss += (t.estimate - out.mean_estimate) * (t.estimate - out.mean_estimate);
  out.sd_estimate = std::sqrt(ss / (n - 1.0));
  return out;
}

}  // namespace leakstudy
