#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "leakstudy/error.hpp"
#include "leakstudy/event_study.hpp"
#include "leakstudy/panel_builder.hpp"
#include "leakstudy/pipeline.hpp"
#include "leakstudy/simkit.hpp"

using namespace leakstudy;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("leakstudy_test_" + name);
  fs::remove_all(p);
  return p;
}

struct Loaded {
  RunConfig cfg;
  Inputs in;
  Sample sample;
};

Loaded load(const fs::path& dir) {
  Loaded l;
  l.cfg.data_dir = dir.string();
  finalize_config(l.cfg);
  l.in = load_inputs(l.cfg);
  l.sample = run_match(l.in, l.cfg, true);
  return l;
}

}  // namespace

TEST_CASE("spec parsing") {
  const auto s = parse_sim_spec(
      "# comment\nseed = 9\nn_securities=12\nintraday=true\ninject_return = 2:-21, 0:5\n"
      "inject_intraday_volume=5:2.0\nregions=US,EU\n");
  CHECK(s.seed == 9);
  CHECK(s.n_securities == 12);
  CHECK(s.intraday);
  REQUIRE(s.inject_return.size() == 2);
  CHECK(s.inject_return[0].offset == 2);
  CHECK(s.inject_return[0].bp == -21.0);
  CHECK(s.inject_intraday_volume[0].multiplier == 2.0);
  CHECK(s.regions == std::vector<std::string>{"US", "EU"});
  CHECK_THROWS_AS(parse_sim_spec("bogus=1\n"), Error);
  CHECK_THROWS_AS(parse_sim_spec("sigma=abc\n"), Error);
  SimSpec bad;
  bad.event_day = 5000;
  CHECK_THROWS_AS(generate(bad), Error);
}

TEST_CASE("generation is deterministic per seed") {
  SimSpec s;
  s.n_securities = 4;
  s.n_days = 150;
  s.intraday = true;
  const auto a = generate(s);
  const auto b = generate(s);
  CHECK(a.daily.at("S0002").back().close == b.daily.at("S0002").back().close);
  CHECK(a.intraday.at("S0003")[100].price == b.intraday.at("S0003")[100].price);
  s.seed = 2;
  const auto c = generate(s);
  CHECK(a.daily.at("S0002").back().close != c.daily.at("S0002").back().close);

  // Adding securities leaves existing streams untouched.
  SimSpec more = s;
  more.n_securities = 6;
  CHECK(generate(more).daily.at("S0002").back().close == c.daily.at("S0002").back().close);
  CHECK(a.event_day == 150 - 31);
}

TEST_CASE("daily injection recovered with negligible noise") {
  SimSpec s;
  s.n_securities = 20;
  s.sigma = 1e-12;
  s.inject_return = {{2, -21.0}, {0, 7.0}};
  const auto ds = generate(s);
  std::map<std::string, SecurityRecord> securities;
  for (const auto& sec : ds.securities) securities.emplace(sec.record.ticker, sec.record);
  const std::map<std::string, ExchangeCalendar> calendars{{kSimExchange, ds.calendar}};
  const std::map<std::string, FactorTable> factors{{"US", FactorTable(ds.factors)}};
  MarketData md;
  md.securities = &securities;
  md.calendars = &calendars;
  md.daily = &ds.daily;
  md.index_daily = &ds.index_daily;
  md.factors = &factors;
  std::vector<EventInput> events;
  for (const auto& sec : ds.securities) {
    EventInput in;
    in.event.ticker = sec.record.ticker;
    in.event.anchor = ds.leak_ts;
    in.day0 = ds.trading_days[static_cast<std::size_t>(ds.event_day)];
    events.push_back(in);
  }
  for (ModelKind k : {ModelKind::MarketAdjusted, ModelKind::CAPM, ModelKind::FF3, ModelKind::Carhart}) {
    const auto build = daily_ar_panel(events, md, ModelSpec::for_anchor(k, AnchorRole::Leak), {-1, 3});
    CHECK(build.panel.size() == 20);
    CHECK(std::fabs(aar(build.panel, 2).test.estimate + 0.0021) < 1e-8);
    CHECK(std::fabs(aar(build.panel, 0).test.estimate - 0.0007) < 1e-8);
    CHECK(std::fabs(aar(build.panel, 1).test.estimate) < 1e-8);
  }
}

TEST_CASE("power_size guards") {
  SimSpec s;
  PowerSizeConfig c;
  c.trials = 99;
  CHECK_THROWS_AS(power_size(s, c), Error);
  c.trials = 100;
  c.alpha = 1.0;
  CHECK_THROWS_AS(power_size(s, c), Error);
}

TEST_CASE("written dataset round-trips through ingest and the pipeline") {
  SimSpec s;
  s.n_securities = 30;
  s.n_days = 200;
  s.intraday = true;
  s.regions = {"US", "EU"};
  s.inject_intraday_return = {{5, -30.0}, {60, -10.0}};
  s.inject_intraday_volume = {{5, 2.0}};
  s.inject_volume = {{0, 2.0}};
  s.intraday_sigma = 1e-9;
  s.volume_sigma = 0.0;
  const auto ds = generate(s);
  const auto dir = scratch("roundtrip");
  write_dataset(ds, dir.string());
  const auto l = load(dir);

  CHECK(l.in.daily.at("S0001").size() == 200);
  CHECK(l.in.daily.at("S0001")[57].close == ds.daily.at("S0001")[57].close);
  CHECK(l.in.factors.size() == 2);
  CHECK(l.sample.funnel.candidates == 30);
  CHECK(l.sample.study.size() == 30);
  for (const auto& leak : l.sample.study) CHECK(leak.timing == LeakTiming::EarlyMarket);

  const auto md = l.in.market_data();
  const auto inputs = event_inputs(l.sample.study, l.in, AnchorRole::Leak);

  SUBCASE("intraday CAR sees the injected bars") {
    const auto build = intraday_car_panel(inputs, md);
    REQUIRE(build.panel.size() == 30);
    const auto rows = intraday_caar(build.panel, intraday_offsets());
    // Price moves compound on the bar path, so allow for cross terms.
    CHECK(rows[0].test.estimate == doctest::Approx(-0.0030).epsilon(1e-3));
    CHECK(rows[11].test.estimate == doctest::Approx(-0.0040).epsilon(2e-3));
    CHECK(rows[17].test.estimate == doctest::Approx(-0.0040).epsilon(2e-3));
    CHECK(rows.back().test.n == 0);
  }
  SUBCASE("intraday availability stops at the session close") {
    const auto build = intraday_car_panel(inputs, md);
    const auto& offs = build.panel.offsets();
    for (std::size_t e = 0; e < build.panel.size(); ++e) {
      bool seen_gap = false;
      for (std::size_t c = 0; c < offs.size(); ++c) {
        const bool has = build.panel.cell(e, c).has_value();
        if (seen_gap) CHECK_FALSE(has);
        seen_gap = seen_gap || !has;
      }
    }
    // 09:30 start leaves 450 minutes in an eight-hour session.
    CHECK(build.panel.column_values(450).size() == 30);
    CHECK(build.panel.column_values(455).empty());
  }
  SUBCASE("volume panels") {
    const auto daily = daily_volume_panel(inputs, md, {0, 2});
    CHECK(aar(daily.panel, 0).test.estimate == doctest::Approx(std::log(2.0)).epsilon(1e-3));
    CHECK(std::fabs(aar(daily.panel, 1).test.estimate) < 1e-3);
    const auto intra = intraday_volume_panel(inputs, md);
    REQUIRE(intra.panel.size() == 30);
    CHECK(aar(intra.panel, 5).test.estimate == doctest::Approx(std::log(4001.0 / 2001.0)).epsilon(1e-3));
    CHECK(std::fabs(aar(intra.panel, 10).test.estimate) < 1e-9);
  }
  fs::remove_all(dir);
}
