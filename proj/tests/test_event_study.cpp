#include <doctest.h>

#include <cmath>

#include "leakstudy/error.hpp"
#include "leakstudy/event_study.hpp"
#include "leakstudy/inference.hpp"
#include "leakstudy/rng.hpp"
#include "support.hpp"

using namespace leakstudy;

namespace {

EventPanel random_panel(std::uint64_t seed, int events, std::vector<int> offsets, double missing_share) {
  RngStream g(seed, 0);
  EventPanel p(offsets);
  for (int e = 0; e < events; ++e) {
    std::vector<std::optional<double>> cells;
    for (std::size_t c = 0; c < offsets.size(); ++c) {
      if (g.uniform() < missing_share) {
        cells.emplace_back();
      } else {
        cells.emplace_back(g.normal(-0.001, 0.02));
      }
    }
    PanelEvent ev;
    ev.ticker = "T" + std::to_string(e);
    ev.timing = e % 3 ? LeakTiming::LateMarket : LeakTiming::EarlyMarket;
    ev.sector = e % 2 ? SectorClass::Financial : SectorClass::NonFinancial;
    p.add_event(ev, cells);
  }
  return p;
}

}  // namespace

TEST_CASE("mean test conventions") {
  const std::vector<double> xs{0.01, -0.02, 0.005, 0.0, -0.01};
  const auto m = mean_test(xs);
  REQUIRE(m.has_inference());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= 5.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  CHECK(m.estimate == doctest::Approx(mean));
  CHECK(*m.std_err == doctest::Approx(std::sqrt(ss / 4.0 / 5.0)));
  CHECK(*m.p == doctest::Approx(testsupport::t_upper_tail_oracle(*m.t, 4.0)).epsilon(1e-6));
  CHECK(*mean_test(xs, Tail::TwoSided).p == doctest::Approx(2.0 * *m.p));

  const std::vector<double> one{0.3};
  CHECK_FALSE(mean_test(one).has_inference());
  const std::vector<double> flat{0.25, 0.25, 0.25};
  const auto f = mean_test(flat);
  CHECK(std::isinf(*f.t));
  CHECK(*f.p == 0.0);
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(*mean_test(zeros).p == 0.5);
}

TEST_CASE("t p-values agree with numerical integration") {
  for (double df : {5.0, 30.0, 213.0}) {
    for (double t : {-3.1, -1.2, -0.05, 0.4, 2.2}) {
      CHECK(t_p_value(t, df, Tail::OneSided) ==
            doctest::Approx(testsupport::t_upper_tail_oracle(t, df)).epsilon(1e-7));
    }
  }
  CHECK_THROWS_AS(t_p_value(1.0, 0.0, Tail::OneSided), Error);
}

TEST_CASE("panel structure") {
  CHECK_THROWS_AS(EventPanel({0, 2, 1}), Error);
  CHECK_THROWS_AS(EventPanel({0, 0}), Error);
  EventPanel p({-1, 0, 1});
  CHECK_THROWS_AS(p.add_event(PanelEvent{}, {0.1}), Error);
  CHECK_THROWS_AS(p.column(5), Error);
}

TEST_CASE("CAAR equals the sum of AARs on complete panels") {
  const auto p = random_panel(8, 120, {-3, -2, -1, 0, 1, 2, 3}, 0.0);
  for (const RelativeWindow w : {RelativeWindow{0, 1}, RelativeWindow{-3, 3}, RelativeWindow{-1, 2}}) {
    double sum = 0.0;
    for (int t = w.first; t <= w.last; ++t) sum += aar(p, t).test.estimate;
    CHECK(std::fabs(caar(p, w).test.estimate - sum) < 1e-12);
  }
}

TEST_CASE("CAAR uses complete cases only") {
  EventPanel p({0, 1});
  p.add_event(PanelEvent{"A"}, {0.01, 0.02});
  p.add_event(PanelEvent{"B"}, {0.03, std::nullopt});
  p.add_event(PanelEvent{"C"}, {-0.01, 0.0});
  const auto c = caar(p, {0, 1});
  CHECK(c.test.n == 2);
  CHECK(c.test.estimate == doctest::Approx(0.01));
  CHECK(aar(p, 0).test.n == 3);
}

TEST_CASE("window arithmetic") {
  const auto rest = window_remainder({{-3, 3}, -67.0}, {{0, 3}, -33.0});
  CHECK(rest.window == RelativeWindow{-3, -1});
  CHECK(rest.estimate == -34.0);
  const auto tail = window_remainder({{0, 10}, 5.0}, {{0, 2}, 2.0});
  CHECK(tail.window == RelativeWindow{3, 10});
  CHECK_THROWS_AS(window_remainder({{0, 10}, 0.0}, {{2, 4}, 0.0}), Error);
  CHECK_THROWS_AS(window_remainder({{0, 3}, 0.0}, {{-1, 3}, 0.0}), Error);

  const auto p = random_panel(9, 50, {-3, -2, -1, 0, 1, 2, 3}, 0.0);
  const auto outer = caar(p, {-3, 3});
  const auto inner = caar(p, {0, 3});
  const auto direct = caar(p, {-3, -1});
  const auto derived = window_remainder({outer.window, outer.test.estimate}, {inner.window, inner.test.estimate});
  CHECK(std::fabs(derived.estimate - direct.test.estimate) < 1e-12);
}

TEST_CASE("windows and labels") {
  CHECK(window_label({2, 2}) == "2");
  CHECK(window_label({-3, 3}) == "[-3,3]");
  for (const auto& w : daily_window_presets(AnchorRole::Leak)) CHECK(w.first >= 0);
  CHECK(daily_window_presets(AnchorRole::Announcement).size() == 11);
  const auto offs = intraday_offsets();
  CHECK(offs.front() == 5);
  CHECK(offs.back() == 480);
  CHECK(offs.size() == 19);
}

TEST_CASE("scaling returns scales estimates and keeps t") {
  const auto p = random_panel(10, 80, {0, 1, 2}, 0.1);
  EventPanel scaled({0, 1, 2});
  for (std::size_t e = 0; e < p.size(); ++e) {
    std::vector<std::optional<double>> cells;
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& v = p.cell(e, c);
      cells.push_back(v ? std::optional<double>(*v * 100.0) : std::nullopt);
    }
    scaled.add_event(p.events()[e], cells);
  }
  const auto a = caar(p, {0, 2});
  const auto b = caar(scaled, {0, 2});
  CHECK(b.test.estimate == doctest::Approx(100.0 * a.test.estimate));
  CHECK(*b.test.t == doctest::Approx(*a.test.t).epsilon(1e-12));
}

TEST_CASE("splits partition the panel") {
  const auto p = random_panel(12, 30, {0}, 0.0);
  for (Split s : {Split::Timing, Split::Sector}) {
    const auto groups = split_panel(p, s);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].panel.size() + groups[1].panel.size() == p.size());
  }
  CHECK(split_panel(p, Split::All)[0].label == "all");
  CHECK(split_panel(p, Split::Timing)[0].label == "early");
  CHECK_THROWS_AS(parse_split("region"), Error);
}

TEST_CASE("volume math") {
  SUBCASE("doubling daily volume") {
    std::vector<std::optional<double>> base;
    for (int i = 0; i < kDailyBaseline; ++i) base.emplace_back(log_turnover(5000.0, 1e6, TurnoverScope::Daily));
    const double b = baseline_mean(base, kDailyBaseline);
    const double xi = abnormal_volume(log_turnover(10000.0, 1e6, TurnoverScope::Daily), b);
    CHECK(std::fabs(xi - std::log(2.0)) < 1e-12);
    CHECK(display_percent(xi) == doctest::Approx(100.0).epsilon(1e-12));
  }
  SUBCASE("intraday uses log(1 + v)") {
    CHECK(log_turnover(0.0, 0.0, TurnoverScope::Intraday) == 0.0);
    CHECK(log_turnover(std::expm1(3.0), 0.0, TurnoverScope::Intraday) == doctest::Approx(3.0));
  }
  SUBCASE("zero daily volume is undefined") {
    try {
      log_turnover(0.0, 1e6, TurnoverScope::Daily);
      FAIL("expected undefined turnover");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UndefinedTurnover);
    }
  }
  SUBCASE("baseline needs half its periods") {
    std::vector<std::optional<double>> base(20);
    for (int i = 0; i < 9; ++i) base[static_cast<std::size_t>(i)] = 1.0;
    CHECK_THROWS_AS(baseline_mean(base, 20), Error);
    base[9] = 1.0;
    CHECK(baseline_mean(base, 20) == 1.0);
  }
  SUBCASE("CAAV accumulates from the first offset") {
    EventPanel p({0, 1, 2});
    p.add_event(PanelEvent{"A"}, {0.1, 0.2, 0.3});
    p.add_event(PanelEvent{"B"}, {0.3, 0.0, -0.1});
    const auto rows = aav_caav(p, {0, 2});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].aav.test.estimate == doctest::Approx(0.2));
    CHECK(rows[1].caav.test.estimate == doctest::Approx(0.4));
  }
}
