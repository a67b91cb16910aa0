#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "leakstudy/calendar.hpp"
#include "leakstudy/cross_section.hpp"
#include "leakstudy/leak_matcher.hpp"
#include "leakstudy/rng.hpp"

namespace testsupport {

using namespace leakstudy;

inline ExchangeCalendar nyse() {
  return ExchangeCalendar("XNYS", "America/New_York", 9 * 60 + 30, 16 * 60,
                          {make_date(2021, 7, 5), make_date(2021, 12, 24)}, {6, 7},
                          {{make_date(2021, 11, 26), 13 * 60}});
}

inline std::map<std::string, ExchangeCalendar> calendars() { return {{"XNYS", nyse()}}; }

inline SecurityRecord security(const std::string& ticker, const std::string& region = "US",
                               SectorClass sector = SectorClass::NonFinancial) {
  return SecurityRecord{ticker, "XNYS", region, sector, "USD", "SPX"};
}

// New York wall clock to an instant (EDT/EST handled by the zone database).
inline Instant ny(int y, unsigned m, unsigned d, int hh, int mm) {
  return nyse().local_instant(make_date(y, m, d), hh * 60 + mm);
}

inline Headline headline(const std::string& ticker, Instant ts, std::string text = "",
                         long long chars = 500, std::string feed = "wire-a") {
  Headline h;
  h.feed = std::move(feed);
  h.timestamp = ts;
  h.text = text.empty() ? ticker + " Mandate: Green bond planned" : std::move(text);
  h.article_chars = chars;
  h.tickers = {ticker};
  h.green_label = true;
  return h;
}

inline AnnouncementEvent announcement(const std::string& ticker, Date d) {
  AnnouncementEvent e;
  e.ticker = ticker;
  e.announce_date = d;
  e.bonds.push_back(BondRecord{"USD", 500.0, 10.0, 2.5, false, false});
  return e;
}

// Five-minute bars for one session with the given per-bar volume.
inline std::vector<IntradayBar> session_bars(const ExchangeCalendar& cal, Date d, double volume) {
  std::vector<IntradayBar> out;
  const Instant open = cal.session_open(d);
  const Instant close = cal.session_close(d);
  for (Instant t = open; t < close; t += std::chrono::minutes{5}) out.push_back({t, 10.0, volume});
  return out;
}

// Cross-section with ten covariates and time-of-day, weekday, year and region
// categories. The response is generated from the full fixed-effect design with
// coefficients drawn once per seed; `truth` maps design column names to them.
struct SyntheticCrossSection {
  std::vector<CrossSectionEvent> events;
  std::map<std::string, double> truth;
};

inline const std::vector<FixedEffect>& full_effects() {
  static const std::vector<FixedEffect> kAll{FixedEffect::TimeOfDay, FixedEffect::DayOfWeek, FixedEffect::Year,
                                             FixedEffect::Region};
  return kAll;
}

inline SyntheticCrossSection synthetic_cross_section(std::uint64_t seed, int n, double noise_sd) {
  RngStream g(seed, 0);
  SyntheticCrossSection out;
  const std::vector<std::string> regions{"EU", "NA", "APAC"};
  for (int i = 0; i < n; ++i) {
    CrossSectionEvent e;
    e.ticker = "S" + std::to_string(i);
    e.car = 0.0;
    e.issue.size_usd = std::exp(g.normal(6.0, 1.0));
    e.issue.avg_term = 2.0 + 15.0 * g.uniform();
    e.issue.avg_coupon = 0.5 + 4.0 * g.uniform();
    e.issue.has_option = g.uniform() < 0.4;
    e.issue.n_bonds = g.uniform_int(1, 4);
    FirmFundamentals f;
    f.fti = g.uniform() < 0.5;
    f.roa = g.normal(3.0, 3.0);
    f.de = std::exp(g.normal(0.0, 0.7));
    f.fcf_usd = g.normal(0.0, 2000.0);
    f.mktcap_usd = std::exp(g.normal(9.0, 1.0));
    f.assets_usd = std::exp(g.normal(9.5, 1.0));
    f.tobins_q = f.mktcap_usd / f.assets_usd;
    e.firm = f;
    e.time_of_day = static_cast<TimeOfDay>(g.uniform_int(0, 4));
    e.weekday = static_cast<unsigned>(g.uniform_int(1, 5));
    e.year = 2018 + g.uniform_int(0, 3);
    e.region = regions[static_cast<std::size_t>(g.uniform_int(0, 2))];
    e.sector = g.uniform() < 0.5 ? SectorClass::Financial : SectorClass::NonFinancial;
    out.events.push_back(e);
  }
  const auto design = build_design(out.events, DesignSpec{full_effects(), std::nullopt, false});
  Eigen::VectorXd b(design.X.cols());
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    b(j) = g.normal(0.0, 0.5);
    out.truth[design.names[static_cast<std::size_t>(j)]] = b(j);
  }
  const Eigen::VectorXd mean = design.X * b;
  for (int i = 0; i < n; ++i) out.events[static_cast<std::size_t>(i)].car = mean(i) + noise_sd * g.normal();
  return out;
}

// --- Oracles -------------------------------------------------------------

using Big = boost::multiprecision::cpp_bin_float_50;

// Normal equations (X'X) b = X'y solved by Gauss-Jordan elimination with
// partial pivoting in 50-digit arithmetic.
inline std::vector<double> normal_equations_oracle(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  std::vector<std::vector<Big>> a(p, std::vector<Big>(p + 1, Big(0)));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      Big s = 0;
      for (int r = 0; r < n; ++r) s += Big(X(r, i)) * Big(X(r, j));
      a[i][j] = s;
    }
    Big s = 0;
    for (int r = 0; r < n; ++r) s += Big(X(r, i)) * Big(y(r));
    a[i][p] = s;
  }
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int r = c + 1; r < p; ++r) {
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (int r = 0; r < p; ++r) {
      if (r == c) continue;
      const Big f = a[r][c] / a[c][c];
      for (int k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> b(p);
  for (int i = 0; i < p; ++i) b[i] = static_cast<double>(a[i][p] / a[i][i]);
  return b;
}

// Upper tail of Student's t by composite Simpson integration of the density
// on [|t|, |t| + 60], which leaves a negligible remainder for df >= 5.
inline double t_upper_tail_oracle(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto f = [&](double x) { return c * std::pow(1.0 + x * x / df, -(df + 1) / 2); };
  const double a = std::fabs(t);
  const double b = a + 60.0;
  const int m = 200000;
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Standard normal CDF, for analytic power approximations.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace testsupport
