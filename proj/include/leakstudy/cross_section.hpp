#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leakstudy/calendar.hpp"
#include "leakstudy/domain.hpp"
#include "leakstudy/ingest.hpp"
#include "leakstudy/leak_matcher.hpp"

namespace leakstudy {

enum class TimeOfDay { PreMarket, FirstHour, MidSession, LastHour, PostMarket };

std::string_view to_string(TimeOfDay t);

// Non-trading-day leaks are treated as pre-market for the next session.
TimeOfDay time_of_day_bucket(const SessionPosition& pos, int session_minutes);

// sign(x) ln(1 + |x|).
double signed_log(double x);

struct CrossSectionEvent {
  std::string ticker;
  std::optional<double> car;
  IssueAggregates issue;
  std::optional<FirmFundamentals> firm;
  TimeOfDay time_of_day = TimeOfDay::MidSession;
  unsigned weekday = 1;  // ISO, of the leak's local date
  int year = 0;
  std::string region;
  SectorClass sector = SectorClass::NonFinancial;
};

enum class FixedEffect { TimeOfDay, DayOfWeek, Year, Region };

std::string_view to_string(FixedEffect fe);
// Comma-separated subset of timeofday, day, year, region.
std::vector<FixedEffect> parse_fixed_effects(std::string_view text);

struct DesignSpec {
  std::vector<FixedEffect> fixed_effects;
  std::optional<SectorClass> sample;
  // Adds ln MktCap and ln Assets; off to mirror the published covariate set.
  bool size_controls = false;
};

// Covariate order of the default design.
const std::vector<std::string>& covariate_names();

struct RegressionDesign {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;  // column 0 is the constant
  std::vector<std::string> names;
  std::vector<std::string> tickers;
  std::size_t dropped_incomplete = 0;
};

// Complete-case design with transforms and reference-dropped dummies (the
// first category in sorted order is the reference).
RegressionDesign build_design(const std::vector<CrossSectionEvent>& events, const DesignSpec& spec);

struct CoefficientRow {
  std::string term;
  double coefficient = 0.0;
  double std_err = 0.0;
  double t = 0.0;
  double p = 1.0;  // two-sided
  std::string stars;
};

struct RegressionTable {
  std::vector<CoefficientRow> rows;
  double r2 = 0.0;
  std::optional<double> f_stat;
  std::optional<double> f_p_value;
  int n = 0;
};

// "***" below 1%, "**" below 5%, "*" below 10%.
std::string significance_stars(double p_two_sided);

RegressionTable regress(const RegressionDesign& design, bool robust = false);

struct CorrelationMatrix {
  std::vector<std::string> names;
  // NaN marks an undefined entry (constant column).
  Eigen::MatrixXd values;
};

CorrelationMatrix correlations(const Eigen::MatrixXd& data, const std::vector<std::string>& names);

}  // namespace leakstudy
