#include "leakstudy/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "leakstudy/error.hpp"
#include "leakstudy/inference.hpp"
#include "leakstudy/ols.hpp"

namespace leakstudy {

std::string_view to_string(TimeOfDay t) {
  switch (t) {
    case TimeOfDay::PreMarket: return "PreMarket";
    case TimeOfDay::FirstHour: return "FirstHour";
    case TimeOfDay::MidSession: return "MidSession";
    case TimeOfDay::LastHour: return "LastHour";
    case TimeOfDay::PostMarket: return "PostMarket";
  }
  return "?";
}

TimeOfDay time_of_day_bucket(const SessionPosition& pos, int session_minutes) {
  switch (pos.kind) {
    case SessionClass::PreMarket:
    case SessionClass::NonTradingDay: return TimeOfDay::PreMarket;
    case SessionClass::PostMarket: return TimeOfDay::PostMarket;
    case SessionClass::InSession: break;
  }
  if (pos.offset_minutes < 60) return TimeOfDay::FirstHour;
  if (pos.offset_minutes >= session_minutes - 60) return TimeOfDay::LastHour;
  return TimeOfDay::MidSession;
}

double signed_log(double x) { return std::copysign(std::log1p(std::fabs(x)), x); }

std::string_view to_string(FixedEffect fe) {
  switch (fe) {
    case FixedEffect::TimeOfDay: return "timeofday";
    case FixedEffect::DayOfWeek: return "day";
    case FixedEffect::Year: return "year";
    case FixedEffect::Region: return "region";
  }
  return "?";
}

std::vector<FixedEffect> parse_fixed_effects(std::string_view text) {
  std::vector<FixedEffect> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    if (item == "timeofday") {
      out.push_back(FixedEffect::TimeOfDay);
    } else if (item == "day") {
      out.push_back(FixedEffect::DayOfWeek);
    } else if (item == "year") {
      out.push_back(FixedEffect::Year);
    } else if (item == "region") {
      out.push_back(FixedEffect::Region);
    } else if (!item.empty()) {
      throw Error(ErrorCode::Config, fmt::format("unknown fixed effect '{}'", item));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

const std::vector<std::string>& covariate_names() {
  static const std::vector<std::string> kNames{"issue_size", "term", "cpn", "option", "bonds_in_issue",
                                               "fti",        "roa",  "de",  "fcf",    "tobins_q"};
  return kNames;
}

namespace {

std::string category(const CrossSectionEvent& e, FixedEffect fe) {
  switch (fe) {
    case FixedEffect::TimeOfDay: return std::string(to_string(e.time_of_day));
    case FixedEffect::DayOfWeek: return fmt::format("{}-{}", e.weekday, weekday_name(e.weekday));
    case FixedEffect::Year: return std::to_string(e.year);
    case FixedEffect::Region: return e.region;
  }
  return {};
}

}  // namespace

RegressionDesign build_design(const std::vector<CrossSectionEvent>& events, const DesignSpec& spec) {
  std::vector<const CrossSectionEvent*> rows;
  RegressionDesign d;
  for (const auto& e : events) {
    if (spec.sample && e.sector != *spec.sample) continue;
    if (!e.car || !e.firm || !(e.issue.size_usd > 0.0)) {
      ++d.dropped_incomplete;
      continue;
    }
    rows.push_back(&e);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptySample, "no complete events left for the regression");

  d.names.push_back("const");
  d.names.insert(d.names.end(), covariate_names().begin(), covariate_names().end());
  if (spec.size_controls) {
    d.names.push_back("ln_mktcap");
    d.names.push_back("ln_assets");
  }
  const std::size_t base_cols = d.names.size();

  // Non-reference levels per fixed effect, in sorted order.
  std::vector<std::pair<FixedEffect, std::vector<std::string>>> levels;
  for (FixedEffect fe : spec.fixed_effects) {
    std::set<std::string> seen;
    for (const auto* e : rows) seen.insert(category(*e, fe));
    std::vector<std::string> kept(seen.begin(), seen.end());
    if (!kept.empty()) kept.erase(kept.begin());
    for (const auto& lv : kept) d.names.push_back(fmt::format("{}:{}", to_string(fe), lv));
    levels.emplace_back(fe, std::move(kept));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  d.y.resize(n);
  d.X = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d.names.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = *rows[static_cast<std::size_t>(i)];
    const auto& f = *e.firm;
    d.tickers.push_back(e.ticker);
    d.y(i) = *e.car;
    const double vals[] = {1.0,
                           std::log(e.issue.size_usd),
                           e.issue.avg_term,
                           e.issue.avg_coupon,
                           e.issue.has_option ? 1.0 : 0.0,
                           static_cast<double>(e.issue.n_bonds),
                           f.fti ? 1.0 : 0.0,
                           f.roa,
                           f.de,
                           signed_log(f.fcf_usd),
                           f.tobins_q};
    Eigen::Index c = 0;
    for (double v : vals) d.X(i, c++) = v;
    if (spec.size_controls) {
      d.X(i, c++) = std::log(f.mktcap_usd);
      d.X(i, c++) = std::log(f.assets_usd);
    }
    Eigen::Index col = static_cast<Eigen::Index>(base_cols);
    for (const auto& [fe, kept] : levels) {
      const std::string cat = category(e, fe);
      for (const auto& lv : kept) {
        if (lv == cat) d.X(i, col) = 1.0;
        ++col;
      }
    }
  }
  return d;
}

std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

RegressionTable regress(const RegressionDesign& design, bool robust) {
  const OlsResult r = ols(design.y, design.X, OlsOptions{true, robust}, design.names);
  RegressionTable out;
  out.n = r.n;
  out.r2 = r.r2;
  out.f_stat = r.f_stat;
  out.f_p_value = r.f_p_value;
  for (std::size_t j = 0; j < design.names.size(); ++j) {
    CoefficientRow row;
    row.term = design.names[j];
    const auto jj = static_cast<Eigen::Index>(j);
    row.coefficient = r.coefficients(jj);
    row.std_err = r.std_errors(jj);
    if (row.std_err > 0.0) {
      row.t = row.coefficient / row.std_err;
      row.p = t_p_value(row.t, r.df_resid, Tail::TwoSided);
    } else {
      row.t = row.coefficient == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), row.coefficient);
      row.p = row.coefficient == 0.0 ? 1.0 : 0.0;
    }
    row.stars = significance_stars(row.p);
    out.rows.push_back(std::move(row));
  }
  return out;
}

CorrelationMatrix correlations(const Eigen::MatrixXd& data, const std::vector<std::string>& names) {
  const Eigen::Index k = data.cols();
  if (data.rows() < 2) throw Error(ErrorCode::Validation, "correlations need at least two rows");
  if (static_cast<Eigen::Index>(names.size()) != k) throw Error(ErrorCode::Validation, "name count mismatch");
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::VectorXd norms = centered.colwise().norm().transpose();
  CorrelationMatrix out{names, Eigen::MatrixXd(k, k)};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      double v = nan;
      if (norms(a) > 0.0 && norms(b) > 0.0) {
        v = a == b ? 1.0 : std::clamp(centered.col(a).dot(centered.col(b)) / (norms(a) * norms(b)), -1.0, 1.0);
      }
      out.values(a, b) = v;
      out.values(b, a) = v;
    }
  }
  return out;
}

}  // namespace leakstudy
