#include "leakstudy/domain.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "leakstudy/error.hpp"

namespace leakstudy {

std::string_view to_string(SectorClass s) {
  return s == SectorClass::Financial ? "Financial" : "NonFinancial";
}

SectorClass classify_sector(std::string_view industry_tag) {
  std::string tag;
  tag.reserve(industry_tag.size());
  for (char c : industry_tag) {
    const auto u = static_cast<unsigned char>(c);
    tag.push_back(c == '_' || c == '-' ? ' ' : static_cast<char>(std::tolower(u)));
  }
  const auto first = tag.find_first_not_of(' ');
  const auto last = tag.find_last_not_of(' ');
  tag = first == std::string::npos ? std::string{} : tag.substr(first, last - first + 1);

  static constexpr std::array<std::string_view, 9> kFinancial{
      "bank",           "banks",             "government agency", "real estate",
      "financial services", "consumer finance", "commercial finance",
      "consumer/commercial finance", "consumer and commercial finance"};
  return std::find(kFinancial.begin(), kFinancial.end(), tag) != kFinancial.end()
             ? SectorClass::Financial
             : SectorClass::NonFinancial;
}

double simple_return(double p_prev, double p_curr) {
  if (!(p_prev > 0.0) || !(p_curr > 0.0)) {
    throw Error(ErrorCode::Domain,
                fmt::format("simple_return requires positive prices, got {} and {}", p_prev, p_curr));
  }
  return p_curr / p_prev - 1.0;
}

void validate(const DailyBar& bar) {
  if (!(bar.close > 0.0)) throw Error(ErrorCode::Domain, "close must be > 0");
  if (!(bar.volume >= 0.0) || !std::isfinite(bar.volume)) {
    throw Error(ErrorCode::Domain, "volume must be >= 0");
  }
  if (!(bar.shares_outstanding > 0.0)) {
    throw Error(ErrorCode::Domain, "shares_outstanding must be > 0");
  }
}

void validate(const IntradayBar& bar) {
  if (!(bar.price > 0.0)) throw Error(ErrorCode::Domain, "price must be > 0");
  if (!(bar.volume >= 0.0) || !std::isfinite(bar.volume)) {
    throw Error(ErrorCode::Domain, "volume must be >= 0");
  }
}

void validate(const ReturnObservation& obs) {
  if (!(obs.r_i > -1.0) || !(obs.r_m > -1.0)) {
    throw Error(ErrorCode::Domain, "returns must exceed -1");
  }
}

void validate(const FactorRow& row) {
  const bool finite = std::isfinite(row.mkt_rf) && std::isfinite(row.smb) &&
                      std::isfinite(row.hml) && std::isfinite(row.rf) &&
                      (!row.mom || std::isfinite(*row.mom));
  if (!finite) throw Error(ErrorCode::Domain, "factor values must be finite");
}

}  // namespace leakstudy
