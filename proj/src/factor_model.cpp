#include "leakstudy/factor_model.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <fmt/format.h>

#include "leakstudy/error.hpp"
#include "leakstudy/ols.hpp"

namespace leakstudy {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::MarketAdjusted: return "madj";
    case ModelKind::CAPM: return "capm";
    case ModelKind::FF3: return "ff3";
    case ModelKind::Carhart: return "carhart";
  }
  return "?";
}

std::string_view to_string(AnchorRole r) { return r == AnchorRole::Leak ? "leak" : "announce"; }

ModelKind parse_model_kind(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "madj" || t == "market-adjusted") return ModelKind::MarketAdjusted;
  if (t == "capm") return ModelKind::CAPM;
  if (t == "ff3") return ModelKind::FF3;
  if (t == "carhart") return ModelKind::Carhart;
  throw Error(ErrorCode::Config, fmt::format("unknown model '{}'", text));
}

RelativeWindow estimation_window(AnchorRole role) {
  return role == AnchorRole::Leak ? RelativeWindow{-300, -1} : RelativeWindow{-310, -11};
}

ModelSpec ModelSpec::for_anchor(ModelKind kind, AnchorRole role, bool include_intercept) {
  return ModelSpec{kind, estimation_window(role), kDefaultMinObs, include_intercept};
}

int factor_count(ModelKind kind) {
  switch (kind) {
    case ModelKind::MarketAdjusted: return 0;
    case ModelKind::CAPM: return 1;
    case ModelKind::FF3: return 3;
    case ModelKind::Carhart: return 4;
  }
  return 0;
}

namespace {

void fill_factors(ModelKind kind, const FactorRow& f, double* out) {
  out[0] = f.mkt_rf;
  if (kind == ModelKind::CAPM) return;
  out[1] = f.smb;
  out[2] = f.hml;
  if (kind == ModelKind::Carhart) {
    if (!f.mom) {
      throw Error(ErrorCode::FactorGap, fmt::format("no momentum factor on {}", format_date(f.date)));
    }
    out[3] = *f.mom;
  }
}

void validate_spec(const ModelSpec& spec) {
  if (spec.kind == ModelKind::MarketAdjusted) return;
  if (spec.window.last >= 0) {
    throw Error(ErrorCode::Validation, "estimation window must end before the event day");
  }
  if (spec.window.first > spec.window.last) throw Error(ErrorCode::Validation, "empty estimation window");
  if (spec.min_obs < 1) throw Error(ErrorCode::Validation, "min_obs must be positive");
  if (spec.window.length() < spec.min_obs) {
    throw Error(ErrorCode::Validation,
                fmt::format("estimation window of {} days is shorter than min_obs {}",
                            spec.window.length(), spec.min_obs));
  }
}

}  // namespace

std::optional<std::size_t> event_index(std::span<const ReturnObservation> returns, Date anchor) {
  auto it = std::lower_bound(returns.begin(), returns.end(), anchor,
                             [](const ReturnObservation& o, Date d) { return o.date < d; });
  if (it == returns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - returns.begin());
}

ModelFit fit_model(const ModelSpec& spec, std::span<const ReturnObservation> returns,
                   const FactorTable& factors, std::size_t event_idx) {
  validate_spec(spec);
  ModelFit fit;
  fit.kind = spec.kind;
  if (spec.kind == ModelKind::MarketAdjusted) {
    fit.betas = {1.0};
    return fit;
  }
  if (spec.kind == ModelKind::Carhart && !factors.has_momentum()) {
    throw Error(ErrorCode::FactorGap, "Carhart model needs a momentum factor");
  }

  const long first = static_cast<long>(event_idx) + spec.window.first;
  const long last = static_cast<long>(event_idx) + spec.window.last;
  const int k = factor_count(spec.kind);
  const int offset = spec.include_intercept ? 1 : 0;

  std::vector<double> ys;
  std::vector<double> xs;  // row-major, k + offset per row
  std::vector<double> row(static_cast<std::size_t>(k));
  for (long i = std::max(first, 0L); i <= last && i < static_cast<long>(returns.size()); ++i) {
    const auto& obs = returns[static_cast<std::size_t>(i)];
    const FactorRow* f = factors.find(obs.date);
    if (f == nullptr) continue;
    fill_factors(spec.kind, *f, row.data());
    ys.push_back(obs.r_i - obs.rf);
    if (offset) xs.push_back(1.0);
    xs.insert(xs.end(), row.begin(), row.end());
  }
  const auto n = static_cast<Eigen::Index>(ys.size());
  if (n < spec.min_obs) {
    throw Error(ErrorCode::ThinHistory,
                fmt::format("{} aligned observations in the estimation window, need {}", n, spec.min_obs));
  }

  const Eigen::Index p = k + offset;
  const Eigen::MatrixXd full =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(xs.data(), n, p);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);

  // A factor that is identically zero over the window carries no information
  // about its loading; it is fixed at zero rather than failing the fit.
  static const std::vector<std::string> kNames{"mkt_rf", "smb", "hml", "mom"};
  std::vector<Eigen::Index> keep;
  std::vector<std::string> names;
  if (offset) {
    keep.push_back(0);
    names.push_back("alpha");
  }
  for (Eigen::Index j = offset; j < p; ++j) {
    if (j > offset && full.col(j).cwiseAbs().maxCoeff() == 0.0) continue;
    keep.push_back(j);
    names.push_back(kNames[static_cast<std::size_t>(j - offset)]);
  }
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) X.col(static_cast<Eigen::Index>(c)) = full.col(keep[c]);

  const OlsResult r = ols(y, X, OlsOptions{spec.include_intercept, false}, names);
  fit.betas.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t c = 0; c < keep.size(); ++c) {
    if (offset && keep[c] == 0) {
      fit.alpha = r.coefficients(0);
    } else {
      fit.betas[static_cast<std::size_t>(keep[c] - offset)] = r.coefficients(static_cast<Eigen::Index>(c));
    }
  }
  fit.residual_std = r.residual_std;
  fit.n_obs = r.n;
  fit.r2 = r.r2;
  return fit;
}

ModelFit fit_model(const ModelSpec& spec, std::span<const ReturnObservation> returns,
                   const FactorTable& factors, Date anchor) {
  const auto idx = event_index(returns, anchor);
  if (!idx) {
    throw Error(ErrorCode::InsufficientHistory,
                fmt::format("no return observation on or after {}", format_date(anchor)));
  }
  return fit_model(spec, returns, factors, *idx);
}

double abnormal_return(const ModelFit& fit, const ReturnObservation& obs, const FactorRow* factors) {
  if (fit.kind == ModelKind::MarketAdjusted) return obs.r_i - obs.r_m;
  if (factors == nullptr) {
    throw Error(ErrorCode::FactorGap, fmt::format("no factor row for {}", format_date(obs.date)));
  }
  double f[4] = {0.0, 0.0, 0.0, 0.0};
  fill_factors(fit.kind, *factors, f);
  double expected = obs.rf + fit.alpha.value_or(0.0);
  for (std::size_t j = 0; j < fit.betas.size(); ++j) expected += fit.betas[j] * f[j];
  return obs.r_i - expected;
}

}  // namespace leakstudy
