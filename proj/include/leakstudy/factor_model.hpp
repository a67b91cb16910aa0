#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "leakstudy/domain.hpp"
#include "leakstudy/ingest.hpp"

namespace leakstudy {

enum class ModelKind { MarketAdjusted, CAPM, FF3, Carhart };
enum class AnchorRole { Leak, Announcement };

std::string_view to_string(ModelKind k);
std::string_view to_string(AnchorRole r);
// Accepts madj, capm, ff3, carhart (case-insensitive).
ModelKind parse_model_kind(std::string_view text);

// Inclusive range of relative trading days.
struct RelativeWindow {
  int first = 0;
  int last = 0;
  int length() const { return last - first + 1; }
  bool operator==(const RelativeWindow&) const = default;
};

inline constexpr int kDefaultMinObs = 100;

// [-300,-1] around a leak, [-310,-11] around an announcement.
RelativeWindow estimation_window(AnchorRole role);

struct ModelSpec {
  ModelKind kind = ModelKind::MarketAdjusted;
  RelativeWindow window{-300, -1};
  int min_obs = kDefaultMinObs;
  // Fit and predict with an alpha term. Off by default: the model equations
  // are stated without one.
  bool include_intercept = false;

  static ModelSpec for_anchor(ModelKind kind, AnchorRole role, bool include_intercept = false);
};

// Number of factor loadings the model carries.
int factor_count(ModelKind kind);

struct ModelFit {
  ModelKind kind = ModelKind::MarketAdjusted;
  // Loadings in factor order mkt, smb, hml, mom (as many as the model uses).
  std::vector<double> betas;
  std::optional<double> alpha;
  std::optional<double> residual_std;
  int n_obs = 0;
  double r2 = 0.0;
};

// Fits the model on the estimation window around the observation at
// event_index (relative day 0) of a date-sorted return series. Days without a
// factor row are skipped; fewer than min_obs remaining raises ThinHistory.
ModelFit fit_model(const ModelSpec& spec, std::span<const ReturnObservation> returns,
                   const FactorTable& factors, std::size_t event_index);

// Same, locating relative day 0 as the first observation dated on or after
// anchor.
ModelFit fit_model(const ModelSpec& spec, std::span<const ReturnObservation> returns,
                   const FactorTable& factors, Date anchor);

// Index of the first observation dated on or after `anchor`, if any.
std::optional<std::size_t> event_index(std::span<const ReturnObservation> returns, Date anchor);

// Market-adjusted: r_i - r_m. Factor models: r_i - (rf + [alpha] + sum b_k f_k)
// with rf taken from the observation; `factors` must be the row for obs.date.
double abnormal_return(const ModelFit& fit, const ReturnObservation& obs, const FactorRow* factors);

}  // namespace leakstudy
