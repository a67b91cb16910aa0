#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakstudy/cross_section.hpp"
#include "leakstudy/event_study.hpp"
#include "leakstudy/factor_model.hpp"
#include "leakstudy/ingest.hpp"
#include "leakstudy/leak_matcher.hpp"
#include "leakstudy/panel_builder.hpp"

namespace leakstudy {

struct RunConfig {
  // Directory holding the default-named input files; relative paths in the
  // config resolve against the config file's directory.
  std::string data_dir = ".";
  // Logical input name -> path. Unset names default to <data_dir>/<name>.csv.
  std::map<std::string, std::string> inputs;
  // Region -> factor file. Filled from <data_dir>/factors_<region>.csv for
  // regions not given explicitly.
  std::map<std::string, std::string> factor_files;
  std::vector<std::string> exclude_regions;
  FactorUnits factor_units = FactorUnits::Decimal;

  ModelKind model = ModelKind::MarketAdjusted;
  AnchorRole anchor = AnchorRole::Leak;
  bool include_intercept = false;
  std::vector<RelativeWindow> windows;  // empty: presets for the anchor
  Split split = Split::All;
  bool two_sided = false;
  int horizon_days = kDefaultHorizonDays;

  RelativeWindow car_window{0, 1};
  ModelKind car_model = ModelKind::CAPM;
  std::optional<SectorClass> sample;
  std::vector<FixedEffect> fixed_effects{FixedEffect::TimeOfDay, FixedEffect::DayOfWeek};
  bool robust = false;

  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 1;

  Tail tail() const { return two_sided ? Tail::TwoSided : Tail::OneSided; }
};

// Logical input names, in manifest order.
const std::vector<std::string>& input_names();

RunConfig load_config(const std::string& path);
// "a:b" -> [a,b].
RelativeWindow parse_window(std::string_view text);
// fin | nonfin | all
std::optional<SectorClass> parse_sample(std::string_view text);

// Resolves default paths and the factor map; checks that files exist.
void finalize_config(RunConfig& cfg);

std::string config_json(const RunConfig& cfg);
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct Inputs {
  std::map<std::string, SecurityRecord> securities;
  std::map<std::string, ExchangeCalendar> calendars;
  DailySeries daily;
  IntradaySeries intraday;
  IndexDailySeries index_daily;
  IndexIntradaySeries index_intraday;
  std::map<std::string, FactorTable> factors;
  std::vector<Headline> headlines;
  std::vector<RawAnnouncement> announcements;
  std::map<std::string, std::vector<FundamentalsFiling>> fundamentals;
  FxTable fx;
  // Logical name -> SHA-256 of each file read.
  std::map<std::string, std::string> hashes;

  bool has_intraday() const { return !intraday.empty() && !index_intraday.empty(); }
  MarketData market_data() const;
};

Inputs load_inputs(const RunConfig& cfg);

struct Funnel {
  std::size_t candidates = 0;
  std::size_t deduped = 0;
  std::size_t ticker_bearing = 0;
  std::size_t matched = 0;
  std::size_t liquidity_passing = 0;
  std::size_t factor_covered = 0;
};

struct Sample {
  std::vector<LeakEvent> matched;  // with liquidity flags
  std::vector<LeakEvent> study;    // liquidity-passing, regions not excluded
  Funnel funnel;
  DedupStats dedup;
};

// Filter, dedup, match and screen. With require_factors, a study leak whose
// region has no factor file and is not excluded raises FactorGap.
Sample run_match(const Inputs& in, const RunConfig& cfg, bool require_factors);

std::vector<EventInput> event_inputs(const std::vector<LeakEvent>& leaks, const Inputs& in, AnchorRole role);

// Per-event cross-sectional records with CARs from `car_model` over `window`.
std::vector<CrossSectionEvent> cross_section_events(const Sample& sample, const Inputs& in,
                                                    ModelKind car_model, RelativeWindow window,
                                                    bool include_intercept, int workers);

// Runs one CLI subcommand (match, study, volume, regress, correlations,
// report) and writes its outputs plus manifest.json into cfg.out_dir.
// Returns the manifest's SHA-256.
std::string run_subcommand(const std::string& name, const RunConfig& cfg);

// Writes manifest.json for subcommands that run outside the data pipeline.
std::string write_manifest(const std::string& out_dir, const std::string& subcommand,
                           const std::map<std::string, std::string>& input_hashes, const std::string& config_hash,
                           const std::vector<std::string>& outputs);

}  // namespace leakstudy
