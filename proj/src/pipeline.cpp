#include "leakstudy/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"
#include "leakstudy/error.hpp"
#include "leakstudy/tables.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace leakstudy {

const std::vector<std::string>& input_names() {
  static const std::vector<std::string> kNames{"securities",    "calendar",       "headlines",
                                               "announcements", "fundamentals",   "fx",
                                               "prices_daily",  "prices_intraday", "index_daily",
                                               "index_intraday"};
  return kNames;
}

namespace {

const std::set<std::string> kRequiredInputs{"securities", "calendar", "headlines", "announcements"};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path.string() : (base / path).lexically_normal().string();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, fmt::format("config key '{}': {}", key, e.what()));
  }
}

}  // namespace

RelativeWindow parse_window(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::Config, fmt::format("window '{}' must look like a:b", text));
  }
  try {
    const int a = std::stoi(std::string(text.substr(0, colon)));
    const int b = std::stoi(std::string(text.substr(colon + 1)));
    if (a > b) throw Error(ErrorCode::Config, fmt::format("window '{}' starts after it ends", text));
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Config, fmt::format("window '{}' must look like a:b", text));
  }
}

std::optional<SectorClass> parse_sample(std::string_view text) {
  if (text == "fin") return SectorClass::Financial;
  if (text == "nonfin") return SectorClass::NonFinancial;
  if (text == "all") return std::nullopt;
  throw Error(ErrorCode::Config, fmt::format("unknown sample '{}' (fin, nonfin, all)", text));
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open config '{}'", path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, fmt::format("config '{}': {}", path, e.what()));
  }
  if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
  static const std::set<std::string> kKeys{
      "data_dir",   "inputs",    "factors",       "exclude_regions", "factor_units",  "model",
      "anchor",     "include_intercept", "windows", "split",          "two_sided",     "horizon_days",
      "car_window", "car_model", "sample",        "fixed_effects",  "robust",        "out_dir",
      "seed",       "workers"};
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw Error(ErrorCode::Config, fmt::format("unknown config key '{}'", k));
  }

  const fs::path base = fs::path(path).parent_path();
  RunConfig c;
  c.data_dir = resolve(base, get_or<std::string>(j, "data_dir", "."));
  for (const auto& [k, v] : get_or<std::map<std::string, std::string>>(j, "inputs", {})) {
    if (std::find(input_names().begin(), input_names().end(), k) == input_names().end()) {
      throw Error(ErrorCode::Config, fmt::format("unknown input '{}'", k));
    }
    c.inputs[k] = resolve(base, v);
  }
  for (const auto& [region, v] : get_or<std::map<std::string, std::string>>(j, "factors", {})) {
    c.factor_files[region] = resolve(base, v);
  }
  c.exclude_regions = get_or<std::vector<std::string>>(j, "exclude_regions", {});
  const std::string units = lower(get_or<std::string>(j, "factor_units", "decimal"));
  if (units == "percent") {
    c.factor_units = FactorUnits::Percent;
  } else if (units != "decimal") {
    throw Error(ErrorCode::Config, "factor_units must be decimal or percent");
  }
  c.model = parse_model_kind(get_or<std::string>(j, "model", "madj"));
  const std::string anchor = get_or<std::string>(j, "anchor", "leak");
  if (anchor == "announce") {
    c.anchor = AnchorRole::Announcement;
  } else if (anchor != "leak") {
    throw Error(ErrorCode::Config, "anchor must be leak or announce");
  }
  c.include_intercept = get_or<bool>(j, "include_intercept", false);
  for (const auto& w : get_or<std::vector<std::string>>(j, "windows", {})) c.windows.push_back(parse_window(w));
  c.split = parse_split(get_or<std::string>(j, "split", "all"));
  c.two_sided = get_or<bool>(j, "two_sided", false);
  c.horizon_days = get_or<int>(j, "horizon_days", kDefaultHorizonDays);
  if (c.horizon_days < 1) throw Error(ErrorCode::Config, "horizon_days must be >= 1");
  c.car_window = parse_window(get_or<std::string>(j, "car_window", "0:1"));
  c.car_model = parse_model_kind(get_or<std::string>(j, "car_model", "capm"));
  c.sample = parse_sample(get_or<std::string>(j, "sample", "all"));
  if (j.contains("fixed_effects")) c.fixed_effects = parse_fixed_effects(get_or<std::string>(j, "fixed_effects", ""));
  c.robust = get_or<bool>(j, "robust", false);
  c.out_dir = resolve(base, get_or<std::string>(j, "out_dir", "out"));
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.workers = get_or<int>(j, "workers", 1);
  if (c.workers < 1) throw Error(ErrorCode::Config, "workers must be >= 1");
  return c;
}

void finalize_config(RunConfig& cfg) {
  const fs::path dir(cfg.data_dir);
  for (const auto& name : input_names()) {
    auto it = cfg.inputs.find(name);
    if (it == cfg.inputs.end()) {
      const fs::path p = dir / (name + ".csv");
      if (fs::exists(p)) cfg.inputs[name] = p.string();
      continue;
    }
    if (!fs::exists(it->second)) {
      throw Error(ErrorCode::Config, fmt::format("input '{}' not found: {}", name, it->second));
    }
  }
  for (const auto& name : kRequiredInputs) {
    if (!cfg.inputs.count(name)) {
      throw Error(ErrorCode::Config, fmt::format("required input '{}' missing (looked in {})", name, cfg.data_dir));
    }
  }
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir, ec)) found.push_back(entry.path());
    std::sort(found.begin(), found.end());
    for (const auto& p : found) {
      const std::string file = p.filename().string();
      if (file.rfind("factors_", 0) == 0 && p.extension() == ".csv") {
        const std::string region = file.substr(8, file.size() - 8 - 4);
        if (!region.empty()) cfg.factor_files.emplace(region, p.string());
      }
    }
  }
  for (const auto& [region, path] : cfg.factor_files) {
    if (!fs::exists(path)) {
      throw Error(ErrorCode::Config, fmt::format("factor file for region '{}' not found: {}", region, path));
    }
  }
}

std::string config_json(const RunConfig& cfg) {
  json j;
  json inputs = json::object();
  for (const auto& [k, v] : cfg.inputs) inputs[k] = fs::path(v).filename().string();
  j["inputs"] = inputs;
  json factors = json::object();
  for (const auto& [k, v] : cfg.factor_files) factors[k] = fs::path(v).filename().string();
  j["factors"] = factors;
  j["exclude_regions"] = cfg.exclude_regions;
  j["factor_units"] = cfg.factor_units == FactorUnits::Percent ? "percent" : "decimal";
  j["model"] = std::string(to_string(cfg.model));
  j["anchor"] = std::string(to_string(cfg.anchor));
  j["include_intercept"] = cfg.include_intercept;
  std::vector<std::string> windows;
  for (const auto& w : cfg.windows) windows.push_back(fmt::format("{}:{}", w.first, w.last));
  j["windows"] = windows;
  j["split"] = cfg.split == Split::All ? "all" : cfg.split == Split::Timing ? "timing" : "sector";
  j["two_sided"] = cfg.two_sided;
  j["horizon_days"] = cfg.horizon_days;
  j["car_window"] = fmt::format("{}:{}", cfg.car_window.first, cfg.car_window.last);
  j["car_model"] = std::string(to_string(cfg.car_model));
  j["sample"] = !cfg.sample ? "all" : *cfg.sample == SectorClass::Financial ? "fin" : "nonfin";
  std::vector<std::string> fe;
  for (auto f : cfg.fixed_effects) fe.emplace_back(to_string(f));
  j["fixed_effects"] = fe;
  j["robust"] = cfg.robust;
  j["seed"] = cfg.seed;
  return j.dump();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

MarketData Inputs::market_data() const {
  MarketData md;
  md.securities = &securities;
  md.calendars = &calendars;
  md.daily = &daily;
  md.intraday = &intraday;
  md.index_daily = &index_daily;
  md.index_intraday = &index_intraday;
  md.factors = &factors;
  return md;
}

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in;
  auto path = [&](const std::string& name) -> const std::string* {
    auto it = cfg.inputs.find(name);
    if (it == cfg.inputs.end()) return nullptr;
    in.hashes[name] = sha256_file(it->second);
    return &it->second;
  };

  for (auto& s : load_table(*path("securities"), securities_schema())) {
    const std::string t = s.ticker;
    if (!in.securities.emplace(t, std::move(s)).second) {
      throw Error(ErrorCode::Data, fmt::format("duplicate security '{}'", t));
    }
  }
  for (auto& c : load_table(*path("calendar"), calendar_schema())) {
    const std::string id = c.exchange_id();
    if (!in.calendars.emplace(id, std::move(c)).second) {
      throw Error(ErrorCode::Data, fmt::format("duplicate calendar for '{}'", id));
    }
  }
  in.headlines = load_table(*path("headlines"), headline_schema());
  in.announcements = load_table(*path("announcements"), announcement_schema());
  if (const auto* p = path("fundamentals")) {
    for (auto& f : load_table(*p, fundamentals_schema())) in.fundamentals[f.ticker].push_back(std::move(f));
  }
  if (const auto* p = path("fx")) in.fx = FxTable(load_table(*p, fx_schema()));
  if (const auto* p = path("prices_daily")) in.daily = group_daily(load_table(*p, daily_price_schema()));
  if (const auto* p = path("index_daily")) in.index_daily = group_index_daily(load_table(*p, index_daily_schema()));
  if (const auto* p = path("prices_intraday")) {
    in.intraday = group_intraday(load_table(*p, intraday_price_schema()));
    for (const auto& [ticker, bars] : in.intraday) {
      auto sec = in.securities.find(ticker);
      if (sec == in.securities.end()) continue;
      auto cal = in.calendars.find(sec->second.exchange_id);
      if (cal != in.calendars.end()) validate_intraday_grid(bars, cal->second);
    }
  }
  if (const auto* p = path("index_intraday")) {
    in.index_intraday = group_index_intraday(load_table(*p, index_intraday_schema()));
  }
  for (const auto& [region, file] : cfg.factor_files) {
    in.hashes["factors_" + region] = sha256_file(file);
    in.factors.emplace(region, FactorTable(load_table(file, factor_schema(cfg.factor_units))));
  }
  return in;
}

Sample run_match(const Inputs& in, const RunConfig& cfg, bool require_factors) {
  Sample s;
  std::vector<Headline> candidates;
  std::copy_if(in.headlines.begin(), in.headlines.end(), std::back_inserter(candidates), matches_search_terms);
  s.funnel.candidates = candidates.size();

  const auto deduped = dedup_headlines(candidates, cfg.horizon_days, &s.dedup);
  s.funnel.deduped = deduped.size();

  std::vector<Headline> with_ticker;
  std::copy_if(deduped.begin(), deduped.end(), std::back_inserter(with_ticker),
               [](const Headline& h) { return !h.tickers.empty(); });
  s.funnel.ticker_bearing = with_ticker.size();

  const auto events = condense_announcements(in.announcements);
  MatchContext ctx{&in.securities, &in.calendars, &in.fx};
  s.matched = match_leaks(with_ticker, events, ctx, cfg.horizon_days);
  s.funnel.matched = s.matched.size();
  apply_liquidity(s.matched, in.intraday, ctx);

  const std::set<std::string> excluded(cfg.exclude_regions.begin(), cfg.exclude_regions.end());
  for (const auto& leak : s.matched) {
    if (!leak.passes_liquidity()) continue;
    ++s.funnel.liquidity_passing;
    const std::string& region = in.securities.at(leak.ticker).region;
    if (excluded.count(region)) continue;
    if (in.factors.count(region)) {
      ++s.funnel.factor_covered;
    } else if (require_factors) {
      throw Error(ErrorCode::FactorGap,
                  fmt::format("region '{}' (ticker {}) has no factor file and is not excluded", region, leak.ticker));
    }
    s.study.push_back(leak);
  }
  return s;
}

std::vector<EventInput> event_inputs(const std::vector<LeakEvent>& leaks, const Inputs& in, AnchorRole role) {
  std::vector<EventInput> out;
  out.reserve(leaks.size());
  for (const auto& leak : leaks) {
    const auto& sec = in.securities.at(leak.ticker);
    const auto& cal = in.calendars.at(sec.exchange_id);
    EventInput e = role == AnchorRole::Leak ? leak_input(leak, cal) : announcement_input(leak, cal);
    e.event.sector = sec.sector_class;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CrossSectionEvent> cross_section_events(const Sample& sample, const Inputs& in, ModelKind car_model,
                                                    RelativeWindow window, bool include_intercept, int workers) {
  const auto inputs = event_inputs(sample.study, in, AnchorRole::Leak);
  const auto build = daily_ar_panel(inputs, in.market_data(),
                                    ModelSpec::for_anchor(car_model, AnchorRole::Leak, include_intercept), window,
                                    workers);
  std::map<std::pair<std::string, Instant>, double> cars;
  const auto& panel = build.panel;
  for (std::size_t e = 0; e < panel.size(); ++e) {
    double sum = 0.0;
    bool complete = true;
    for (std::size_t c = 0; c < panel.offsets().size(); ++c) {
      if (!panel.cell(e, c)) {
        complete = false;
        break;
      }
      sum += *panel.cell(e, c);
    }
    if (complete) cars[{panel.events()[e].ticker, panel.events()[e].anchor}] = sum;
  }

  std::vector<CrossSectionEvent> out;
  for (const auto& leak : sample.study) {
    const auto& sec = in.securities.at(leak.ticker);
    const auto& cal = in.calendars.at(sec.exchange_id);
    CrossSectionEvent ev;
    ev.ticker = leak.ticker;
    if (auto it = cars.find({leak.ticker, leak.leak_ts}); it != cars.end()) ev.car = it->second;
    ev.issue = leak.issue;
    if (auto f = in.fundamentals.find(leak.ticker); f != in.fundamentals.end()) {
      try {
        ev.firm = rebase_fundamentals(prepare_fundamentals(f->second, leak.announcement.announce_date),
                                      sec.currency, leak.leak_ts, in.fx);
      } catch (const Error&) {
        ev.firm.reset();
      }
    }
    ev.time_of_day = time_of_day_bucket(leak.position, cal.session_minutes(leak.session_date));
    ev.weekday = iso_weekday(leak.position.local_date);
    ev.year = year_of(leak.position.local_date);
    ev.region = sec.region;
    ev.sector = sec.sector_class;
    out.push_back(std::move(ev));
  }
  return out;
}

std::string write_manifest(const std::string& out_dir, const std::string& subcommand,
                           const std::map<std::string, std::string>& input_hashes, const std::string& config_hash,
                           const std::vector<std::string>& outputs) {
  json j;
  j["subcommand"] = subcommand;
  j["inputs"] = input_hashes;
  j["config_hash"] = config_hash;
  json outs = json::object();
  for (const auto& o : outputs) outs[o] = sha256_file((fs::path(out_dir) / o).string());
  j["outputs"] = outs;
  const std::string text = j.dump(2) + "\n";
  std::ofstream f(fs::path(out_dir) / "manifest.json", std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "cannot write manifest.json");
  return sha256_hex(text);
}

namespace {

// Collects output files and per-stage bookkeeping for the manifest.
class RunOutputs {
public:
  explicit RunOutputs(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create '{}': {}", dir_, ec.message()));
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(dir_) / name, std::ios::binary);
    f << content;
    if (!f) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", name));
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }

  void note_drops(const std::string& stage, const std::map<std::string, std::size_t>& dropped) {
    for (const auto& [code, n] : dropped) drops_[stage][code] += n;
  }
  void note_count(const std::string& key, std::size_t n) { counts_[key] = n; }

  std::string finish(const std::string& subcommand, const Inputs* in, const Sample* sample,
                     const std::string& config_hash) {
    json j;
    j["subcommand"] = subcommand;
    j["inputs"] = in ? json(in->hashes) : json::object();
    j["config_hash"] = config_hash;
    if (sample) {
      const auto& f = sample->funnel;
      j["funnel"] = json::array({
          {{"stage", "candidate_headlines"}, {"count", f.candidates}},
          {{"stage", "deduped"}, {"count", f.deduped}},
          {{"stage", "ticker_bearing"}, {"count", f.ticker_bearing}},
          {{"stage", "matched_leaks"}, {"count", f.matched}},
          {{"stage", "liquidity_passing"}, {"count", f.liquidity_passing}},
          {{"stage", "factor_covered"}, {"count", f.factor_covered}},
      });
      j["dedup"] = {{"duplicate_text", sample->dedup.duplicate_text},
                    {"update_chain", sample->dedup.update_chain}};
    }
    j["dropped"] = drops_;
    j["counts"] = counts_;
    std::sort(files_.begin(), files_.end());
    json outs = json::object();
    for (const auto& o : files_) outs[o] = sha256_file((fs::path(dir_) / o).string());
    j["outputs"] = outs;
    const std::string text = j.dump(2) + "\n";
    std::ofstream f(fs::path(dir_) / "manifest.json", std::ios::binary);
    f << text;
    if (!f) throw Error(ErrorCode::Io, "cannot write manifest.json");
    return sha256_hex(text);
  }

private:
  std::string dir_;
  std::vector<std::string> files_;
  std::map<std::string, std::map<std::string, std::size_t>> drops_;
  std::map<std::string, std::size_t> counts_;
};

std::string funnel_markdown(const Sample& s) {
  const auto& f = s.funnel;
  return fmt::format(
      "### Sample funnel\n\n| Stage | Count |\n|:---|---:|\n| Candidate headlines | {} |\n| After dedup | {} |\n"
      "| Ticker-bearing | {} |\n| Matched leaks | {} |\n| Liquidity-passing | {} |\n| Factor-covered | {} |\n\n",
      f.candidates, f.deduped, f.ticker_bearing, f.matched, f.liquidity_passing, f.factor_covered);
}

std::string leaks_csv(const std::vector<LeakEvent>& leaks) {
  std::ostringstream out;
  CsvWriter w(out);
  w.row({"ticker", "leak_ts", "announce_date", "timing", "passes_liquidity", "n_bonds", "size_usd", "avg_coupon",
         "has_option"});
  for (const auto& l : leaks) {
    w.row({l.ticker, format_instant(l.leak_ts), format_date(l.announcement.announce_date),
           std::string(to_string(l.timing)), std::string(to_string(l.liquidity)), std::to_string(l.issue.n_bonds),
           fmt_num(l.issue.size_usd), fmt_num(l.issue.avg_coupon), l.issue.has_option ? "true" : "false"});
  }
  return out.str();
}

RelativeWindow day_range(AnchorRole role) { return role == AnchorRole::Leak ? RelativeWindow{0, 10} : RelativeWindow{-10, 10}; }

RelativeWindow grid_for(RelativeWindow days, const std::vector<RelativeWindow>& windows) {
  RelativeWindow g = days;
  for (const auto& w : windows) {
    g.first = std::min(g.first, w.first);
    g.last = std::max(g.last, w.last);
  }
  return g;
}

struct DailyStudy {
  std::vector<PanelGroup> groups;
  std::vector<std::vector<StudyRow>> days;
  std::vector<std::vector<StudyRow>> windows;
};

DailyStudy daily_study(const EventPanel& panel, Split split, RelativeWindow days,
                       const std::vector<RelativeWindow>& windows, Tail tail) {
  DailyStudy s;
  s.groups = split_panel(panel, split);
  for (const auto& g : s.groups) {
    std::vector<StudyRow> d;
    for (int t = days.first; t <= days.last; ++t) d.push_back(aar(g.panel, t, tail));
    std::vector<StudyRow> w;
    for (const auto& win : windows) w.push_back(caar(g.panel, win, tail));
    s.days.push_back(std::move(d));
    s.windows.push_back(std::move(w));
  }
  return s;
}

std::string csv_of(const std::vector<StudyRow>& a, const std::vector<StudyRow>& b = {}) {
  std::vector<StudyRow> all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::ostringstream out;
  write_study_csv(out, all);
  return out.str();
}

std::string volume_csv_of(const std::vector<StudyRow>& a, const std::vector<StudyRow>& b) {
  std::vector<StudyRow> all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::ostringstream out;
  write_volume_csv(out, all);
  return out.str();
}

std::string model_title(ModelKind m) {
  switch (m) {
    case ModelKind::MarketAdjusted: return "market-adjusted";
    case ModelKind::CAPM: return "CAPM";
    case ModelKind::FF3: return "Fama-French three-factor";
    case ModelKind::Carhart: return "Carhart four-factor";
  }
  return "?";
}

// Daily AAR/CAAR study for one model and anchor; returns the markdown.
std::string run_daily_returns(const Inputs& in, const Sample& sample, const RunConfig& cfg, ModelKind model,
                              AnchorRole anchor, RunOutputs& out) {
  const auto windows = cfg.windows.empty() ? daily_window_presets(anchor) : cfg.windows;
  const auto days = day_range(anchor);
  const auto inputs = event_inputs(sample.study, in, anchor);
  const auto build = daily_ar_panel(inputs, in.market_data(),
                                    ModelSpec::for_anchor(model, anchor, cfg.include_intercept),
                                    grid_for(days, windows), cfg.workers);
  const std::string stem = fmt::format("study_{}_{}", to_string(model), to_string(anchor));
  out.note_drops(stem, build.dropped);
  const auto s = daily_study(build.panel, cfg.split, days, windows, cfg.tail());
  std::string md;
  for (std::size_t g = 0; g < s.groups.size(); ++g) {
    out.write(fmt::format("{}_{}.csv", stem, s.groups[g].label), csv_of(s.days[g], s.windows[g]));
    md += markdown_daily_study(fmt::format("Daily AAR and CAAR around the {}, {} model ({})",
                                           anchor == AnchorRole::Leak ? "leak" : "announcement", model_title(model),
                                           s.groups[g].label),
                               s.days[g], s.windows[g]);
  }
  return md;
}

std::string run_intraday_returns(const Inputs& in, const Sample& sample, const RunConfig& cfg, Split split,
                                 RunOutputs& out) {
  const auto inputs = event_inputs(sample.study, in, AnchorRole::Leak);
  const auto build = intraday_car_panel(inputs, in.market_data(), cfg.workers);
  out.note_drops("intraday_caar", build.dropped);
  const auto groups = split_panel(build.panel, split);
  std::vector<std::vector<StudyRow>> rows;
  for (const auto& g : groups) {
    rows.push_back(intraday_caar(g.panel, intraday_offsets(), cfg.tail()));
    out.write(fmt::format("intraday_caar_{}.csv", g.label), csv_of(rows.back()));
  }
  const char* by = split == Split::Timing ? ", by leak timing" : split == Split::Sector ? ", by sector" : "";
  return markdown_intraday_study(fmt::format("Intraday CAAR after the leak (market-adjusted, 5-minute bars{})", by),
                                 groups, rows);
}

std::string run_volume(const Inputs& in, const Sample& sample, const RunConfig& cfg, Split split, RunOutputs& out) {
  std::string md;
  const auto windows = cfg.windows.empty() ? daily_window_presets(AnchorRole::Leak) : cfg.windows;
  const auto days = day_range(AnchorRole::Leak);
  const auto inputs = event_inputs(sample.study, in, AnchorRole::Leak);
  const auto daily = daily_volume_panel(inputs, in.market_data(), grid_for(days, windows), kDailyBaseline,
                                        cfg.workers);
  out.note_drops("volume_daily", daily.dropped);
  const auto s = daily_study(daily.panel, split, days, windows, cfg.tail());
  for (std::size_t g = 0; g < s.groups.size(); ++g) {
    out.write(fmt::format("volume_daily_{}.csv", s.groups[g].label), volume_csv_of(s.days[g], s.windows[g]));
    md += markdown_volume_study(fmt::format("Daily AAV and CAAV after the leak, T = 20 ({})", s.groups[g].label),
                                s.days[g], s.windows[g], "Day");
  }
  if (in.has_intraday()) {
    const auto intra = intraday_volume_panel(inputs, in.market_data(), kIntradayBaseline, cfg.workers);
    out.note_drops("volume_intraday", intra.dropped);
    for (const auto& g : split_panel(intra.panel, split)) {
      const auto rows = aav_caav(g.panel, intraday_offsets(), cfg.tail());
      std::vector<StudyRow> aavs;
      std::vector<StudyRow> caavs;
      for (const auto& r : rows) {
        aavs.push_back(r.aav);
        caavs.push_back(r.caav);
      }
      out.write(fmt::format("volume_intraday_{}.csv", g.label), volume_csv_of(aavs, caavs));
      md += markdown_volume_study(fmt::format("Intraday AAV after the leak, T = 96 ({})", g.label), aavs, caavs,
                                  "Minutes");
    }
  }
  return md;
}

struct RegressionColumn {
  std::string label;
  RelativeWindow window;
  std::optional<SectorClass> sample;
  std::vector<FixedEffect> fe;
};

std::string sample_label(const std::optional<SectorClass>& s) {
  return !s ? "all" : *s == SectorClass::Financial ? "fin" : "nonfin";
}

}  // namespace

std::string run_subcommand(const std::string& name, const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  finalize_config(cfg);
  const std::string config_hash = sha256_hex(config_json(cfg));
  RunOutputs out(cfg.out_dir);

  const Inputs in = load_inputs(cfg);

  if (name == "match") {
    const Sample sample = run_match(in, cfg, false);
    out.write("leaks.csv", leaks_csv(sample.matched));
    return out.finish(name, &in, &sample, config_hash);
  }
  if (name == "study") {
    const Sample sample = run_match(in, cfg, cfg.model != ModelKind::MarketAdjusted);
    std::string md = funnel_markdown(sample);
    md += run_daily_returns(in, sample, cfg, cfg.model, cfg.anchor, out);
    if (cfg.anchor == AnchorRole::Leak && in.has_intraday()) md += run_intraday_returns(in, sample, cfg, cfg.split, out);
    out.write("study.md", md);
    return out.finish(name, &in, &sample, config_hash);
  }
  if (name == "volume") {
    const Sample sample = run_match(in, cfg, false);
    out.write("volume.md", funnel_markdown(sample) + run_volume(in, sample, cfg, cfg.split, out));
    return out.finish(name, &in, &sample, config_hash);
  }
  if (name == "regress" || name == "correlations") {
    const Sample sample = run_match(in, cfg, cfg.car_model != ModelKind::MarketAdjusted);
    const auto events =
        cross_section_events(sample, in, cfg.car_model, cfg.car_window, cfg.include_intercept, cfg.workers);
    if (name == "regress") {
      const auto design = build_design(events, DesignSpec{cfg.fixed_effects, cfg.sample, false});
      out.note_count("regression_incomplete_events", design.dropped_incomplete);
      std::ostringstream csv;
      write_regression_csv(csv, regress(design, cfg.robust));
      out.write("regression.csv", csv.str());
    } else {
      const auto design = build_design(events, DesignSpec{{}, cfg.sample, true});
      out.note_count("correlation_incomplete_events", design.dropped_incomplete);
      Eigen::MatrixXd data(design.X.rows(), design.X.cols());
      data.col(0) = design.y;
      data.rightCols(design.X.cols() - 1) = design.X.rightCols(design.X.cols() - 1);
      std::vector<std::string> names{"car"};
      names.insert(names.end(), design.names.begin() + 1, design.names.end());
      std::ostringstream csv;
      write_correlation_csv(csv, correlations(data, names));
      out.write("correlations.csv", csv.str());
    }
    return out.finish(name, &in, &sample, config_hash);
  }
  if (name == "report") {
    const Sample sample = run_match(in, cfg, true);
    out.write("leaks.csv", leaks_csv(sample.matched));
    std::string md = "# Leak event study report\n\n" + funnel_markdown(sample);

    auto guarded = [&](const std::string& what, auto&& fn) {
      try {
        md += fn();
      } catch (const Error& e) {
        md += fmt::format("_{} unavailable: {}: {}_\n\n", what, error_code_name(e.code()), e.what());
      }
    };

    md += "## Intraday returns after the leak\n\n";
    if (in.has_intraday()) {
      for (Split split : {Split::All, Split::Timing, Split::Sector}) {
        guarded("intraday CAAR", [&] { return run_intraday_returns(in, sample, cfg, split, out); });
      }
    } else {
      md += "_No intraday data supplied._\n\n";
    }
    md += "## Trading volume after the leak\n\n";
    guarded("volume study", [&] { return run_volume(in, sample, cfg, Split::All, out); });

    for (AnchorRole anchor : {AnchorRole::Leak, AnchorRole::Announcement}) {
      md += anchor == AnchorRole::Leak ? "## Daily returns around the leak\n\n"
                                       : "## Daily returns around the announcement\n\n";
      for (ModelKind m : {ModelKind::MarketAdjusted, ModelKind::CAPM, ModelKind::FF3, ModelKind::Carhart}) {
        RunConfig c = cfg;
        c.split = Split::All;
        guarded(fmt::format("{} study", to_string(m)), [&] { return run_daily_returns(in, sample, c, m, anchor, out); });
      }
    }

    md += "## Cross-sectional regressions of leak CARs\n\n";
    std::vector<RegressionColumn> cols;
    const std::vector<std::vector<FixedEffect>> fe_sets{
        {FixedEffect::TimeOfDay, FixedEffect::DayOfWeek},
        {FixedEffect::TimeOfDay, FixedEffect::DayOfWeek, FixedEffect::Year},
        {FixedEffect::TimeOfDay, FixedEffect::DayOfWeek, FixedEffect::Year, FixedEffect::Region}};
    for (auto sec : {SectorClass::Financial, SectorClass::NonFinancial}) {
      for (auto w : {RelativeWindow{0, 1}, RelativeWindow{0, 2}}) {
        for (std::size_t f = 0; f < fe_sets.size(); ++f) {
          cols.push_back({fmt::format("{} CAR{} ({})", sample_label(sec), window_label(w), f + 1), w, sec, fe_sets[f]});
        }
      }
    }
    std::map<std::pair<int, int>, std::vector<CrossSectionEvent>> events_by_window;
    std::vector<std::string> labels;
    std::vector<RegressionTable> tables;
    std::string notes;
    for (const auto& col : cols) {
      try {
        auto key = std::pair{col.window.first, col.window.last};
        if (!events_by_window.count(key)) {
          events_by_window[key] =
              cross_section_events(sample, in, cfg.car_model, col.window, cfg.include_intercept, cfg.workers);
        }
        const auto design = build_design(events_by_window[key], DesignSpec{col.fe, col.sample, false});
        auto table = regress(design, cfg.robust);
        std::ostringstream csv;
        write_regression_csv(csv, table);
        out.write(fmt::format("regression_{}_car{}_{}_fe{}.csv", sample_label(col.sample), col.window.first,
                              col.window.last, col.fe.size() - 1),
                  csv.str());
        labels.push_back(col.label);
        tables.push_back(std::move(table));
      } catch (const Error& e) {
        notes += fmt::format("- {}: {}: {}\n", col.label, error_code_name(e.code()), e.what());
      }
    }
    if (!tables.empty()) {
      md += markdown_regressions(fmt::format("CAR regressions ({} model CARs)", model_title(cfg.car_model)), labels,
                                 tables);
    }
    if (!notes.empty()) md += "Columns not estimated:\n\n" + notes + "\n";

    md += "## Correlations\n\n";
    guarded("correlation matrix", [&] {
      const auto key = std::pair{0, 1};
      if (!events_by_window.count(key)) {
        events_by_window[key] =
            cross_section_events(sample, in, cfg.car_model, {0, 1}, cfg.include_intercept, cfg.workers);
      }
      const auto design = build_design(events_by_window[key], DesignSpec{{}, std::nullopt, true});
      Eigen::MatrixXd data(design.X.rows(), design.X.cols());
      data.col(0) = design.y;
      data.rightCols(design.X.cols() - 1) = design.X.rightCols(design.X.cols() - 1);
      std::vector<std::string> names{"car"};
      names.insert(names.end(), design.names.begin() + 1, design.names.end());
      const auto m = correlations(data, names);
      std::ostringstream csv;
      write_correlation_csv(csv, m);
      out.write("correlations.csv", csv.str());
      return markdown_correlations("Pearson correlations (CAR[0,1] and covariates)", m);
    });

    out.write("report.md", md);
    return out.finish(name, &in, &sample, config_hash);
  }
  throw Error(ErrorCode::Config, fmt::format("unknown subcommand '{}'", name));
}

}  // namespace leakstudy
