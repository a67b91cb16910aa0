// leakstudy: leak detection and event-study command line.
//
//   leakstudy match   --config run.json [--horizon-days 60]
//   leakstudy study   --config run.json --model capm --anchor leak --windows preset --split timing
//   leakstudy volume  --config run.json
//   leakstudy regress --config run.json --car-window 0:1 --sample fin --fe timeofday,day,year
//   leakstudy correlations --config run.json
//   leakstudy report  --config run.json
//   leakstudy simulate --spec sim.txt --out DIR
//   leakstudy power   --spec sim.txt --model madj --trials 200 --offset 2 --truth-bp -21
//
// Failures print one line "error: CODE: message" on stderr and exit with the
// code's numeric value.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "leakstudy/error.hpp"
#include "leakstudy/pipeline.hpp"
#include "leakstudy/simkit.hpp"
#include "leakstudy/tables.hpp"

using namespace leakstudy;

namespace {

struct Overrides {
  std::string config;
  std::string data_dir;
  std::string out;
  int workers = 0;
  // match
  std::string headlines, announcements, calendars;
  int horizon_days = 0;
  // study / volume
  std::string model, anchor, windows, split;
  bool two_sided = false;
  bool intercept = false;
  // regress / correlations
  std::string car_window, car_model, sample, fe;
  bool robust = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--data-dir", o.data_dir, "directory with default-named input files");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--workers", o.workers, "worker threads (results do not depend on it)");
}

RunConfig build_config(const Overrides& o) {
  RunConfig c;
  if (!o.config.empty()) c = load_config(o.config);
  if (!o.data_dir.empty()) c.data_dir = o.data_dir;
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.workers > 0) c.workers = o.workers;
  if (!o.headlines.empty()) c.inputs["headlines"] = o.headlines;
  if (!o.announcements.empty()) c.inputs["announcements"] = o.announcements;
  if (!o.calendars.empty()) c.inputs["calendar"] = o.calendars;
  if (o.horizon_days > 0) c.horizon_days = o.horizon_days;
  if (!o.model.empty()) c.model = parse_model_kind(o.model);
  if (!o.anchor.empty()) {
    if (o.anchor == "leak") {
      c.anchor = AnchorRole::Leak;
    } else if (o.anchor == "announce") {
      c.anchor = AnchorRole::Announcement;
    } else {
      throw Error(ErrorCode::Config, "--anchor must be leak or announce");
    }
  }
  if (!o.windows.empty() && o.windows != "preset") {
    c.windows.clear();
    std::stringstream ss(o.windows);
    std::string item;
    while (std::getline(ss, item, ',')) c.windows.push_back(parse_window(item));
  } else if (o.windows == "preset") {
    c.windows.clear();
  }
  if (!o.split.empty()) c.split = parse_split(o.split);
  if (o.two_sided) c.two_sided = true;
  if (o.intercept) c.include_intercept = true;
  if (!o.car_window.empty()) c.car_window = parse_window(o.car_window);
  if (!o.car_model.empty()) c.car_model = parse_model_kind(o.car_model);
  if (!o.sample.empty()) c.sample = parse_sample(o.sample);
  if (!o.fe.empty()) c.fixed_effects = parse_fixed_effects(o.fe);
  if (o.robust) c.robust = true;
  return c;
}

Alternative parse_alternative(const std::string& s) {
  if (s == "less") return Alternative::Less;
  if (s == "greater") return Alternative::Greater;
  if (s == "two-sided") return Alternative::TwoSided;
  if (s == "sign") return Alternative::EstimateSign;
  throw Error(ErrorCode::Config, "--alternative must be less, greater, two-sided or sign");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leak detection and event-study toolkit"};
  app.require_subcommand(1);
  Overrides o;

  auto* match = app.add_subcommand("match", "match headlines to announcements; writes leaks.csv");
  add_common(match, o);
  match->add_option("--headlines", o.headlines);
  match->add_option("--announcements", o.announcements);
  match->add_option("--calendars", o.calendars);
  match->add_option("--horizon-days", o.horizon_days);

  auto* study = app.add_subcommand("study", "daily AAR/CAAR tables (and intraday CAAR for leaks)");
  add_common(study, o);
  study->add_option("--model", o.model, "madj|capm|ff3|carhart");
  study->add_option("--anchor", o.anchor, "leak|announce");
  study->add_option("--windows", o.windows, "preset or a:b[,c:d...]");
  study->add_option("--split", o.split, "all|timing|sector");
  study->add_flag("--two-sided", o.two_sided);
  study->add_flag("--include-intercept", o.intercept);
  study->add_option("--horizon-days", o.horizon_days);

  auto* volume = app.add_subcommand("volume", "AAV/CAAV tables (daily T=20, intraday T=96)");
  add_common(volume, o);
  volume->add_option("--windows", o.windows);
  volume->add_option("--split", o.split);
  volume->add_flag("--two-sided", o.two_sided);

  auto* regress = app.add_subcommand("regress", "cross-sectional CAR regression");
  add_common(regress, o);
  regress->add_option("--car-window", o.car_window, "e.g. 0:1");
  regress->add_option("--car-model", o.car_model);
  regress->add_option("--sample", o.sample, "fin|nonfin|all");
  regress->add_option("--fe", o.fe, "timeofday,day,year,region");
  regress->add_flag("--robust", o.robust, "HC1 standard errors");
  regress->add_flag("--include-intercept", o.intercept, "alpha in the CAR model");

  auto* corr = app.add_subcommand("correlations", "correlation matrix of CAR and covariates");
  add_common(corr, o);
  corr->add_option("--car-window", o.car_window);
  corr->add_option("--car-model", o.car_model);
  corr->add_option("--sample", o.sample);

  auto* report = app.add_subcommand("report", "every table plus report.md");
  add_common(report, o);
  report->add_option("--car-model", o.car_model);
  report->add_flag("--include-intercept", o.intercept);

  std::string spec_path;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset in the input formats");
  simulate->add_option("--spec", spec_path, "key=value spec file")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();

  int trials = 200;
  double alpha = 0.05;
  int offset = 0;
  double truth_bp = 0.0;
  std::string alternative = "sign";
  std::string power_model = "madj";
  std::string power_out;
  int power_workers = 1;
  auto* power = app.add_subcommand("power", "empirical size/power of the daily AAR test");
  power->add_option("--spec", spec_path)->required();
  power->add_option("--model", power_model);
  power->add_option("--trials", trials);
  power->add_option("--alpha", alpha);
  power->add_option("--offset", offset);
  power->add_option("--truth-bp", truth_bp);
  power->add_option("--alternative", alternative, "less|greater|two-sided|sign");
  power->add_option("--out", power_out)->required();
  power->add_option("--workers", power_workers);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const SimSpec spec = read_sim_spec(spec_path);
      write_dataset(generate(spec), sim_out);
      std::vector<std::string> files;
      for (const auto& e : std::filesystem::directory_iterator(sim_out)) {
        if (e.path().filename() != "manifest.json") files.push_back(e.path().filename().string());
      }
      std::sort(files.begin(), files.end());
      std::cout << write_manifest(sim_out, "simulate", {{"spec", sha256_file(spec_path)}}, "", files) << "\n";
      return 0;
    }
    if (power->parsed()) {
      const SimSpec spec = read_sim_spec(spec_path);
      PowerSizeConfig pc;
      pc.model = parse_model_kind(power_model);
      pc.alpha = alpha;
      pc.trials = trials;
      pc.test_offset = offset;
      pc.truth = truth_bp * 1e-4;
      pc.alternative = parse_alternative(alternative);
      pc.workers = power_workers;
      const auto r = power_size(spec, pc);
      std::filesystem::create_directories(power_out);
      std::ofstream f(std::filesystem::path(power_out) / "power.csv", std::ios::binary);
      f << "model,offset,trials,alpha,rejections,rejection_rate,mean_estimate,sd_estimate,mean_std_err,covered\n";
      f << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", power_model, offset, r.trials, fmt_num(alpha), r.rejections,
                       fmt_num(r.rejection_rate), fmt_num(r.mean_estimate), fmt_num(r.sd_estimate),
                       fmt_num(r.mean_std_err), r.covered);
      f.close();
      std::cout << write_manifest(power_out, "power", {{"spec", sha256_file(spec_path)}}, "", {"power.csv"}) << "\n";
      return 0;
    }
    for (auto* cmd : {match, study, volume, regress, corr, report}) {
      if (cmd->parsed()) {
        std::cout << run_subcommand(cmd->get_name(), build_config(o)) << "\n";
        return 0;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
