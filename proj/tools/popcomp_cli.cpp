// popcomp command line: predict, run, sweep, couple, reset.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "popcomp/config.hpp"
#include "popcomp/coupling.hpp"
#include "popcomp/metrics.hpp"
#include "popcomp/rng.hpp"
#include "popcomp/steady_state.hpp"
#include "popcomp/sweep.hpp"
#include "popcomp/version.hpp"

namespace {

using nlohmann::json;
using namespace popcomp;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------- predict --

struct PredictArgs {
  double r0 = -1.0;
  double x0 = -1.0;
  double y0 = -1.0;
  int levels = 10;
  double zeta = -1.0;
  double p = -1.0;
  std::string out;
};

int cmd_predict(const PredictArgs& args) {
  const bool split = args.x0 >= 0.0 || args.y0 >= 0.0;
  if (split && args.r0 >= 0.0)
    throw ConfigError("give either --r0 or --x0/--y0, not both");
  double x0 = 0.0, y0 = 0.0;
  if (split) {
    if (args.x0 < 0.0 || args.y0 < 0.0) throw ConfigError("--x0 and --y0 go together");
    x0 = args.x0;
    y0 = args.y0;
  } else {
    if (args.r0 < 0.0) throw ConfigError("one of --r0 or --x0/--y0 is required");
    x0 = args.r0;
  }
  if (x0 > 1.0 || y0 > 1.0 || x0 + y0 > 1.0)
    throw ConfigError("fractions must lie in [0, 1] with x0 + y0 <= 1");
  if (args.levels < 0) throw ConfigError("--levels must be nonnegative");

  const double r0 = x0 + y0;
  const auto r = predict_r(r0, args.levels);
  const auto xy = predict_xy(x0, y0, args.levels);
  std::optional<std::vector<double>> fp, fn, coin;
  if (args.zeta >= 0.0) {
    fp = predict_fp_leak(r0, args.zeta, args.levels);
    fn = predict_fn_leak(r0, args.zeta, args.levels);
  }
  if (args.p >= 0.0) coin = predict_coin(r0, args.p, args.levels);

  std::ostringstream csv;
  csv << "level,r_tilde,x_tilde,y_tilde";
  if (fp) csv << ",r_fp,r_fn";
  if (coin) csv << ",r_coin";
  csv << "\n";
  for (int l = 0; l <= args.levels; ++l) {
    csv << l << ',' << format_double(r[l]) << ',' << format_double(xy.x_tilde[l]) << ','
        << format_double(xy.y_tilde[l]);
    if (fp) csv << ',' << format_double((*fp)[l]) << ',' << format_double((*fn)[l]);
    if (coin) csv << ',' << format_double((*coin)[l]);
    csv << "\n";
  }

  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(args.out, csv.str());
    json meta;
    meta["x0"] = x0;
    meta["y0"] = y0;
    meta["r0"] = r0;
    meta["levels"] = args.levels;
    if (args.zeta >= 0.0) meta["zeta"] = args.zeta;
    if (args.p >= 0.0) meta["p"] = args.p;
    meta["tool_version"] = kVersion;
    write_file(args.out + ".meta.json", meta.dump(2) + "\n");
  }
  return 0;
}

// -------------------------------------------------------------------- run --

json trace_events_json(const Trace& trace) {
  json events = json::array();
  for (const auto& ev : trace.events)
    events.push_back(
        {{"step", ev.step}, {"at", ev.at_ptime}, {"x0", ev.x0}, {"y0", ev.y0}});
  return events;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_prefix) {
  RunSpec spec = load_run_config(config_path);
  if (seed) spec.seed = *seed;

  RunResult result = run_spec(spec, SplitRng::substream(spec.seed, 0));
  write_file(out_prefix + ".csv", result.trace.to_csv());

  const auto& last = result.trace.snapshots.back();
  json side;
  side["config"] = json::parse(config_echo_json(spec));
  side["seed"] = spec.seed;
  side["events"] = trace_events_json(result.trace);
  json final;
  final["step"] = last.step;
  final["ptime"] = last.ptime;
  final["x0"] = last.baseline_x;
  final["y0"] = last.baseline_y;
  final["neutral"] = last.neutral;
  final["strong_x"] = last.strong_x();
  final["strong_y"] = last.strong_y();
  final["out_x"] = last.out_x;
  final["out_y"] = last.out_y;
  final["out_undecided"] = last.out_undecided;
  final["leaks"] = last.leaks;
  side["final"] = final;
  if (result.trace.first_all_neutral_ptime)
    side["first_all_neutral_ptime"] = *result.trace.first_all_neutral_ptime;
  if (result.trace.first_level_cap_ptime)
    side["first_level_cap_ptime"] = *result.trace.first_level_cap_ptime;
  write_file(out_prefix + ".json", side.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------ sweep --

int cmd_sweep(const std::string& config_path, const std::string& out,
              const std::string& rep_csv) {
  const RunSpec spec = load_run_config(config_path);
  const SweepSummary summary = replicate(spec);
  const std::string doc = summary_to_json(summary, spec) + "\n";
  if (out.empty())
    std::cout << doc;
  else
    write_file(out, doc);
  if (!rep_csv.empty()) write_file(rep_csv, per_rep_csv(summary));
  return 0;
}

// ----------------------------------------------------------------- couple --

int cmd_couple(const std::string& config_path, const std::string& properties,
               std::optional<std::uint64_t> steps_override, std::uint64_t check_every,
               const std::string& construction, const std::string& out) {
  RunSpec spec = load_run_config(config_path);
  std::vector<CouplingProperty> props;
  std::stringstream ss(properties);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "P1")
      props.push_back(CouplingProperty::P1);
    else if (tok == "P2")
      props.push_back(CouplingProperty::P2);
    else if (tok == "P3")
      props.push_back(CouplingProperty::P3);
    else
      throw ConfigError("unknown property '" + tok + "' (expected P1, P2 or P3)");
  }
  if (props.empty()) throw ConfigError("--properties must name at least one of P1,P2,P3");

  SplitRng rng = SplitRng::substream(spec.seed, 0);
  CoupledRun coupled = [&] {
    if (construction == "split") {
      Population u = make_initial(spec.params, spec.x0, spec.y0, spec.rest_policy, rng);
      return CoupledRun::split_construction(std::move(u));
    }
    if (construction == "independent") {
      // negative control: three unrelated populations
      std::vector<Population> pops;
      for (int k = 0; k < 3; ++k)
        pops.push_back(
            make_initial(spec.params, spec.x0, spec.y0, RestPolicy::Arbitrary, rng));
      return CoupledRun::of_populations(std::move(pops));
    }
    throw ConfigError("unknown construction '" + construction + "'");
  }();

  const std::uint64_t steps = steps_override.value_or(spec.total_steps());
  const CouplingReport report = run_coupled(coupled, props, steps, rng, check_every);

  json doc;
  doc["config"] = json::parse(config_echo_json(spec));
  doc["construction"] = construction;
  doc["properties"] = properties;
  doc["steps"] = report.steps_run;
  doc["checks"] = report.checks_run;
  doc["total_violations"] = report.total_violations;
  json viol = json::array();
  for (const auto& v : report.violations) {
    const char* name = v.property == CouplingProperty::P1   ? "P1"
                       : v.property == CouplingProperty::P2 ? "P2"
                                                            : "P3";
    viol.push_back({{"step", v.step}, {"property", name}, {"index", v.index}});
  }
  doc["violations"] = viol;
  const std::string text = doc.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

// ------------------------------------------------------------------ reset --

int cmd_reset(std::uint64_t n, std::optional<int> s, const std::string& variant_name,
              std::optional<double> p, std::uint32_t seeds, double horizon,
              const std::string& init_name, std::uint64_t seed0, const std::string& out) {
  const Variant variant = parse_variant(variant_name);
  const ProtocolParams params =
      ProtocolParams::make(n, variant, s, std::nullopt, p.value_or(1.0));
  ResetInit init;
  if (init_name == "all_neutral")
    init = ResetInit::AllNeutral;
  else if (init_name == "all_level1")
    init = ResetInit::AllLevelOne;
  else if (init_name == "arbitrary")
    init = ResetInit::ArbitraryNoBaselines;
  else
    throw ConfigError("unknown init '" + init_name + "'");

  json runs = json::array();
  std::vector<double> hits;
  for (std::uint32_t r = 0; r < seeds; ++r) {
    SplitRng rng = SplitRng::substream(seed0, r);
    const ResetResult res = reset_experiment(params, init, horizon, rng);
    json entry;
    entry["seed_stream"] = r;
    entry["steps"] = res.steps_run;
    entry["first_hit_ptime"] =
        res.level_cap_ptime ? json(*res.level_cap_ptime) : json("not reached");
    entry["all_neutral_ptime"] =
        res.all_neutral_ptime ? json(*res.all_neutral_ptime) : json("not reached");
    runs.push_back(entry);
    hits.push_back(res.level_cap_ptime.value_or(horizon));
  }
  std::sort(hits.begin(), hits.end());
  json doc;
  doc["n"] = n;
  doc["s"] = params.s;
  doc["variant"] = to_string(variant);
  if (variant == Variant::CoinDetection) doc["p"] = params.p;
  doc["init"] = init_name;
  doc["horizon_ptime"] = horizon;
  doc["seed"] = seed0;
  doc["seeds"] = seeds;
  doc["rng"] = SplitRng::kName;
  doc["runs"] = runs;
  doc["median_first_hit_ptime"] = hits.empty() ? 0.0 : hits[hits.size() / 2];
  const std::string text = doc.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PopComp comparison-dynamics simulator and analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  PredictArgs pargs;
  auto* predict = app.add_subcommand("predict", "steady-state level predictions (CSV)");
  predict->add_option("--r0", pargs.r0, "baseline fraction (merged colors)");
  predict->add_option("--x0", pargs.x0, "X baseline fraction");
  predict->add_option("--y0", pargs.y0, "Y baseline fraction");
  predict->add_option("--levels", pargs.levels, "levels to tabulate")->default_val(10);
  predict->add_option("--zeta", pargs.zeta, "leak rate: adds r_fp and r_fn columns");
  predict->add_option("--p", pargs.p, "coin probability: adds the r_coin column");
  predict->add_option("--out", pargs.out, "output CSV path (default stdout)");

  std::string run_config, run_out = "run";
  std::optional<std::uint64_t> run_seed;
  auto* runc = app.add_subcommand("run", "single simulation -> trace CSV + JSON sidecar");
  runc->add_option("--config", run_config, "run configuration (JSON)")->required();
  runc->add_option("--seed", run_seed, "override the config seed");
  runc->add_option("--out", run_out, "output prefix (PREFIX.csv, PREFIX.json)");

  std::string sweep_config, sweep_out, sweep_rep_csv;
  auto* sweep = app.add_subcommand("sweep", "replicated runs -> summary JSON");
  sweep->add_option("--config", sweep_config, "sweep configuration (JSON)")->required();
  sweep->add_option("--out", sweep_out, "summary path (default stdout)");
  sweep->add_option("--rep-csv", sweep_rep_csv, "per-replication metrics CSV");

  std::string couple_config, couple_props = "P2,P3", couple_out,
              couple_construction = "split";
  std::optional<std::uint64_t> couple_steps;
  std::uint64_t couple_check_every = 1;
  auto* couple = app.add_subcommand("couple", "coupled populations property check");
  couple->add_option("--config", couple_config, "base configuration (JSON)")->required();
  couple->add_option("--properties", couple_props, "comma list of P1,P2,P3");
  couple->add_option("--steps", couple_steps, "override step count");
  couple->add_option("--check-every", couple_check_every, "check cadence in steps");
  couple->add_option("--construction", couple_construction, "split | independent");
  couple->add_option("--out", couple_out, "report path (default stdout)");

  std::uint64_t reset_n = 0, reset_seed = 0;
  std::optional<int> reset_s;
  std::optional<double> reset_p;
  std::uint32_t reset_seeds = 1;
  double reset_horizon = 0.0;
  std::string reset_variant = "Comparison", reset_init = "all_level1", reset_out;
  auto* reset = app.add_subcommand("reset", "baseline-free decay experiment");
  reset->add_option("--n", reset_n, "population size")->required();
  reset->add_option("--s", reset_s, "level cap (default auto)");
  reset->add_option("--variant", reset_variant, "protocol variant");
  reset->add_option("--p", reset_p, "coin probability (CoinDetection)");
  reset->add_option("--seeds", reset_seeds, "number of seeds")->required();
  reset->add_option("--horizon", reset_horizon, "horizon in parallel time")->required();
  reset->add_option("--init", reset_init, "all_neutral | all_level1 | arbitrary");
  reset->add_option("--seed", reset_seed, "base seed");
  reset->add_option("--out", reset_out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
    if (predict->parsed()) return cmd_predict(pargs);
    if (runc->parsed()) return cmd_run(run_config, run_seed, run_out);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, sweep_rep_csv);
    if (couple->parsed())
      return cmd_couple(couple_config, couple_props, couple_steps, couple_check_every,
                        couple_construction, couple_out);
    if (reset->parsed())
      return cmd_reset(reset_n, reset_s, reset_variant, reset_p, reset_seeds,
                       reset_horizon, reset_init, reset_seed, reset_out);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
