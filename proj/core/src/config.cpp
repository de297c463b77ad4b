#include "popcomp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "popcomp/rng.hpp"
#include "popcomp/version.hpp"

namespace popcomp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key)) fail("unknown key '" + key + "' in " + where);
  }
}

std::uint64_t get_u64(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) fail(std::string(key) + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

double get_number(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(std::string(key) + " must be a number");
  return v.get<double>();
}

std::optional<int> get_auto_or_int(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const auto& v = obj.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return std::nullopt;
    fail(std::string(key) + " must be \"auto\" or an integer");
  }
  if (!v.is_number_integer()) fail(std::string(key) + " must be \"auto\" or an integer");
  return v.get<int>();
}

GenericLeakSpec parse_generic_leak(const json& obj) {
  require_keys(obj, {"rate", "policy", "from", "to"}, "generic_leak");
  GenericLeakSpec leak;
  leak.rate = get_number(obj, "rate");
  const std::string policy = obj.at("policy").get<std::string>();
  if (policy == "fixed_rewrite") {
    leak.policy = GenericLeakSpec::Policy::FixedRewrite;
    if (!obj.contains("from") || !obj.contains("to"))
      fail("fixed_rewrite requires 'from' and 'to' states");
    leak.from = parse_state_token(obj.at("from").get<std::string>());
    leak.to = parse_state_token(obj.at("to").get<std::string>());
  } else if (policy == "worst_case_majority_flip") {
    leak.policy = GenericLeakSpec::Policy::WorstCaseMajorityFlip;
    if (obj.contains("from") || obj.contains("to"))
      fail("'from'/'to' apply to the fixed_rewrite policy only");
  } else if (policy == "random_non_catalytic") {
    leak.policy = GenericLeakSpec::Policy::RandomNonCatalytic;
    if (obj.contains("from") || obj.contains("to"))
      fail("'from'/'to' apply to the fixed_rewrite policy only");
  } else {
    fail("unknown leak policy '" + policy + "'");
  }
  return leak;
}

MetricSpec parse_metric(const json& v) {
  MetricSpec spec;
  if (v.is_string()) {
    spec.name = v.get<std::string>();
    return spec;
  }
  if (!v.is_object()) fail("metrics entries must be names or objects");
  require_keys(v, {"name", "theta", "truth", "target", "d"}, "metric");
  spec.name = v.at("name").get<std::string>();
  if (v.contains("theta")) spec.theta = v.at("theta").get<double>();
  if (v.contains("truth")) {
    const std::string t = v.at("truth").get<std::string>();
    if (t == "X")
      spec.truth = Color::X;
    else if (t == "Y")
      spec.truth = Color::Y;
    else
      fail("metric truth must be \"X\" or \"Y\"");
  }
  if (v.contains("target")) spec.target = v.at("target").get<int>();
  if (v.contains("d")) spec.d = v.at("d").get<double>();
  return spec;
}

}  // namespace

std::uint64_t RunSpec::total_steps() const {
  return static_cast<std::uint64_t>(
      std::ceil(parallel_time * static_cast<double>(params.n)));
}

std::uint64_t RunSpec::cadence_steps() const {
  const auto c = static_cast<std::uint64_t>(
      std::ceil(snapshot_every_ptime * static_cast<double>(params.n)));
  return c == 0 ? params.n : c;
}

double RunSpec::window_from_ptime() const {
  return parallel_time * (1.0 - window_fraction);
}

RunSpec parse_run_config_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document must be a JSON object");
  require_keys(doc,
               {"n", "x0", "y0", "variant", "s", "m", "p", "zeta", "generic_leak",
                "parallel_time", "snapshot_every_ptime", "switches", "rest_policy",
                "seed", "replications", "metrics", "window_fraction"},
               "config");
  if (!doc.contains("n") || !doc.contains("variant")) fail("'n' and 'variant' are required");

  RunSpec spec;
  const std::uint64_t n = get_u64(doc, "n");
  const Variant variant = parse_variant(doc.at("variant").get<std::string>());
  const std::optional<int> s = get_auto_or_int(doc, "s");
  const std::optional<int> m = get_auto_or_int(doc, "m");
  const double p = doc.contains("p") ? get_number(doc, "p") : 1.0;
  const double zeta = doc.contains("zeta") ? get_number(doc, "zeta") : 0.0;
  std::optional<GenericLeakSpec> leak;
  if (doc.contains("generic_leak")) leak = parse_generic_leak(doc.at("generic_leak"));
  spec.params = ProtocolParams::make(n, variant, s, m, p, zeta, std::move(leak));

  spec.x0 = doc.contains("x0") ? get_u64(doc, "x0") : 0;
  spec.y0 = doc.contains("y0") ? get_u64(doc, "y0") : 0;
  if (spec.x0 > n || spec.y0 > n - spec.x0) fail("x0 + y0 exceeds n");

  if (doc.contains("rest_policy")) {
    const std::string r = doc.at("rest_policy").get<std::string>();
    if (r == "all_neutral")
      spec.rest_policy = RestPolicy::AllNeutral;
    else if (r == "arbitrary")
      spec.rest_policy = RestPolicy::Arbitrary;
    else
      fail("rest_policy must be \"all_neutral\" or \"arbitrary\"");
  }

  if (doc.contains("parallel_time")) {
    spec.parallel_time = get_number(doc, "parallel_time");
    if (spec.parallel_time < 0) fail("parallel_time must be nonnegative");
  }
  if (doc.contains("snapshot_every_ptime")) {
    spec.snapshot_every_ptime = get_number(doc, "snapshot_every_ptime");
    if (!(spec.snapshot_every_ptime > 0)) fail("snapshot_every_ptime must be positive");
  }
  if (doc.contains("switches")) {
    const auto& arr = doc.at("switches");
    if (!arr.is_array()) fail("switches must be an array");
    for (const auto& sw : arr) {
      require_keys(sw, {"at", "x0", "y0"}, "switch");
      SwitchEvent ev;
      ev.at_ptime = sw.at("at").get<double>();
      ev.x0 = sw.at("x0").get<std::uint64_t>();
      ev.y0 = sw.at("y0").get<std::uint64_t>();
      if (ev.at_ptime < 0) fail("switch time must be nonnegative");
      if (ev.x0 > n || ev.y0 > n - ev.x0) fail("switch baseline counts exceed n");
      spec.switches.push_back(ev);
    }
  }
  if (doc.contains("seed")) spec.seed = get_u64(doc, "seed");
  if (doc.contains("replications")) {
    const auto r = get_u64(doc, "replications");
    if (r < 1) fail("replications must be at least 1");
    spec.replications = static_cast<std::uint32_t>(r);
  }
  if (doc.contains("window_fraction")) {
    spec.window_fraction = get_number(doc, "window_fraction");
    if (!(spec.window_fraction > 0.0 && spec.window_fraction <= 1.0))
      fail("window_fraction must be in (0, 1]");
  }
  if (doc.contains("metrics")) {
    const auto& arr = doc.at("metrics");
    if (!arr.is_array()) fail("metrics must be an array");
    for (const auto& mj : arr) spec.metrics.push_back(parse_metric(mj));
  }
  return spec;
}

RunSpec load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str());
}

std::string config_echo_json(const RunSpec& spec) {
  json doc;
  doc["n"] = spec.params.n;
  doc["variant"] = to_string(spec.params.variant);
  doc["s"] = spec.params.s;
  if (spec.params.counter_enabled()) doc["m"] = spec.params.m;
  if (spec.params.variant == Variant::CoinDetection) doc["p"] = spec.params.p;
  if (spec.params.variant == Variant::LeakFPDetection ||
      spec.params.variant == Variant::LeakFNDetection)
    doc["zeta"] = spec.params.zeta;
  if (spec.params.generic_leak) {
    const auto& g = *spec.params.generic_leak;
    json leak;
    leak["rate"] = g.rate;
    switch (g.policy) {
      case GenericLeakSpec::Policy::FixedRewrite:
        leak["policy"] = "fixed_rewrite";
        leak["from"] = to_token(g.from);
        leak["to"] = to_token(g.to);
        break;
      case GenericLeakSpec::Policy::WorstCaseMajorityFlip:
        leak["policy"] = "worst_case_majority_flip";
        break;
      case GenericLeakSpec::Policy::RandomNonCatalytic:
        leak["policy"] = "random_non_catalytic";
        break;
    }
    doc["generic_leak"] = leak;
  }
  doc["x0"] = spec.x0;
  doc["y0"] = spec.y0;
  doc["rest_policy"] = spec.rest_policy == RestPolicy::AllNeutral ? "all_neutral" : "arbitrary";
  doc["parallel_time"] = spec.parallel_time;
  doc["snapshot_every_ptime"] = spec.snapshot_every_ptime;
  if (!spec.switches.empty()) {
    json arr = json::array();
    for (const auto& sw : spec.switches)
      arr.push_back({{"at", sw.at_ptime}, {"x0", sw.x0}, {"y0", sw.y0}});
    doc["switches"] = arr;
  }
  doc["seed"] = spec.seed;
  doc["replications"] = spec.replications;
  doc["window_fraction"] = spec.window_fraction;
  if (!spec.metrics.empty()) {
    json arr = json::array();
    for (const auto& ms : spec.metrics) {
      json mj;
      mj["name"] = ms.name;
      mj["theta"] = ms.theta;
      mj["truth"] = ms.truth == Color::X ? "X" : "Y";
      mj["target"] = ms.target;
      mj["d"] = ms.d;
      arr.push_back(mj);
    }
    doc["metrics"] = arr;
  }
  doc["rng"] = SplitRng::kName;
  doc["tool_version"] = kVersion;
  return doc.dump(2);
}

}  // namespace popcomp
