#include "paofed/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>

#include "paofed/error.hpp"

namespace paofed {

using nlohmann::json;

std::vector<ExperimentConfig> ExperimentPlan::expand() const {
  std::vector<ExperimentConfig> out;
  out.reserve(algorithms.size());
  for (const AlgoConfig& a : algorithms) {
    out.push_back(base);
    out.back().algo = a;
  }
  return out;
}

AsyncConfig async_preset(std::string_view name) {
  AsyncConfig a;
  if (name == "setting1") {
    a.availability_groups = {0.25, 0.1, 0.025, 0.005};
    a.delay_base = 0.2;
    a.delay_granularity = 1;
    a.l_max = 10;
  } else if (name == "setting2") {
    a.availability_groups = {0.025, 0.01, 0.0025, 0.0005};
    a.delay_base = 0.4;
    a.delay_granularity = 10;
    a.l_max = 60;
  } else {
    throw ConfigError("preset", "unknown preset '" + std::string(name) +
                                    "' (expected setting1 or setting2)");
  }
  return a;
}

ExperimentPlan preset_plan(std::string_view name) {
  ExperimentPlan plan;
  plan.preset = std::string(name);
  plan.base.async = async_preset(name);
  plan.seeds = parse_seed_spec("10");
  return plan;
}

namespace {

struct NamedSpec {
  std::string_view name;
  Variant variant;
  SharingMode mode;
  bool reuse_local;
  bool geometric_alpha;
};

constexpr NamedSpec kNamed[] = {
    {"PAO-Fed-C0", Variant::kPaoFed, SharingMode::kCoordinated, false, false},
    {"PAO-Fed-C1", Variant::kPaoFed, SharingMode::kCoordinated, true, false},
    {"PAO-Fed-C2", Variant::kPaoFed, SharingMode::kCoordinated, true, true},
    {"PAO-Fed-U0", Variant::kPaoFed, SharingMode::kUncoordinated, false, false},
    {"PAO-Fed-U1", Variant::kPaoFed, SharingMode::kUncoordinated, true, false},
    {"PSO-Fed", Variant::kPsoFed, SharingMode::kCoordinated, true, false},
    {"Online-Fed", Variant::kOnlineFed, SharingMode::kUncoordinated, false, false},
    {"Online-FedSGD", Variant::kOnlineFedSgd, SharingMode::kUncoordinated, false, false},
};

const NamedSpec* find_named(std::string_view name) {
  for (const NamedSpec& s : kNamed)
    if (s.name == name) return &s;
  return nullptr;
}

std::string_view mode_name(SharingMode m) {
  return m == SharingMode::kCoordinated ? "coordinated" : "uncoordinated";
}

// --- typed field access with JSON paths in errors -------------------------

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) fail(path, "must be nonnegative");
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    fail(path, "seeds must be nonnegative integers");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "(root)" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::vector<double> get_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

DelayWeightSchedule parse_alpha(const json& v, const std::string& path, std::size_t l_max) {
  check_keys(v, path, {"kind", "base", "weights"});
  try {
    if (v.contains("weights")) return DelayWeightSchedule(get_number_list(v["weights"], path + ".weights"));
    const std::string kind = v.contains("kind") ? get_string(v["kind"], path + ".kind") : "flat";
    if (kind == "flat") return DelayWeightSchedule::flat(l_max);
    if (kind == "geometric") {
      const double base = v.contains("base") ? get_number(v["base"], path + ".base") : 0.2;
      return DelayWeightSchedule::geometric(base, l_max);
    }
    fail(path + ".kind", "expected flat or geometric");
  } catch (const ParameterError& e) {
    fail(path, e.what());
  }
}

AlgoConfig parse_algorithm(const json& v, const std::string& path, double default_mu,
                           std::size_t l_max) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (!is_named_algorithm(name)) fail(path, "unknown algorithm '" + name + "'");
    return named_algorithm(name, default_mu, l_max);
  }
  check_keys(v, path, {"name", "variant", "mu", "m", "mode", "reuse_local", "alpha", "subsample_size"});
  if (!v.contains("name")) fail(path + ".name", "required");
  const std::string name = get_string(v["name"], path + ".name");

  AlgoConfig a;
  if (is_named_algorithm(name)) {
    a = named_algorithm(name, default_mu, l_max);
  } else {
    if (!v.contains("variant")) fail(path + ".variant", "required for custom algorithm '" + name + "'");
    a.name = name;
    a.mu = default_mu;
    a.alpha = DelayWeightSchedule::flat(l_max);
  }
  a.name = name;
  if (v.contains("variant")) {
    try {
      a.variant = parse_variant(get_string(v["variant"], path + ".variant"));
    } catch (const ParameterError& e) {
      fail(path + ".variant", e.what());
    }
    if (a.variant == Variant::kOnlineFed && !a.subsample_size) a.subsample_size = kDefaultSubsample;
  }
  if (v.contains("mu")) a.mu = get_number(v["mu"], path + ".mu");
  if (v.contains("m")) a.m = get_count(v["m"], path + ".m");
  if (v.contains("mode")) {
    const std::string mode = get_string(v["mode"], path + ".mode");
    if (mode == "coordinated")
      a.mode = SharingMode::kCoordinated;
    else if (mode == "uncoordinated")
      a.mode = SharingMode::kUncoordinated;
    else
      fail(path + ".mode", "expected coordinated or uncoordinated");
  }
  if (v.contains("reuse_local")) a.reuse_local = get_bool(v["reuse_local"], path + ".reuse_local");
  if (v.contains("alpha")) a.alpha = parse_alpha(v["alpha"], path + ".alpha", l_max);
  if (v.contains("subsample_size")) {
    if (v["subsample_size"].is_null())
      a.subsample_size.reset();
    else
      a.subsample_size = get_count(v["subsample_size"], path + ".subsample_size");
  }
  return a;
}

}  // namespace

bool is_named_algorithm(std::string_view name) { return find_named(name) != nullptr; }

AlgoConfig named_algorithm(std::string_view name, double mu, std::size_t l_max) {
  const NamedSpec* spec = find_named(name);
  if (!spec) throw ConfigError("name", "unknown algorithm '" + std::string(name) + "'");
  AlgoConfig a;
  a.name = std::string(name);
  a.variant = spec->variant;
  a.mu = mu;
  a.m = 4;
  a.mode = spec->mode;
  a.reuse_local = spec->reuse_local;
  a.alpha = spec->geometric_alpha ? DelayWeightSchedule::geometric(0.2, l_max)
                                  : DelayWeightSchedule::flat(l_max);
  if (a.variant == Variant::kOnlineFed) a.subsample_size = kDefaultSubsample;
  return a;
}

ExperimentPlan parse_config(const json& doc, bool check_mu) {
  check_keys(doc, "",
             {"preset", "D", "K", "N", "eval_every", "test_size", "bandwidth", "group_sizes", "seeds",
              "data", "async", "mu", "m", "algorithms", "outputs"});

  ExperimentPlan plan;
  if (doc.contains("preset")) {
    plan = preset_plan(get_string(doc["preset"], "preset"));
  } else {
    plan.seeds = parse_seed_spec("10");
  }
  ExperimentConfig& b = plan.base;
  if (doc.contains("D")) b.D = get_count(doc["D"], "D");
  if (doc.contains("K")) b.K = get_count(doc["K"], "K");
  if (doc.contains("N")) b.N = get_count(doc["N"], "N");
  if (doc.contains("eval_every")) b.eval_every = get_count(doc["eval_every"], "eval_every");
  if (doc.contains("test_size")) b.test_size = get_count(doc["test_size"], "test_size");
  if (doc.contains("bandwidth")) b.bandwidth = get_number(doc["bandwidth"], "bandwidth");
  if (doc.contains("group_sizes")) {
    const json& g = doc["group_sizes"];
    if (!g.is_array()) fail("group_sizes", "expected an array of sizes");
    b.group_sizes.clear();
    for (std::size_t i = 0; i < g.size(); ++i)
      b.group_sizes.push_back(get_count(g[i], "group_sizes[" + std::to_string(i) + "]"));
  }
  if (doc.contains("seeds")) {
    const json& s = doc["seeds"];
    plan.seeds.clear();
    if (s.is_array()) {
      for (std::size_t i = 0; i < s.size(); ++i)
        plan.seeds.push_back(get_seed(s[i], "seeds[" + std::to_string(i) + "]"));
    } else {
      const std::size_t n = get_count(s, "seeds");
      for (std::size_t i = 1; i <= n; ++i) plan.seeds.push_back(i);
    }
    if (plan.seeds.empty()) fail("seeds", "need at least one seed");
  }

  if (doc.contains("data")) {
    const json& d = doc["data"];
    check_keys(d, "data", {"input_dim", "input_law", "target_fn", "coefficients", "noise_variance"});
    try {
      if (d.contains("input_dim")) b.data.input_dim = get_count(d["input_dim"], "data.input_dim");
      if (d.contains("input_law"))
        b.data.input_law = parse_input_law(get_string(d["input_law"], "data.input_law"));
      if (d.contains("target_fn"))
        b.data.target_fn = parse_target_fn(get_string(d["target_fn"], "data.target_fn"));
    } catch (const ParameterError& e) {
      fail("data", e.what());
    }
    if (d.contains("coefficients")) b.data.coefficients = get_number_list(d["coefficients"], "data.coefficients");
    if (d.contains("noise_variance"))
      b.data.noise_variance = get_number(d["noise_variance"], "data.noise_variance");
  }

  if (doc.contains("async")) {
    const json& a = doc["async"];
    check_keys(a, "async", {"availability_groups", "delay_base", "delay_granularity", "l_max", "overflow"});
    if (a.contains("availability_groups"))
      b.async.availability_groups = get_number_list(a["availability_groups"], "async.availability_groups");
    if (a.contains("delay_base")) b.async.delay_base = get_number(a["delay_base"], "async.delay_base");
    if (a.contains("delay_granularity"))
      b.async.delay_granularity = get_count(a["delay_granularity"], "async.delay_granularity");
    if (a.contains("l_max")) b.async.l_max = get_count(a["l_max"], "async.l_max");
    if (a.contains("overflow")) {
      const std::string o = get_string(a["overflow"], "async.overflow");
      if (o == "clamp")
        b.async.overflow = DelayOverflow::kClamp;
      else if (o == "drop")
        b.async.overflow = DelayOverflow::kDrop;
      else
        fail("async.overflow", "expected clamp or drop");
    }
    for (std::size_t i = 0; i < b.async.availability_groups.size(); ++i) {
      const double p = b.async.availability_groups[i];
      if (!(p >= 0.0 && p <= 1.0))
        fail("async.availability_groups[" + std::to_string(i) + "]", "probability must lie in [0, 1]");
    }
    if (!(b.async.delay_base >= 0.0 && b.async.delay_base < 1.0))
      fail("async.delay_base", "must lie in [0, 1)");
  }

  const double default_mu = doc.contains("mu") ? get_number(doc["mu"], "mu") : kDefaultMu;
  b.algo.mu = default_mu;
  std::optional<std::size_t> default_m;
  if (doc.contains("m")) {
    default_m = get_count(doc["m"], "m");
    if (*default_m < 1 || *default_m > b.D)
      fail("m", "must satisfy 1 <= m <= D (m=" + std::to_string(*default_m) + ", D=" + std::to_string(b.D) + ")");
  }
  b.algo.alpha = DelayWeightSchedule::flat(b.async.l_max);
  if (doc.contains("algorithms")) {
    const json& algos = doc["algorithms"];
    if (!algos.is_array()) fail("algorithms", "expected an array");
    for (std::size_t i = 0; i < algos.size(); ++i)
    {
      plan.algorithms.push_back(
          parse_algorithm(algos[i], "algorithms[" + std::to_string(i) + "]", default_mu, b.async.l_max));
      const bool own_m = algos[i].is_object() && algos[i].contains("m");
      if (default_m && !own_m && !plan.algorithms.back().full_sharing()) plan.algorithms.back().m = *default_m;
    }
  }
  if (plan.algorithms.empty()) fail("algorithms", "need at least one algorithm");

  std::set<std::string> names;
  for (std::size_t i = 0; i < plan.algorithms.size(); ++i) {
    const std::string path = "algorithms[" + std::to_string(i) + "]";
    if (!names.insert(plan.algorithms[i].name).second) fail(path + ".name", "duplicate algorithm name");
    if (!names.insert(sanitize_name(plan.algorithms[i].name) + "#file").second)
      fail(path + ".name", "name collides with another after sanitizing");
    ExperimentConfig cfg = b;
    cfg.algo = plan.algorithms[i];
    if (!check_mu) cfg.algo.mu = 1.0;
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      const std::string& f = e.field();
      const bool algo_field = f == "m" || f == "mu" || f == "alpha" || f == "subsample_size";
      if (!algo_field) throw;
      const std::string msg = std::string(e.what()).substr(f.size() + 2);
      fail(path + "." + f, msg);
    }
  }
  return plan;
}

ExperimentPlan load_config(const std::filesystem::path& path, bool check_mu) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("(file)", "parse error in " + path.string() + ": " + e.what());
  }
  return parse_config(doc, check_mu);
}

json to_json(const ExperimentPlan& plan) {
  const ExperimentConfig& b = plan.base;
  json doc;
  if (!plan.preset.empty()) doc["preset"] = plan.preset;
  doc["D"] = b.D;
  doc["K"] = b.K;
  doc["N"] = b.N;
  doc["eval_every"] = b.eval_every;
  doc["test_size"] = b.test_size;
  doc["bandwidth"] = b.bandwidth;
  doc["group_sizes"] = b.group_sizes.empty()
                           ? std::vector<std::size_t>(std::begin(kDefaultGroupSizes), std::end(kDefaultGroupSizes))
                           : b.group_sizes;
  doc["seeds"] = plan.seeds;
  doc["data"] = {{"input_dim", b.data.input_dim},
                 {"input_law", std::string(to_string(b.data.input_law))},
                 {"target_fn", std::string(to_string(b.data.target_fn))},
                 {"coefficients", b.data.coefficients},
                 {"noise_variance", b.data.noise_variance}};
  doc["async"] = {{"availability_groups", b.async.availability_groups},
                  {"delay_base", b.async.delay_base},
                  {"delay_granularity", b.async.delay_granularity},
                  {"l_max", b.async.l_max},
                  {"overflow", b.async.overflow == DelayOverflow::kClamp ? "clamp" : "drop"}};
  doc["mu"] = b.algo.mu;
  json algos = json::array();
  for (const AlgoConfig& a : plan.algorithms) {
    json j = {{"name", a.name},
              {"variant", std::string(to_string(a.variant))},
              {"mu", a.mu},
              {"m", a.m},
              {"mode", std::string(mode_name(a.mode))},
              {"reuse_local", a.reuse_local},
              {"alpha", {{"weights", std::vector<double>(a.alpha.weights().begin(), a.alpha.weights().end())}}}};
    j["subsample_size"] = a.subsample_size ? json(*a.subsample_size) : json(nullptr);
    algos.push_back(std::move(j));
  }
  doc["algorithms"] = std::move(algos);
  return doc;
}

// --- figure recipes ---------------------------------------------------------

namespace {

AlgoConfig with_m(AlgoConfig a, std::size_t m) {
  a.m = m;
  a.name += " (m=" + std::to_string(m) + ")";
  return a;
}

}  // namespace

FigureRecipe figure_recipe(FigureName name) {
  FigureRecipe r;
  r.name = name;
  switch (name) {
    case FigureName::kFig1Coordination: {
      r.id = "fig1_coordination";
      r.title = "PAO-Fed performance on Setting I";
      r.setting = "setting1";
      const std::size_t l_max = async_preset(r.setting).l_max;
      for (auto n : {"Online-FedSGD", "PAO-Fed-C0", "PAO-Fed-C1", "PAO-Fed-U0", "PAO-Fed-U1"})
        r.variants.push_back(named_algorithm(n, kDefaultMu, l_max));
      break;
    }
    case FigureName::kFig2MAndAlpha: {
      r.id = "fig2_m_and_alpha";
      r.title = "Choice of m and alpha on Setting I";
      r.setting = "setting1";
      const std::size_t l_max = async_preset(r.setting).l_max;
      const AlgoConfig u1 = named_algorithm("PAO-Fed-U1", kDefaultMu, l_max);
      r.variants = {named_algorithm("Online-FedSGD", kDefaultMu, l_max),
                    named_algorithm("Online-Fed", kDefaultMu, l_max),
                    with_m(u1, 1),
                    u1,
                    with_m(u1, 32),
                    named_algorithm("PAO-Fed-C2", kDefaultMu, l_max)};
      break;
    }
    case FigureName::kFig3Setting2: {
      r.id = "fig3_setting2";
      r.title = "Performance on Setting II";
      r.setting = "setting2";
      const std::size_t l_max = async_preset(r.setting).l_max;
      for (auto n : {"Online-FedSGD", "Online-Fed", "PAO-Fed-U1", "PAO-Fed-C2"})
        r.variants.push_back(named_algorithm(n, kDefaultMu, l_max));
      break;
    }
  }
  return r;
}

FigureRecipe figure_recipe(std::string_view id) {
  for (const FigureRecipe& r : all_figure_recipes())
    if (r.id == id || r.id.substr(0, 4) == id) return r;
  throw ConfigError("figure", "unknown figure '" + std::string(id) + "'");
}

std::vector<FigureRecipe> all_figure_recipes() {
  return {figure_recipe(FigureName::kFig1Coordination), figure_recipe(FigureName::kFig2MAndAlpha),
          figure_recipe(FigureName::kFig3Setting2)};
}

ExperimentPlan recipe_plan(const FigureRecipe& recipe, std::vector<std::uint64_t> seeds) {
  ExperimentPlan plan = preset_plan(recipe.setting);
  plan.algorithms = recipe.variants;
  plan.base.algo = recipe.variants.front();
  if (!seeds.empty()) plan.seeds = std::move(seeds);
  return plan;
}

std::vector<std::uint64_t> parse_seed_spec(std::string_view spec) {
  auto parse_one = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw ConfigError("seeds", "cannot parse '" + std::string(spec) + "'");
    return v;
  };
  std::vector<std::uint64_t> seeds;
  if (spec.find(',') == std::string_view::npos) {
    const std::uint64_t n = parse_one(spec);
    if (n == 0) throw ConfigError("seeds", "need at least one seed");
    for (std::uint64_t i = 1; i <= n; ++i) seeds.push_back(i);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string_view part = spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start);
    if (!part.empty()) seeds.push_back(parse_one(part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw ConfigError("seeds", "need at least one seed");
  return seeds;
}

std::string sanitize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')
      out += c;
    else if (c == ' ')
      out += '_';
  }
  return out.empty() ? "variant" : out;
}

}  // namespace paofed
