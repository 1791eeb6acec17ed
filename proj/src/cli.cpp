#include "paofed/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "paofed/csv.hpp"
#include "paofed/error.hpp"

namespace paofed::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ExperimentPlan resolve_plan(const std::optional<fs::path>& config_path,
                            const std::optional<std::string>& preset, bool check_mu = true) {
  if (config_path && preset) throw ConfigError("preset", "use either --config or --preset, not both");
  if (config_path) return load_config(*config_path, check_mu);
  if (preset) {
    ExperimentPlan plan = preset_plan(*preset);
    plan.algorithms = default_algorithms(plan.base.async.l_max);
    plan.base.algo = plan.algorithms.front();
    return plan;
  }
  throw ConfigError("config", "one of --config or --preset is required");
}

}  // namespace

std::vector<AlgoConfig> default_algorithms(std::size_t l_max) {
  std::vector<AlgoConfig> out;
  for (auto n : {"Online-FedSGD", "Online-Fed", "PAO-Fed-C0", "PAO-Fed-C1", "PAO-Fed-C2", "PAO-Fed-U0",
                 "PAO-Fed-U1"})
    out.push_back(named_algorithm(n, kDefaultMu, l_max));
  return out;
}

void write_curve_csv(const SuiteResult& result, const fs::path& path) {
  std::string text = std::string(kCsvHeader) + "\n";
  for (const AveragedPoint& p : result.curve) {
    text += std::to_string(p.iteration);
    text += ',';
    text += csv::format_double(p.mse_db_mean);
    text += ',';
    text += csv::format_double(p.mse_db_std);
    text += ',';
    text += csv::format_double(p.uploads);
    text += ',';
    text += csv::format_double(p.downloads);
    text += '\n';
  }
  write_text(path, text);
}

RunOutputs run_plan(const ExperimentPlan& plan, const fs::path& out_dir, const std::string& title,
                    std::ostream& log, unsigned threads) {
  const auto configs = plan.expand();
  fs::create_directories(out_dir);
  log << "running " << configs.size() << " variant(s) x " << plan.seeds.size() << " seed(s), N="
      << plan.base.N << ", K=" << plan.base.K << ", D=" << plan.base.D << '\n';

  RunOutputs outputs;
  outputs.results = run_suite(configs, plan.seeds, threads);

  json files = json::array();
  json curves = json::array();
  for (const SuiteResult& r : outputs.results) {
    const std::string file = sanitize_name(r.name) + ".csv";
    const fs::path path = out_dir / file;
    write_curve_csv(r, path);
    outputs.csv_files.push_back(path);
    files.push_back({{"name", r.name}, {"csv", file}, {"fingerprint", hex64(r.config_fingerprint)}});
    curves.push_back({{"csv", file}, {"label", r.name}});
    log << "  " << std::left << std::setw(22) << r.name << " final "
        << std::fixed << std::setprecision(2) << r.curve.back().mse_db_mean << " dB  -> " << file << '\n';
    log.unsetf(std::ios::floatfield);
  }

  outputs.manifest = to_json(plan);
  outputs.manifest["outputs"] = files;
  write_text(out_dir / "manifest.json", outputs.manifest.dump(2) + "\n");
  json figure = {{"title", title}, {"curves", curves}};
  write_text(out_dir / "figure.json", figure.dump(2) + "\n");
  return outputs;
}

int cmd_run(const std::optional<fs::path>& config_path, const std::optional<std::string>& preset,
            const std::optional<std::string>& seeds, const fs::path& out_dir, std::ostream& out,
            std::ostream& err) {
  try {
    ExperimentPlan plan = resolve_plan(config_path, preset);
    if (seeds) plan.seeds = parse_seed_spec(*seeds);
    const std::string title = config_path ? config_path->stem().string() : *preset;
    run_plan(plan, out_dir, title, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

BoundReport check_bound(const ExperimentPlan& plan, std::size_t samples_per_client) {
  if (plan.seeds.empty()) throw ConfigError("seeds", "need at least one seed");
  ExperimentConfig cfg = plan.base;
  cfg.N = 0;
  DataFeed feed(cfg, plan.seeds.front());

  BoundReport report;
  report.bound = estimate_mu_bound(feed.streams(), feed.rff(), samples_per_client);
  report.max_eigenvalue = 2.0 / report.bound;
  for (const AlgoConfig& a : plan.algorithms) {
    std::ostringstream line;
    line << std::setprecision(6);
    if (!(a.mu > 0.0)) {
      line << "INVALID " << a.name << ": mu=" << a.mu << " must be positive";
      report.any_invalid = true;
    } else if (a.mu < report.bound) {
      line << "OK " << a.name << ": mu=" << a.mu << " < " << report.bound;
    } else {
      line << "WARNING " << a.name << ": mu=" << a.mu << " is not below the estimated bound "
           << report.bound << "; the mean recursion may diverge";
    }
    report.lines.push_back(line.str());
  }
  return report;
}

int cmd_bound(const std::optional<fs::path>& config_path, const std::optional<std::string>& preset,
              std::size_t samples_per_client, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentPlan plan = resolve_plan(config_path, preset, /*check_mu=*/false);
    const BoundReport report = check_bound(plan, samples_per_client);
    out << std::setprecision(6) << "mu_bound " << report.bound << " (max eigenvalue "
        << report.max_eigenvalue << ", " << plan.base.K << " clients, up to " << samples_per_client
        << " samples each, seed " << plan.seeds.front() << ")\n";
    if (samples_per_client < plan.base.D)
      out << "note: fewer samples per client than D; the correlation estimate is rank deficient\n";
    for (const std::string& l : report.lines) out << l << '\n';
    return report.any_invalid ? 1 : 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_figures(const fs::path& out_dir, const std::optional<std::string>& seeds,
                const std::vector<std::string>& only, std::ostream& out, std::ostream& err) {
  try {
    std::vector<FigureRecipe> recipes;
    if (only.empty())
      recipes = all_figure_recipes();
    else
      for (const std::string& id : only) recipes.push_back(figure_recipe(id));
    const auto seed_list = seeds ? parse_seed_spec(*seeds) : parse_seed_spec("10");
    for (const FigureRecipe& r : recipes) {
      out << r.id << ": " << r.title << '\n';
      run_plan(recipe_plan(r, seed_list), out_dir / r.id, r.title, out);
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_export_data(const std::optional<fs::path>& config_path, const std::optional<std::string>& preset,
                    std::uint64_t seed, std::optional<std::size_t> client, const fs::path& out_file,
                    std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = resolve_plan(config_path, preset).base;
    cfg.N = 0;
    DataFeed feed(cfg, seed);
    if (client && *client >= cfg.K) throw ConfigError("client", "client id out of range");
    const LabeledSet& set = client ? feed.streams()[*client].samples : feed.test_set();
    if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
    write_dataset_csv(set, out_file);
    out << "wrote " << set.size() << " rows to " << out_file.string() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace paofed::cli
