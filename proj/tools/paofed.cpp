#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paofed/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"paofed: partial-sharing asynchronous online federated learning simulator"};
  app.require_subcommand(1);

  std::string config, preset, seeds, out_dir = "out";
  std::size_t samples = 500;
  std::vector<std::string> only;
  std::uint64_t seed = 1;
  std::optional<std::size_t> client;
  std::string data_out = "data.csv";

  auto add_source = [&](CLI::App* cmd) {
    auto* c = cmd->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    auto* p = cmd->add_option("--preset", preset, "setting1 | setting2")
                  ->check(CLI::IsMember({"setting1", "setting2"}));
    c->excludes(p);
  };

  CLI::App* run = app.add_subcommand("run", "run the configured variants and write CSVs + manifest");
  add_source(run);
  run->add_option("--seeds", seeds, "seed count N (seeds 1..N) or comma list");
  run->add_option("--out", out_dir, "output directory")->capture_default_str();

  CLI::App* bound = app.add_subcommand("bound", "estimate the step-size bound and check each mu");
  add_source(bound);
  bound->add_option("--samples", samples, "local samples per client used for the estimate")
      ->capture_default_str();

  CLI::App* figs = app.add_subcommand("figures", "run the figure recipes into OUT/<figure id>/");
  figs->add_option("--out", out_dir, "output directory")->capture_default_str();
  figs->add_option("--seeds", seeds, "seed count N or comma list (default 10)");
  figs->add_option("--only", only, "figure ids to run (default: all)")->delimiter(',');

  CLI::App* exp = app.add_subcommand("export-data", "write a generated dataset as CSV");
  add_source(exp);
  exp->add_option("--seed", seed, "seed")->capture_default_str();
  exp->add_option("--client", client, "client id (default: the test set)");
  exp->add_option("--out", data_out, "output CSV file")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
  std::optional<std::filesystem::path> cfg_path;
  if (!config.empty()) cfg_path = config;

  if (*run) return paofed::cli::cmd_run(cfg_path, opt(preset), opt(seeds), out_dir, std::cout, std::cerr);
  if (*bound) return paofed::cli::cmd_bound(cfg_path, opt(preset), samples, std::cout, std::cerr);
  if (*figs) return paofed::cli::cmd_figures(out_dir, opt(seeds), only, std::cout, std::cerr);
  if (*exp)
    return paofed::cli::cmd_export_data(cfg_path, opt(preset), seed, client, data_out, std::cout, std::cerr);
  return 1;
}
