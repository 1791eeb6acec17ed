#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "paofed/config.hpp"
#include "paofed/engine.hpp"

namespace paofed::cli {

inline constexpr const char* kCsvHeader = "iteration,mse_db_mean,mse_db_std,uploads,downloads";

/// Writes one averaged learning curve as CSV.
void write_curve_csv(const SuiteResult& result, const std::filesystem::path& path);

struct RunOutputs {
  nlohmann::json manifest;
  std::vector<SuiteResult> results;
  std::vector<std::filesystem::path> csv_files;
};

/// Runs every algorithm of the plan on every seed and writes into out_dir:
/// one CSV per variant, manifest.json (resolved config, seeds and outputs;
/// loadable as a config) and figure.json (curve list for the plotting script).
RunOutputs run_plan(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                    const std::string& title, std::ostream& log, unsigned threads = 0);

/// `run`: config file or preset, optional seed override. Returns an exit status.
int cmd_run(const std::optional<std::filesystem::path>& config_path,
            const std::optional<std::string>& preset, const std::optional<std::string>& seeds,
            const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

struct BoundReport {
  double bound = 0.0;
  double max_eigenvalue = 0.0;
  /// One line per algorithm: "OK ...", "WARNING ..." or "INVALID ...".
  std::vector<std::string> lines;
  bool any_invalid = false;
};

/// Estimates the step-size bound on the plan's first seed and checks each
/// algorithm's mu against it.
BoundReport check_bound(const ExperimentPlan& plan, std::size_t samples_per_client);

/// `bound`: prints the estimate and per-algorithm verdicts. Exit status is 0
/// unless some mu is not positive.
int cmd_bound(const std::optional<std::filesystem::path>& config_path,
              const std::optional<std::string>& preset, std::size_t samples_per_client,
              std::ostream& out, std::ostream& err);

/// `figures`: runs the figure recipes (all, or those listed) into out_dir/<id>/.
int cmd_figures(const std::filesystem::path& out_dir, const std::optional<std::string>& seeds,
                const std::vector<std::string>& only, std::ostream& out, std::ostream& err);

/// `export-data`: writes client k's local stream (or the test set when k is
/// absent) for one seed as CSV.
int cmd_export_data(const std::optional<std::filesystem::path>& config_path,
                    const std::optional<std::string>& preset, std::uint64_t seed,
                    std::optional<std::size_t> client, const std::filesystem::path& out_file,
                    std::ostream& out, std::ostream& err);

/// Default algorithm list for `run --preset` without a config file.
std::vector<AlgoConfig> default_algorithms(std::size_t l_max);

}  // namespace paofed::cli
