#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "paofed/engine.hpp"

namespace paofed {

/// Default learning rate for presets and for algorithms that do not set mu.
inline constexpr double kDefaultMu = 1.3;
/// Default Online-Fed subset size per iteration.
inline constexpr std::size_t kDefaultSubsample = 1;

/// A configuration file resolved into shared parameters plus the list of
/// algorithm variants to compare on them.
struct ExperimentPlan {
  std::string preset;  // empty when no preset was used
  ExperimentConfig base;
  std::vector<AlgoConfig> algorithms;
  std::vector<std::uint64_t> seeds;

  /// One ExperimentConfig per algorithm.
  std::vector<ExperimentConfig> expand() const;
};

/// Asynchrony parameters for "setting1" or "setting2". Throws ConfigError for
/// other names.
AsyncConfig async_preset(std::string_view name);

/// Plan with the preset's asynchrony, the default data/feature parameters and
/// no algorithms.
ExperimentPlan preset_plan(std::string_view name);

/// Algorithm by its display name: PAO-Fed-{C0,C1,C2,U0,U1}, PSO-Fed,
/// Online-Fed, Online-FedSGD. l_max sizes the delay-weight schedule.
AlgoConfig named_algorithm(std::string_view name, double mu, std::size_t l_max);
bool is_named_algorithm(std::string_view name);

/// Parses and validates a JSON experiment description. Errors are ConfigError
/// carrying the JSON path of the offending field. check_mu=false accepts
/// non-positive step sizes (the bound checker reports them itself).
ExperimentPlan parse_config(const nlohmann::json& doc, bool check_mu = true);
ExperimentPlan load_config(const std::filesystem::path& path, bool check_mu = true);

/// Fully resolved JSON form; parse_config(to_json(p)) reproduces p.
nlohmann::json to_json(const ExperimentPlan& plan);

enum class FigureName { kFig1Coordination, kFig2MAndAlpha, kFig3Setting2 };

struct FigureRecipe {
  FigureName name;
  std::string id;     // directory name, e.g. "fig1_coordination"
  std::string title;
  std::string setting;  // "setting1" | "setting2"
  std::vector<AlgoConfig> variants;
};

FigureRecipe figure_recipe(FigureName name);
FigureRecipe figure_recipe(std::string_view id);
std::vector<FigureRecipe> all_figure_recipes();
/// Plan that runs a recipe with the given seeds.
ExperimentPlan recipe_plan(const FigureRecipe& recipe, std::vector<std::uint64_t> seeds);

/// "10" -> seeds 1..10; "3,7,9" -> {3, 7, 9}.
std::vector<std::uint64_t> parse_seed_spec(std::string_view spec);

/// File-name-safe form of a variant name ("PAO-Fed-U1 (m=32)" -> "PAO-Fed-U1_m32").
std::string sanitize_name(std::string_view name);

}  // namespace paofed
