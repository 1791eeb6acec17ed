#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace paofed {

enum class InputLaw { kUniformPm1, kStandardNormal };

/// Target nonlinearity f(x) of the regression task.
///   kBenchmark: sqrt(x1^2 + sin^2(pi x4)) + (0.8 - 0.5 exp(-x2^2)) x3, needs input_dim >= 4.
///   kLinear:    sum_i c_i x_i with coefficients c (length input_dim).
///   kSinc:      sin(pi r) / (pi r) with r = |x|.
enum class TargetFn { kBenchmark, kLinear, kSinc };

struct DataGenConfig {
  std::size_t input_dim = 4;
  InputLaw input_law = InputLaw::kUniformPm1;
  TargetFn target_fn = TargetFn::kBenchmark;
  std::vector<double> coefficients;
  double noise_variance = 0.01;
  std::uint64_t seed = 0;

  /// Throws ParameterError on an inconsistent configuration.
  void validate() const;
};

std::string_view to_string(InputLaw law);
std::string_view to_string(TargetFn fn);
InputLaw parse_input_law(std::string_view name);
TargetFn parse_target_fn(std::string_view name);

/// Evaluates the noiseless target on one input.
double evaluate_target(const DataGenConfig& cfg, std::span<const double> x);

/// Flat storage of (x, y) pairs; x rows are contiguous.
class LabeledSet {
 public:
  LabeledSet() = default;
  explicit LabeledSet(std::size_t input_dim) : input_dim_(input_dim) {}

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t size() const noexcept { return ys_.size(); }
  bool empty() const noexcept { return ys_.empty(); }

  std::span<const double> x(std::size_t i) const {
    return {xs_.data() + i * input_dim_, input_dim_};
  }
  double y(std::size_t i) const { return ys_[i]; }
  std::span<const double> ys() const noexcept { return ys_; }

  void push_back(std::span<const double> x, double y);
  void reserve(std::size_t n);

  friend bool operator==(const LabeledSet&, const LabeledSet&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// n labeled pairs drawn deterministically from (cfg.seed, stream_tag).
LabeledSet generate_labeled_set(const DataGenConfig& cfg, std::size_t n, std::uint64_t stream_tag);

/// Noiseless evaluation set drawn from its own stream.
LabeledSet generate_test_set(const DataGenConfig& cfg, std::size_t n);

struct Sample {
  std::span<const double> x;
  double y;
};

/// One client's progressively available local data. One new sample arrives
/// per global iteration until the set is exhausted.
struct ClientStream {
  LabeledSet samples;
  std::size_t cursor = 0;
  std::size_t group_id = 0;

  bool exhausted() const noexcept { return cursor >= samples.size(); }
  /// Whether a call to next_sample at iteration n would yield data.
  bool has_data(std::size_t /*n*/) const noexcept { return !exhausted(); }
};

std::optional<Sample> next_sample(ClientStream& stream, std::size_t n);

inline constexpr std::size_t kDefaultGroupSizes[] = {500, 1000, 1500, 2000};

/// Builds K client streams. `sizes` is either one size per client (length K)
/// or one size per data group, in which case K must divide evenly among the
/// groups and client k belongs to group k / (K / groups). Empty `sizes` uses
/// the four-tier 500/1000/1500/2000 grouping.
std::vector<ClientStream> build_population(const DataGenConfig& cfg, std::size_t num_clients,
                                           std::span<const std::size_t> sizes = {});

/// Data group of client k under the tiered grouping.
std::size_t data_group_of(std::size_t k, std::size_t num_clients, std::size_t num_groups);

/// CSV with header x_1..x_d,y.
void write_dataset_csv(const LabeledSet& set, const std::filesystem::path& path);
LabeledSet read_dataset_csv(const std::filesystem::path& path);

}  // namespace paofed
