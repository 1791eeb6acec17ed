#include "paofed/data_stream.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "paofed/csv.hpp"
#include "paofed/error.hpp"
#include "paofed/rng.hpp"

namespace paofed {

void DataGenConfig::validate() const {
  if (input_dim == 0) throw ParameterError("data: input_dim must be positive");
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
    throw ParameterError("data: noise_variance must be nonnegative");
  if (target_fn == TargetFn::kBenchmark && input_dim < 4)
    throw ParameterError("data: benchmark target needs input_dim >= 4");
  if (target_fn == TargetFn::kLinear && coefficients.size() != input_dim)
    throw ParameterError("data: linear target needs input_dim coefficients");
}

std::string_view to_string(InputLaw law) {
  switch (law) {
    case InputLaw::kUniformPm1: return "uniform_pm1";
    case InputLaw::kStandardNormal: return "standard_normal";
  }
  return "?";
}

std::string_view to_string(TargetFn fn) {
  switch (fn) {
    case TargetFn::kBenchmark: return "benchmark";
    case TargetFn::kLinear: return "linear";
    case TargetFn::kSinc: return "sinc";
  }
  return "?";
}

InputLaw parse_input_law(std::string_view name) {
  if (name == "uniform_pm1") return InputLaw::kUniformPm1;
  if (name == "standard_normal") return InputLaw::kStandardNormal;
  throw ParameterError("unknown input law '" + std::string(name) + "'");
}

TargetFn parse_target_fn(std::string_view name) {
  if (name == "benchmark") return TargetFn::kBenchmark;
  if (name == "linear") return TargetFn::kLinear;
  if (name == "sinc") return TargetFn::kSinc;
  throw ParameterError("unknown target function '" + std::string(name) + "'");
}

double evaluate_target(const DataGenConfig& cfg, std::span<const double> x) {
  switch (cfg.target_fn) {
    case TargetFn::kBenchmark: {
      const double s = std::sin(std::numbers::pi * x[3]);
      return std::sqrt(x[0] * x[0] + s * s) + (0.8 - 0.5 * std::exp(-x[1] * x[1])) * x[2];
    }
    case TargetFn::kLinear: {
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) acc += cfg.coefficients[i] * x[i];
      return acc;
    }
    case TargetFn::kSinc: {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      const double r = std::numbers::pi * std::sqrt(r2);
      return r == 0.0 ? 1.0 : std::sin(r) / r;
    }
  }
  return 0.0;
}

void LabeledSet::push_back(std::span<const double> x, double y) {
  if (x.size() != input_dim_) throw ParameterError("labeled set: input length mismatch");
  xs_.insert(xs_.end(), x.begin(), x.end());
  ys_.push_back(y);
}

void LabeledSet::reserve(std::size_t n) {
  xs_.reserve(n * input_dim_);
  ys_.reserve(n);
}

namespace {

LabeledSet draw_set(const DataGenConfig& cfg, std::size_t n, Rng rng, bool noisy) {
  cfg.validate();
  LabeledSet set(cfg.input_dim);
  set.reserve(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(cfg.noise_variance);
  std::vector<double> x(cfg.input_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x)
      v = cfg.input_law == InputLaw::kUniformPm1 ? 2.0 * uniform01(rng) - 1.0 : normal(rng);
    double y = evaluate_target(cfg, x);
    // The noise draw is consumed even when unused so noisy and noiseless sets
    // built from the same stream share their inputs.
    const double eta = normal(rng);
    if (noisy) y += noise_sd * eta;
    set.push_back(x, y);
  }
  return set;
}

}  // namespace

LabeledSet generate_labeled_set(const DataGenConfig& cfg, std::size_t n, std::uint64_t stream_tag) {
  if (n == 0) throw ParameterError("data: n must be positive");
  return draw_set(cfg, n, make_stream(cfg.seed, StreamKind::kClientData, stream_tag), true);
}

LabeledSet generate_test_set(const DataGenConfig& cfg, std::size_t n) {
  if (n == 0) throw ParameterError("data: test set size must be positive");
  return draw_set(cfg, n, make_stream(cfg.seed, StreamKind::kTestData), false);
}

std::optional<Sample> next_sample(ClientStream& stream, std::size_t /*n*/) {
  if (stream.exhausted()) return std::nullopt;
  const std::size_t i = stream.cursor++;
  return Sample{stream.samples.x(i), stream.samples.y(i)};
}

std::size_t data_group_of(std::size_t k, std::size_t num_clients, std::size_t num_groups) {
  return k / (num_clients / num_groups);
}

std::vector<ClientStream> build_population(const DataGenConfig& cfg, std::size_t num_clients,
                                           std::span<const std::size_t> sizes) {
  if (num_clients == 0) throw ParameterError("population: K must be positive");
  if (sizes.empty()) sizes = kDefaultGroupSizes;
  const bool per_client = sizes.size() == num_clients;
  if (!per_client && num_clients % sizes.size() != 0)
    throw ParameterError("population: K=" + std::to_string(num_clients) +
                         " is not divisible by the number of data groups (" +
                         std::to_string(sizes.size()) + ")");
  for (std::size_t s : sizes)
    if (s == 0) throw ParameterError("population: local set sizes must be positive");

  std::vector<ClientStream> clients(num_clients);
  for (std::size_t k = 0; k < num_clients; ++k) {
    const std::size_t group = per_client ? k : data_group_of(k, num_clients, sizes.size());
    clients[k].group_id = group;
    clients[k].samples = generate_labeled_set(cfg, sizes[group], k);
  }
  return clients;
}

void write_dataset_csv(const LabeledSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < set.input_dim(); ++j) out << "x_" << (j + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (double v : set.x(i)) out << csv::format_double(v) << ',';
    out << csv::format_double(set.y(i)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

LabeledSet read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("dataset csv: missing header");
  const auto header = csv::split_row(line);
  if (header.size() < 2 || header.back() != "y")
    throw ParameterError("dataset csv: header must be x_1..x_d,y");
  const std::size_t dim = header.size() - 1;
  LabeledSet set(dim);
  std::vector<double> x(dim);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = csv::split_row(line);
    if (cells.size() != dim + 1) throw ParameterError("dataset csv: ragged row");
    for (std::size_t j = 0; j < dim; ++j) x[j] = csv::parse_double(cells[j]);
    set.push_back(x, csv::parse_double(cells[dim]));
  }
  return set;
}

}  // namespace paofed
