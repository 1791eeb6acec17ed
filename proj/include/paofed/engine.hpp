#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paofed/algorithms.hpp"
#include "paofed/asynchrony.hpp"
#include "paofed/data_stream.hpp"
#include "paofed/features.hpp"
#include "paofed/masking.hpp"
#include "paofed/metrics.hpp"
#include "paofed/rng.hpp"

namespace paofed {

/// Everything needed to run one algorithm variant for one seed.
struct ExperimentConfig {
  std::size_t D = 200;
  std::size_t K = 256;
  std::size_t N = 2000;
  std::size_t eval_every = 10;
  std::size_t test_size = 2000;
  double bandwidth = 1.0;
  /// Local set sizes per data group (or per client); empty selects the
  /// four-tier 500/1000/1500/2000 grouping.
  std::vector<std::size_t> group_sizes;
  DataGenConfig data;
  AsyncConfig async;
  AlgoConfig algo;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Key=value rendering of the data, feature and asynchrony parameters: two
/// configs with equal keys see the same data, features and random draws.
std::string environment_key(const ExperimentConfig& cfg);
/// environment_key plus the algorithm parameters.
std::string canonical_description(const ExperimentConfig& cfg);
std::uint64_t fingerprint(const ExperimentConfig& cfg);

/// One client's fresh sample at the current iteration, already mapped.
struct ClientSample {
  std::size_t client;
  std::span<const double> z;
  double y;
};

/// Per-seed data and features shared by every variant run on that seed.
/// Feeds each iteration's arrivals in order; call next_block once per iteration.
class DataFeed {
 public:
  DataFeed(const ExperimentConfig& cfg, std::uint64_t seed);

  const RffMap& rff() const noexcept { return rff_; }
  const FeatureMatrix& test_features() const noexcept { return test_features_; }
  std::span<const double> test_targets() const noexcept { return test_set_.ys(); }
  const LabeledSet& test_set() const noexcept { return test_set_; }
  const std::vector<ClientStream>& streams() const noexcept { return streams_; }
  std::size_t iteration() const noexcept { return iteration_; }

  /// Samples arriving at the current iteration, in client order; advances to
  /// the next iteration. The returned span stays valid until the next call.
  std::span<const ClientSample> next_block();

 private:
  RffMap rff_;
  std::vector<ClientStream> streams_;
  LabeledSet test_set_;
  FeatureMatrix test_features_;
  std::size_t iteration_ = 0;
  FeatureMatrix block_features_;
  std::vector<ClientSample> block_;
};

/// Simulation state of one variant: server and client models, the upstream
/// channel, communication counters and the random streams.
class Simulation {
 public:
  Simulation(const ExperimentConfig& cfg, std::uint64_t seed);

  /// Advances one global iteration given the samples that arrive at it.
  void step(std::span<const ClientSample> arrivals);

  std::size_t iteration() const noexcept { return iteration_; }
  const ModelVec& server_model() const noexcept { return server_; }
  std::span<const double> client_model(std::size_t k) const {
    return {clients_.data() + k * cfg_.D, cfg_.D};
  }
  std::uint64_t uploads() const noexcept { return uploads_; }
  std::uint64_t downloads() const noexcept { return downloads_; }
  /// Clients that exchanged with the server at the last step.
  std::size_t last_participants() const noexcept { return last_participants_; }
  const Channel& channel() const noexcept { return channel_; }
  const ExperimentConfig& config() const noexcept { return cfg_; }

 private:
  void step_partial(std::span<const ClientSample> arrivals);
  void step_full(std::span<const ClientSample> arrivals);
  std::span<double> client_model_mut(std::size_t k) {
    return {clients_.data() + k * cfg_.D, cfg_.D};
  }

  ExperimentConfig cfg_;
  std::optional<MaskScheduler> masks_;
  std::size_t iteration_ = 0;
  ModelVec server_;
  std::vector<double> clients_;
  Channel channel_;
  std::vector<Rng> availability_rngs_;
  Rng channel_rng_;
  Rng server_rng_;
  std::uint64_t uploads_ = 0;
  std::uint64_t downloads_ = 0;
  std::size_t last_participants_ = 0;
  std::vector<ModelVec> updates_;
  std::vector<std::size_t> pool_;
};

/// Runs cfg for N iterations on one seed, evaluating the server model every
/// eval_every iterations (and at 0 and N).
RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

/// Runs several variants that share one environment on the same seed in
/// lockstep. Results equal separate run_experiment calls.
std::vector<RunResult> run_variants(const ExperimentConfig& base, std::span<const AlgoConfig> algos,
                                    std::uint64_t seed);

struct AveragedPoint {
  std::size_t iteration = 0;
  double mse_db_mean = 0.0;
  double mse_db_std = 0.0;
  double uploads = 0.0;
  double downloads = 0.0;

  friend bool operator==(const AveragedPoint&, const AveragedPoint&) = default;
};

struct SuiteResult {
  std::string name;
  std::uint64_t config_fingerprint = 0;
  std::vector<AveragedPoint> curve;
  std::vector<RunResult> runs;  // one per seed, in seed order
};

/// Averages per-seed curves (-inf dB is floored at kCsvFloorDb first).
std::vector<AveragedPoint> average_runs(std::span<const RunResult> runs);

/// Runs every config on every seed with common random numbers and averages
/// the per-iteration MSE across seeds. Configs sharing an environment are
/// stepped together. `threads` = 0 uses the hardware concurrency.
std::vector<SuiteResult> run_suite(std::span<const ExperimentConfig> configs,
                                   std::span<const std::uint64_t> seeds, unsigned threads = 0);

}  // namespace paofed
