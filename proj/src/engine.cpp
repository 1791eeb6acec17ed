#include "paofed/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <sstream>
#include <thread>

#include "paofed/csv.hpp"
#include "paofed/error.hpp"

namespace paofed {

void ExperimentConfig::validate() const {
  if (D == 0) throw ConfigError("D", "must be positive");
  if (K == 0) throw ConfigError("K", "must be positive");
  if (eval_every == 0) throw ConfigError("eval_every", "must be positive");
  if (test_size == 0) throw ConfigError("test_size", "must be positive");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("bandwidth", "must be positive");
  if (!(algo.mu > 0.0) || !std::isfinite(algo.mu)) throw ConfigError("mu", "must be positive");
  if (!algo.full_sharing() && (algo.m == 0 || algo.m > D))
    throw ConfigError("m", "must satisfy 1 <= m <= D (m=" + std::to_string(algo.m) +
                               ", D=" + std::to_string(D) + ")");
  if (algo.subsample_size && *algo.subsample_size == 0)
    throw ConfigError("subsample_size", "must be positive");
  if (algo.alpha.l_max() < async.l_max)
    throw ConfigError("alpha", "schedule covers delays up to " + std::to_string(algo.alpha.l_max()) +
                                   " but l_max is " + std::to_string(async.l_max));
  try {
    async.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("async", e.what());
  }
  try {
    data.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("data", e.what());
  }
  const std::size_t groups = group_sizes.empty() ? std::size(kDefaultGroupSizes) : group_sizes.size();
  if (groups != K && K % groups != 0)
    throw ConfigError("K", "K=" + std::to_string(K) + " is not divisible by the " +
                               std::to_string(groups) + " data groups");
  for (std::size_t s : group_sizes)
    if (s == 0) throw ConfigError("group_sizes", "sizes must be positive");
}

namespace {

template <typename Range>
std::string join(const Range& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ';';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>)
      out += csv::format_double(v);
    else
      out += std::to_string(v);
  }
  return out;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string environment_key(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "D=" << cfg.D << " K=" << cfg.K << " N=" << cfg.N << " eval_every=" << cfg.eval_every
     << " test_size=" << cfg.test_size << " bandwidth=" << csv::format_double(cfg.bandwidth)
     << " group_sizes=" << join(cfg.group_sizes) << " input_dim=" << cfg.data.input_dim
     << " input_law=" << to_string(cfg.data.input_law) << " target=" << to_string(cfg.data.target_fn)
     << " coefficients=" << join(cfg.data.coefficients)
     << " noise_variance=" << csv::format_double(cfg.data.noise_variance)
     << " availability=" << join(cfg.async.availability_groups)
     << " delay_base=" << csv::format_double(cfg.async.delay_base)
     << " delay_granularity=" << cfg.async.delay_granularity << " l_max=" << cfg.async.l_max
     << " overflow=" << (cfg.async.overflow == DelayOverflow::kClamp ? "clamp" : "drop");
  return os.str();
}

std::string canonical_description(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << environment_key(cfg) << " name=" << cfg.algo.name << " variant=" << to_string(cfg.algo.variant)
     << " mu=" << csv::format_double(cfg.algo.mu) << " m=" << cfg.algo.m
     << " mode=" << (cfg.algo.mode == SharingMode::kCoordinated ? "coordinated" : "uncoordinated")
     << " reuse_local=" << cfg.algo.reuse_local << " alpha=" << join(cfg.algo.alpha.weights())
     << " subsample=" << (cfg.algo.subsample_size ? std::to_string(*cfg.algo.subsample_size) : "all");
  return os.str();
}

std::uint64_t fingerprint(const ExperimentConfig& cfg) { return fnv1a(canonical_description(cfg)); }

// ---------------------------------------------------------------------------

DataFeed::DataFeed(const ExperimentConfig& cfg, std::uint64_t seed)
    : rff_(cfg.data.input_dim, cfg.D, cfg.bandwidth, seed) {
  DataGenConfig data = cfg.data;
  data.seed = seed;
  streams_ = build_population(data, cfg.K, cfg.group_sizes);
  test_set_ = generate_test_set(data, cfg.test_size);
  test_features_ = map_set(rff_, test_set_);
  block_features_ = FeatureMatrix(cfg.K, cfg.D);
  block_.reserve(cfg.K);
}

std::span<const ClientSample> DataFeed::next_block() {
  block_.clear();
  for (std::size_t k = 0; k < streams_.size(); ++k) {
    auto sample = next_sample(streams_[k], iteration_);
    if (!sample) continue;
    auto z = block_features_.row(k);
    rff_.map_into(sample->x, z);
    block_.push_back(ClientSample{k, z, sample->y});
  }
  ++iteration_;
  return block_;
}

// ---------------------------------------------------------------------------

Simulation::Simulation(const ExperimentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      server_(cfg.D, 0.0),
      clients_(cfg.D * cfg.K, 0.0),
      channel_(cfg.async.l_max, cfg.async.overflow),
      channel_rng_(make_stream(seed, StreamKind::kChannel)),
      server_rng_(make_stream(seed, StreamKind::kServer)) {
  cfg_.validate();
  if (!cfg_.algo.full_sharing())
    masks_.emplace(cfg_.D, cfg_.algo.m, cfg_.K, cfg_.algo.mode, cfg_.algo.reuse_local);
  availability_rngs_.reserve(cfg_.K);
  for (std::size_t k = 0; k < cfg_.K; ++k)
    availability_rngs_.push_back(make_stream(seed, StreamKind::kAvailability, k));
}

void Simulation::step(std::span<const ClientSample> arrivals) {
  if (cfg_.algo.full_sharing())
    step_full(arrivals);
  else
    step_partial(arrivals);
  ++iteration_;
}

void Simulation::step_partial(std::span<const ClientSample> arrivals) {
  const std::size_t n = iteration_;
  const AlgoConfig& algo = cfg_.algo;
  last_participants_ = 0;
  // Every client with data draws availability so all variants see the same
  // participation pattern for a seed.
  for (const ClientSample& s : arrivals) {
    const bool available =
        sample_availability(cfg_.async.availability_of(s.client), true, availability_rngs_[s.client]);
    auto w_k = client_model_mut(s.client);
    if (!available) {
      local_update_inplace(w_k, s.z, s.y, algo.mu);
      continue;
    }
    ++last_participants_;
    const Fragment received = extract(server_, masks_->server_mask(s.client, n));
    downloads_ += received.values.size();
    client_round_inplace(w_k, received, s.z, s.y, algo.mu);

    InFlightMessage msg{s.client, n, extract(w_k, masks_->client_mask(s.client, n)), n};
    uploads_ += msg.fragment.values.size();
    if (algo.variant == Variant::kPaoFed) msg.delivery_iteration += sample_delay(cfg_.async, channel_rng_);
    channel_.send(std::move(msg));
  }

  ArrivalBatch batch = resolve_conflicts(channel_.deliver(n));
  if (!batch.empty()) server_ = server_aggregate(server_, batch, algo.alpha);
}

void Simulation::step_full(std::span<const ClientSample> arrivals) {
  const AlgoConfig& algo = cfg_.algo;
  const bool sgd = algo.variant == Variant::kOnlineFedSgd;

  pool_.clear();
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const ClientSample& s = arrivals[i];
    const bool available =
        sample_availability(cfg_.async.availability_of(s.client), true, availability_rngs_[s.client]);
    if (available) pool_.push_back(i);
  }
  // Online-Fed: uniform subset of the available pool, partial Fisher-Yates.
  if (!sgd && algo.subsample_size && pool_.size() > *algo.subsample_size) {
    const std::size_t take = *algo.subsample_size;
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t span = pool_.size() - i;
      const std::size_t j = i + static_cast<std::size_t>(uniform01(server_rng_) * static_cast<double>(span));
      std::swap(pool_[i], pool_[std::min(j, pool_.size() - 1)]);
    }
    pool_.resize(take);
    std::sort(pool_.begin(), pool_.end());
  }

  last_participants_ = pool_.size();
  if (pool_.empty()) return;
  if (updates_.size() < pool_.size()) updates_.resize(pool_.size());
  for (std::size_t j = 0; j < pool_.size(); ++j) {
    const ClientSample& s = arrivals[pool_[j]];
    updates_[j].assign(server_.begin(), server_.end());
    local_update_inplace(updates_[j], s.z, s.y, algo.mu);
    std::copy(updates_[j].begin(), updates_[j].end(), client_model_mut(s.client).begin());
  }
  downloads_ += static_cast<std::uint64_t>(cfg_.D) * pool_.size();
  uploads_ += static_cast<std::uint64_t>(cfg_.D) * pool_.size();
  server_ = online_fed_aggregate(server_, std::span(updates_.data(), pool_.size()));
}

// ---------------------------------------------------------------------------

std::vector<RunResult> run_variants(const ExperimentConfig& base, std::span<const AlgoConfig> algos,
                                    std::uint64_t seed) {
  std::vector<ExperimentConfig> cfgs;
  for (const AlgoConfig& a : algos) {
    cfgs.push_back(base);
    cfgs.back().algo = a;
    cfgs.back().validate();
  }
  DataFeed feed(base, seed);
  std::vector<Simulation> sims;
  std::vector<RunResult> results(cfgs.size());
  sims.reserve(cfgs.size());
  for (std::size_t v = 0; v < cfgs.size(); ++v) {
    sims.emplace_back(cfgs[v], seed);
    results[v].name = cfgs[v].algo.name;
    results[v].config_fingerprint = fingerprint(cfgs[v]);
    results[v].seed = seed;
  }

  auto record = [&](std::size_t n) {
    for (std::size_t v = 0; v < sims.size(); ++v)
      results[v].series.push_back(MsePoint{
          n, mse_db(sims[v].server_model(), feed.test_features(), feed.test_targets()),
          sims[v].uploads(), sims[v].downloads()});
  };

  record(0);
  for (std::size_t n = 0; n < base.N; ++n) {
    const auto block = feed.next_block();
    for (Simulation& sim : sims) sim.step(block);
    const std::size_t done = n + 1;
    if (done % base.eval_every == 0 || done == base.N) record(done);
  }
  for (std::size_t v = 0; v < sims.size(); ++v) {
    results[v].uploads = sims[v].uploads();
    results[v].downloads = sims[v].downloads();
  }
  return results;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return run_variants(cfg, std::span(&cfg.algo, 1), seed).front();
}

std::vector<AveragedPoint> average_runs(std::span<const RunResult> runs) {
  if (runs.empty()) return {};
  const std::size_t points = runs.front().series.size();
  for (const RunResult& r : runs)
    if (r.series.size() != points) throw InternalError("average_runs: series lengths differ");
  const double count = static_cast<double>(runs.size());
  std::vector<AveragedPoint> curve(points);
  for (std::size_t p = 0; p < points; ++p) {
    AveragedPoint& out = curve[p];
    out.iteration = runs.front().series[p].iteration;
    double sum = 0.0;
    for (const RunResult& r : runs) {
      sum += std::max(r.series[p].mse_db, kCsvFloorDb);
      out.uploads += static_cast<double>(r.series[p].uploads);
      out.downloads += static_cast<double>(r.series[p].downloads);
    }
    out.mse_db_mean = sum / count;
    out.uploads /= count;
    out.downloads /= count;
    double ss = 0.0;
    for (const RunResult& r : runs) {
      const double d = std::max(r.series[p].mse_db, kCsvFloorDb) - out.mse_db_mean;
      ss += d * d;
    }
    out.mse_db_std = runs.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  }
  return curve;
}

std::vector<SuiteResult> run_suite(std::span<const ExperimentConfig> configs,
                                   std::span<const std::uint64_t> seeds, unsigned threads) {
  if (configs.empty()) throw ParameterError("run_suite: no configs");
  if (seeds.empty()) throw ParameterError("run_suite: no seeds");
  for (const ExperimentConfig& c : configs) c.validate();

  // Configs with the same environment run in lockstep on one data feed.
  std::map<std::string, std::vector<std::size_t>> by_env;
  for (std::size_t i = 0; i < configs.size(); ++i) by_env[environment_key(configs[i])].push_back(i);

  struct Job {
    std::vector<std::size_t> members;
    std::size_t seed_index;
  };
  std::vector<Job> jobs;
  for (const auto& [key, members] : by_env)
    for (std::size_t s = 0; s < seeds.size(); ++s) jobs.push_back({members, s});

  std::vector<std::vector<RunResult>> runs(configs.size(), std::vector<RunResult>(seeds.size()));
  auto execute = [&](const Job& job) {
    std::vector<AlgoConfig> algos;
    for (std::size_t i : job.members) algos.push_back(configs[i].algo);
    auto results = run_variants(configs[job.members.front()], algos, seeds[job.seed_index]);
    for (std::size_t j = 0; j < job.members.size(); ++j)
      runs[job.members[j]][job.seed_index] = std::move(results[j]);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || jobs.size() == 1) {
    for (const Job& job : jobs) execute(job);
  } else {
    // Each job writes a distinct slot of `runs`; no other state is shared.
    std::size_t next = 0;
    while (next < jobs.size()) {
      std::vector<std::future<void>> wave;
      for (unsigned t = 0; t < threads && next < jobs.size(); ++t, ++next)
        wave.push_back(std::async(std::launch::async, execute, std::cref(jobs[next])));
      for (auto& f : wave) f.get();
    }
  }

  std::vector<SuiteResult> out;
  out.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    SuiteResult r;
    r.name = configs[i].algo.name;
    r.config_fingerprint = fingerprint(configs[i]);
    r.curve = average_runs(runs[i]);
    r.runs = std::move(runs[i]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace paofed
