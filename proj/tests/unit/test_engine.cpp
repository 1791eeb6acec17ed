#include <doctest.h>

#include <cmath>

#include "paofed/engine.hpp"
#include "paofed/error.hpp"

using namespace paofed;

namespace {

ExperimentConfig small(std::size_t K = 16, std::size_t D = 20, std::size_t N = 200) {
  ExperimentConfig c;
  c.K = K;
  c.D = D;
  c.N = N;
  c.test_size = 200;
  c.group_sizes = {N};
  c.algo.mu = 0.5;
  c.algo.m = 4;
  return c;
}

double variance(const std::vector<double>& v) {
  double s = 0, s2 = 0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(v.size());
  return (s2 - s * s / n) / (n - 1);
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("validation names the field") {
  ExperimentConfig c;
  c.algo.m = 300;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "m");
  }
  c = ExperimentConfig{};
  c.K = 6;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.algo.mu = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.algo.alpha = DelayWeightSchedule::flat(5);  // shorter than l_max = 10
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(run_experiment(c, 1), ConfigError);
}

TEST_CASE("N = 0 evaluates the zero model once") {
  ExperimentConfig c = small();
  c.N = 0;
  const RunResult r = run_experiment(c, 3);
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].iteration == 0);
  const DataFeed feed(c, 3);
  double acc = 0.0;
  for (double y : feed.test_targets()) acc += y * y;
  CHECK(r.series[0].mse_db == doctest::Approx(10.0 * std::log10(acc / feed.test_targets().size())));
  CHECK(r.uploads == 0);
}

TEST_CASE("models start at zero") {
  const Simulation sim(small(), 1);
  for (double v : sim.server_model()) CHECK(v == 0.0);
  for (std::size_t k = 0; k < 16; ++k)
    for (double v : sim.client_model(k)) CHECK(v == 0.0);
}

TEST_CASE("determinism") {
  const ExperimentConfig c = small();
  const RunResult a = run_experiment(c, 7), b = run_experiment(c, 7);
  CHECK(a == b);
  CHECK_FALSE(a.series == run_experiment(c, 8).series);
}

TEST_CASE("evaluation schedule") {
  ExperimentConfig c = small();
  c.N = 95;
  c.eval_every = 10;
  const RunResult r = run_experiment(c, 1);
  REQUIRE(r.series.size() == 11);
  CHECK(r.series.front().iteration == 0);
  CHECK(r.series[9].iteration == 90);
  CHECK(r.series.back().iteration == 95);
  for (std::size_t i = 1; i < r.series.size(); ++i) {
    CHECK(r.series[i].iteration > r.series[i - 1].iteration);
    CHECK(r.series[i].uploads >= r.series[i - 1].uploads);
  }
}

TEST_CASE("upload and download accounting") {
  for (auto variant : {Variant::kPaoFed, Variant::kPsoFed, Variant::kOnlineFedSgd}) {
    ExperimentConfig c = small();
    c.algo.variant = variant;
    DataFeed feed(c, 2);
    Simulation sim(c, 2);
    const std::size_t per = c.algo.full_sharing() ? c.D : c.algo.m;
    for (int n = 0; n < 50; ++n) {
      const auto before_up = sim.uploads(), before_down = sim.downloads();
      sim.step(feed.next_block());
      CHECK(sim.uploads() - before_up == sim.last_participants() * per);
      CHECK(sim.downloads() - before_down == sim.last_participants() * per);
    }
    CHECK(sim.uploads() > 0);
  }
}

TEST_CASE("without data only pending deliveries move the server") {
  ExperimentConfig c = small(8, 10, 0);
  c.group_sizes = {3};
  c.N = 40;
  DataFeed feed(c, 5);
  Simulation sim(c, 5);
  for (int n = 0; n < 3; ++n) sim.step(feed.next_block());
  for (int n = 3; n < 3 + 11; ++n) {
    CHECK(feed.next_block().empty());
    sim.step({});
  }
  CHECK(sim.channel().pending() == 0);
  const ModelVec frozen = sim.server_model();
  for (int n = 0; n < 5; ++n) sim.step({});
  CHECK(sim.server_model() == frozen);
  CHECK(sim.last_participants() == 0);
}

TEST_CASE("lockstep variants equal separate runs") {
  const ExperimentConfig base = small();
  std::vector<AlgoConfig> algos(3, base.algo);
  algos[0].name = "a";
  algos[1].name = "b";
  algos[1].mode = SharingMode::kCoordinated;
  algos[2].name = "c";
  algos[2].variant = Variant::kOnlineFed;
  algos[2].subsample_size = 2;
  const auto together = run_variants(base, algos, 4);
  for (std::size_t i = 0; i < algos.size(); ++i) {
    ExperimentConfig c = base;
    c.algo = algos[i];
    CHECK(together[i] == run_experiment(c, 4));
  }
}

TEST_CASE("suite averaging") {
  ExperimentConfig c = small();
  const std::vector<std::uint64_t> one{9};
  const std::vector<ExperimentConfig> single{c};
  const auto s1 = run_suite(single, one, 1);
  REQUIRE(s1.size() == 1);
  const RunResult direct = run_experiment(c, 9);
  CHECK(s1[0].runs[0] == direct);
  for (std::size_t i = 0; i < direct.series.size(); ++i)
    CHECK(s1[0].curve[i].mse_db_mean == direct.series[i].mse_db);

  ExperimentConfig d = c;
  d.algo.name = "copy";
  const std::vector<ExperimentConfig> twins{c, d};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto s2 = run_suite(twins, seeds, 2);
  CHECK(s2[0].curve == s2[1].curve);
  CHECK(s2[0].runs.size() == 3);
  for (const auto& p : s2[0].curve) CHECK(p.mse_db_std >= 0.0);
}

TEST_CASE("averaging over seeds reduces variance (setting I, PAO-Fed-U1)") {
  ExperimentConfig c;
  c.algo.mu = 1.0;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  const std::vector<ExperimentConfig> cfgs{c};
  const auto suite = run_suite(cfgs, seeds, 1);
  std::vector<double> avg;
  for (const auto& p : suite[0].curve)
    if (p.iteration >= 1000) avg.push_back(p.mse_db_mean);
  double per_seed = 0.0;
  for (const RunResult& r : suite[0].runs) {
    std::vector<double> v;
    for (const auto& p : r.series)
      if (p.iteration >= 1000) v.push_back(p.mse_db);
    per_seed += variance(v) / 10.0;
  }
  CHECK(variance(avg) < per_seed);
}

TEST_CASE("Online-FedSGD converges on setting I data") {
  ExperimentConfig c;
  c.K = 64;
  c.N = 1000;
  c.algo.variant = Variant::kOnlineFedSgd;
  c.algo.mu = 1.0;
  const RunResult r = run_experiment(c, 1);
  CHECK(r.series.back().mse_db < r.series.front().mse_db - 5.0);
  CHECK(tail_mean_db(r, 500) < tail_mean_db(r, 0));
}

TEST_CASE("fingerprint and environment key") {
  ExperimentConfig a = small(), b = small();
  b.algo.mode = SharingMode::kCoordinated;
  CHECK(environment_key(a) == environment_key(b));
  CHECK(fingerprint(a) != fingerprint(b));
  b = a;
  b.bandwidth = 2.0;
  CHECK(environment_key(a) != environment_key(b));
  CHECK(fingerprint(a) == fingerprint(small()));
}

}  // TEST_SUITE
