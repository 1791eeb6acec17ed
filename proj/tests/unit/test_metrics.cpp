#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "paofed/data_stream.hpp"
#include "paofed/error.hpp"
#include "paofed/metrics.hpp"

using namespace paofed;

namespace {

double eigen_lambda_max(const FeatureMatrix& f) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(f.dim(), f.dim());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    Eigen::Map<const Eigen::VectorXd> z(f.row(i).data(), f.dim());
    R += z * z.transpose();
  }
  R /= static_cast<double>(f.rows());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

FeatureMatrix constant_rows(std::vector<double> v, std::size_t rows) {
  FeatureMatrix f(rows, v.size());
  for (std::size_t i = 0; i < rows; ++i) std::copy(v.begin(), v.end(), f.row(i).begin());
  return f;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("mse_db from errors") {
  CHECK(mse_db_from_errors(std::vector<double>(10, 0.1)) == doctest::Approx(-20.0).epsilon(1e-12));
  CHECK(mse_db_from_errors(std::vector<double>(7, 1.0)) == doctest::Approx(0.0));
  CHECK(mse_db_from_errors(std::vector<double>(3, 0.0)) == kMinusInfinityDb);
  CHECK_THROWS_AS(mse_db_from_errors(std::vector<double>{}), ParameterError);
  // diverged models
  CHECK(mse_db_from_errors(std::vector<double>{1.0, std::nan("")}) == std::numeric_limits<double>::infinity());
  CHECK(mse_db_from_errors(std::vector<double>{1e300, 1.0}) == std::numeric_limits<double>::infinity());
}

TEST_CASE("mse_db on a test set") {
  const RffMap rff(1, 5, 1.0, 1);
  LabeledSet test(1);
  for (int i = 0; i < 20; ++i) test.push_back(std::vector<double>{0.1 * i}, 10.0);
  CHECK(mse_db(std::vector<double>(5, 0.0), test, rff) == doctest::Approx(20.0));
  CHECK_THROWS_AS(mse_db(std::vector<double>(5, 0.0), LabeledSet(1), rff), ParameterError);
}

TEST_CASE("mse_db properties") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<double> e(50);
  for (double& v : e) v = ud(gen);
  const double base = mse_db_from_errors(e);
  auto shuffled = e;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  CHECK(mse_db_from_errors(shuffled) == doctest::Approx(base).epsilon(1e-14));
  auto shifted = e;
  for (double& v : shifted) v += 0.3;
  CHECK(mse_db_from_errors(shifted) >= base);
}

TEST_CASE("power iteration against dense eigensolver") {
  DataGenConfig cfg;
  cfg.seed = 2;
  for (double bw : {0.3, 1.0, 3.0}) {
    const RffMap rff(4, 60, bw, 5);
    const FeatureMatrix f = map_set(rff, generate_labeled_set(cfg, 400, 1));
    const double want = eigen_lambda_max(f);
    CHECK(max_correlation_eigenvalue(f) == doctest::Approx(want).epsilon(1e-5));
  }
}

TEST_CASE("constant features give 2 / |v|^2") {
  const std::vector<double> v{0.5, -1.0, 2.0};
  const FeatureMatrix f = constant_rows(v, 10);
  const std::vector<FeatureMatrix> clients{f};
  CHECK(estimate_mu_bound(clients) == doctest::Approx(2.0 / 5.25).epsilon(1e-9));
}

TEST_CASE("bound takes the worst client") {
  const std::vector<FeatureMatrix> clients{constant_rows({1.0, 0.0}, 4), constant_rows({0.0, 2.0}, 4)};
  CHECK(estimate_mu_bound(clients) == doctest::Approx(0.5).epsilon(1e-9));
  const std::vector<FeatureMatrix> same{constant_rows({0.3, 0.4}, 5), constant_rows({0.3, 0.4}, 5)};
  const std::vector<FeatureMatrix> one{constant_rows({0.3, 0.4}, 5)};
  CHECK(estimate_mu_bound(same) == estimate_mu_bound(one));
}

TEST_CASE("degenerate features") {
  const std::vector<FeatureMatrix> zero{constant_rows({0.0, 0.0}, 3)};
  CHECK_THROWS_AS(estimate_mu_bound(zero), ParameterError);
}

TEST_CASE("bound from streams matches dense oracle") {
  DataGenConfig cfg;
  cfg.seed = 11;
  const std::vector<std::size_t> sizes{300, 200};
  const auto streams = build_population(cfg, 2, sizes);
  const RffMap rff(4, 40, 1.0, 3);
  double worst = 0.0;
  for (const auto& s : streams) worst = std::max(worst, eigen_lambda_max(map_set(rff, s.samples, 250)));
  const double b = estimate_mu_bound(streams, rff, 250);
  CHECK(b > 0.0);
  CHECK(std::isfinite(b));
  CHECK(b == doctest::Approx(2.0 / worst).epsilon(1e-5));
}

TEST_CASE("tail mean") {
  RunResult r;
  r.series = {{0, 0.0, 0, 0}, {10, -4.0, 0, 0}, {20, -6.0, 0, 0}};
  CHECK(tail_mean_db(r, 10) == doctest::Approx(-5.0));
  CHECK(tail_mean_db(r, 15) == doctest::Approx(-6.0));
}

}  // TEST_SUITE
