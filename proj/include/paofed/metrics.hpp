#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "paofed/data_stream.hpp"
#include "paofed/features.hpp"

namespace paofed {

/// Row-major block of mapped feature vectors.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Maps the first `limit` inputs of a set (all of them when limit is 0).
FeatureMatrix map_set(const RffMap& rff, const LabeledSet& set, std::size_t limit = 0);

/// Returned by mse_db for an exact fit.
inline constexpr double kMinusInfinityDb = -std::numeric_limits<double>::infinity();
/// Stand-in for -inf dB in CSV output.
inline constexpr double kCsvFloorDb = -400.0;

/// 10 log10 of the mean squared test error of model w.
double mse_db(std::span<const double> w, const LabeledSet& test_set, const RffMap& rff);
/// Same, on pre-mapped test features.
double mse_db(std::span<const double> w, const FeatureMatrix& test_features,
              std::span<const double> targets);

/// 10 log10(mean(errors^2)); -inf when every error is zero.
double mse_db_from_errors(std::span<const double> errors);

/// Largest eigenvalue of (1/n) sum_i z_i z_i^T by power iteration, stopping
/// once successive Rayleigh quotients agree to `rel_tol`.
double max_correlation_eigenvalue(const FeatureMatrix& features, double rel_tol = 1e-6,
                                  std::size_t max_iterations = 100000);

/// 2 / max_k lambda_max(R_k) over per-client feature samples. Throws
/// ParameterError when every feature vector is zero.
double estimate_mu_bound(std::span<const FeatureMatrix> client_features);
/// Maps up to samples_per_client inputs of each stream and estimates the bound.
double estimate_mu_bound(std::span<const ClientStream> streams, const RffMap& rff,
                         std::size_t samples_per_client);

struct MsePoint {
  std::size_t iteration = 0;
  double mse_db = 0.0;
  /// Cumulative scalars moved up to and including this iteration.
  std::uint64_t uploads = 0;
  std::uint64_t downloads = 0;

  friend bool operator==(const MsePoint&, const MsePoint&) = default;
};

struct RunResult {
  std::string name;
  std::vector<MsePoint> series;
  std::uint64_t uploads = 0;
  std::uint64_t downloads = 0;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Mean of the series values with iteration >= from_iteration.
double tail_mean_db(const RunResult& result, std::size_t from_iteration);

}  // namespace paofed
