#include "paofed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "paofed/algorithms.hpp"
#include "paofed/error.hpp"

namespace paofed {

FeatureMatrix map_set(const RffMap& rff, const LabeledSet& set, std::size_t limit) {
  const std::size_t rows = limit == 0 ? set.size() : std::min(limit, set.size());
  FeatureMatrix out(rows, rff.dim());
  for (std::size_t i = 0; i < rows; ++i) rff.map_into(set.x(i), out.row(i));
  return out;
}

namespace {

// A diverged model (overflowed or NaN errors) reports +inf.
double mean_square_to_db(double mean) {
  if (mean == 0.0) return kMinusInfinityDb;
  if (!std::isfinite(mean)) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mean);
}

}  // namespace

double mse_db_from_errors(std::span<const double> errors) {
  if (errors.empty()) throw ParameterError("mse: empty test set");
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  const double mean = acc / static_cast<double>(errors.size());
  return mean_square_to_db(mean);
}

double mse_db(std::span<const double> w, const FeatureMatrix& test_features,
              std::span<const double> targets) {
  if (test_features.rows() == 0) throw ParameterError("mse: empty test set");
  if (targets.size() != test_features.rows()) throw ParameterError("mse: target count mismatch");
  if (w.size() != test_features.dim()) throw ParameterError("mse: model length mismatch");
  double acc = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double e = targets[t] - dot(w, test_features.row(t));
    acc += e * e;
  }
  const double mean = acc / static_cast<double>(targets.size());
  return mean_square_to_db(mean);
}

double mse_db(std::span<const double> w, const LabeledSet& test_set, const RffMap& rff) {
  if (test_set.empty()) throw ParameterError("mse: empty test set");
  return mse_db(w, map_set(rff, test_set), test_set.ys());
}

double max_correlation_eigenvalue(const FeatureMatrix& features, double rel_tol,
                                  std::size_t max_iterations) {
  const std::size_t n = features.rows();
  const std::size_t dim = features.dim();
  if (n == 0 || dim == 0) throw ParameterError("eigenvalue: no feature samples");

  // Matrix-free products R v = (1/n) sum_i z_i (z_i . v). Start from the row
  // sum plus a constant so the start is not orthogonal to the top eigenvector
  // in the common cases.
  std::vector<double> v(dim, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = features.row(i);
    for (std::size_t j = 0; j < dim; ++j) v[j] += z[j];
  }
  auto normalize = [](std::vector<double>& x) {
    double norm2 = 0.0;
    for (double e : x) norm2 += e * e;
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) return 0.0;
    for (double& e : x) e /= norm;
    return norm;
  };
  if (normalize(v) == 0.0) v.assign(dim, 1.0 / std::sqrt(static_cast<double>(dim)));

  std::vector<double> rv(dim);
  double lambda = 0.0;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::fill(rv.begin(), rv.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto z = features.row(i);
      const double proj = dot(z, v);
      for (std::size_t j = 0; j < dim; ++j) rv[j] += proj * z[j];
    }
    for (double& e : rv) e /= static_cast<double>(n);
    const double next = dot(v, rv);  // Rayleigh quotient, v is unit length
    const double norm = normalize(rv);
    if (norm == 0.0) return 0.0;
    v.swap(rv);
    if (iter > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

double estimate_mu_bound(std::span<const FeatureMatrix> client_features) {
  double largest = 0.0;
  for (const FeatureMatrix& f : client_features)
    if (f.rows() > 0) largest = std::max(largest, max_correlation_eigenvalue(f));
  if (!(largest > 0.0)) throw ParameterError("mu bound: features are degenerate (all zero)");
  return 2.0 / largest;
}

double estimate_mu_bound(std::span<const ClientStream> streams, const RffMap& rff,
                         std::size_t samples_per_client) {
  if (samples_per_client == 0) throw ParameterError("mu bound: samples_per_client must be positive");
  std::vector<FeatureMatrix> features;
  features.reserve(streams.size());
  for (const ClientStream& s : streams) features.push_back(map_set(rff, s.samples, samples_per_client));
  return estimate_mu_bound(features);
}

double tail_mean_db(const RunResult& result, std::size_t from_iteration) {
  double acc = 0.0;
  std::size_t count = 0;
  for (const MsePoint& p : result.series) {
    if (p.iteration < from_iteration) continue;
    acc += std::max(p.mse_db, kCsvFloorDb);
    ++count;
  }
  if (count == 0) throw ParameterError("tail_mean_db: no points in window");
  return acc / static_cast<double>(count);
}

}  // namespace paofed
