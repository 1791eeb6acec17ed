#include "paofed/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "paofed/error.hpp"
#include "paofed/rng.hpp"

namespace paofed {

RffMap::RffMap(std::size_t input_dim, std::size_t dim, double bandwidth, std::uint64_t seed)
    : input_dim_(input_dim), dim_(dim), bandwidth_(bandwidth), seed_(seed) {
  if (input_dim == 0) throw ParameterError("rff: input_dim must be positive");
  if (dim == 0) throw ParameterError("rff: D must be positive");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ParameterError("rff: bandwidth must be positive");

  Rng rng = make_stream(seed, StreamKind::kFeatures);
  std::normal_distribution<double> normal(0.0, 1.0 / bandwidth);
  frequencies_.resize(dim * input_dim);
  for (double& w : frequencies_) w = normal(rng);
  phases_.resize(dim);
  for (double& b : phases_) {
    b = 2.0 * std::numbers::pi * uniform01(rng);
    if (b >= 2.0 * std::numbers::pi) b = 0.0;  // rounding at u -> 1
  }
  scale_ = std::sqrt(2.0 / static_cast<double>(dim));
}

void RffMap::map_into(std::span<const double> x, std::span<double> out) const {
  if (x.size() != input_dim_)
    throw ParameterError("rff: input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(input_dim_));
  if (out.size() != dim_) throw ParameterError("rff: output buffer has wrong length");
  const double* row = frequencies_.data();
  for (std::size_t i = 0; i < dim_; ++i, row += input_dim_) {
    double arg = phases_[i];
    for (std::size_t j = 0; j < input_dim_; ++j) arg += row[j] * x[j];
    out[i] = scale_ * std::cos(arg);
  }
}

ModelVec RffMap::map(std::span<const double> x) const {
  ModelVec z(dim_);
  map_into(x, z);
  return z;
}

RffMap RffMap::with_zero_phases() const {
  RffMap copy = *this;
  std::fill(copy.phases_.begin(), copy.phases_.end(), 0.0);
  return copy;
}

}  // namespace paofed
