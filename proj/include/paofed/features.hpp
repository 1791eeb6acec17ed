#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace paofed {

using ModelVec = std::vector<double>;

/// Random Fourier feature map for the Gaussian kernel
/// k(x, x') = exp(-|x - x'|^2 / (2 bandwidth^2)).
///
/// Features are z_i(x) = sqrt(2/D) cos(<omega_i, x> + b_i) with omega_i drawn
/// from N(0, I / bandwidth^2) and b_i uniform on [0, 2 pi). The map is immutable
/// once built and fully determined by its construction parameters.
class RffMap {
 public:
  RffMap(std::size_t input_dim, std::size_t dim, double bandwidth, std::uint64_t seed);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t dim() const noexcept { return dim_; }
  double bandwidth() const noexcept { return bandwidth_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Row-major dim x input_dim.
  std::span<const double> frequencies() const noexcept { return frequencies_; }
  std::span<const double> phases() const noexcept { return phases_; }

  /// Maps x into feature space. Throws ParameterError on a length mismatch.
  ModelVec map(std::span<const double> x) const;
  /// Writes the features of x into out (length dim()).
  void map_into(std::span<const double> x, std::span<double> out) const;

  /// Test hook: a copy of this map with all phases set to zero.
  RffMap with_zero_phases() const;

  friend bool operator==(const RffMap&, const RffMap&) = default;

 private:
  std::size_t input_dim_;
  std::size_t dim_;
  double bandwidth_;
  std::uint64_t seed_;
  std::vector<double> frequencies_;
  std::vector<double> phases_;
  double scale_;
};

inline RffMap new_rff_map(std::size_t input_dim, std::size_t dim, double bandwidth,
                          std::uint64_t seed) {
  return RffMap(input_dim, dim, bandwidth, seed);
}

inline ModelVec map_input(const RffMap& rff, std::span<const double> x) { return rff.map(x); }

}  // namespace paofed
