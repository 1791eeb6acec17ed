#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paofed/features.hpp"
#include "paofed/masking.hpp"

namespace paofed {

/// Weights alpha_0..alpha_lmax applied to updates by delay; zero past l_max.
class DelayWeightSchedule {
 public:
  /// alpha_l = 1 for 0 <= l <= l_max.
  static DelayWeightSchedule flat(std::size_t l_max);
  /// alpha_l = base^l for 0 <= l <= l_max.
  static DelayWeightSchedule geometric(double base, std::size_t l_max);
  /// Explicit weights; weights[0] must be 1 and all entries lie in [0, 1].
  explicit DelayWeightSchedule(std::vector<double> weights);

  std::size_t l_max() const noexcept { return weights_.size() - 1; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t l) const noexcept { return l > l_max() ? 0.0 : weights_[l]; }

  friend bool operator==(const DelayWeightSchedule&, const DelayWeightSchedule&) = default;

 private:
  std::vector<double> weights_;
};

inline double alpha_weight(const DelayWeightSchedule& schedule, std::size_t l) {
  return schedule.weight(l);
}

enum class Variant { kOnlineFed, kOnlineFedSgd, kPsoFed, kPaoFed };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct AlgoConfig {
  std::string name = "PAO-Fed-U1";
  Variant variant = Variant::kPaoFed;
  double mu = 0.5;
  std::size_t m = 4;
  SharingMode mode = SharingMode::kUncoordinated;
  bool reuse_local = true;
  DelayWeightSchedule alpha = DelayWeightSchedule::flat(10);
  /// Online-Fed only: clients drawn per iteration from the available pool.
  std::optional<std::size_t> subsample_size;

  /// Whether the variant exchanges full models (m is ignored).
  bool full_sharing() const noexcept {
    return variant == Variant::kOnlineFed || variant == Variant::kOnlineFedSgd;
  }
};

/// Masked slice of a model: values[j] belongs to coordinate mask.indices[j].
struct Fragment {
  Mask mask;
  std::vector<double> values;
  friend bool operator==(const Fragment&, const Fragment&) = default;
};

/// Gathers the masked entries of w.
Fragment extract(std::span<const double> w, const Mask& mask);

/// One client's contribution inside an arrival batch.
struct Arrival {
  std::size_t client = 0;
  Fragment fragment;
  friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// Everything delivered to the server at one iteration, grouped by delay.
struct ArrivalBatch {
  std::size_t iteration = 0;
  std::map<std::size_t, std::vector<Arrival>> groups;

  bool empty() const noexcept { return groups.empty(); }
  std::size_t arrival_count() const noexcept;
};

/// LMS step on the client's own model: w + mu (y - <w, z>) z.
ModelVec local_update(std::span<const double> w, std::span<const double> z, double y, double mu);
void local_update_inplace(std::span<double> w, std::span<const double> z, double y, double mu);

/// Client step on a received server fragment: blend the fragment into w on
/// its mask, then take an LMS step from the blend.
ModelVec client_round(std::span<const double> w, const Fragment& fragment,
                      std::span<const double> z, double y, double mu);
void client_round_inplace(std::span<double> w, const Fragment& fragment,
                          std::span<const double> z, double y, double mu);

/// Removes every coordinate from an arrival when a more recent (smaller delay)
/// arrival in the same batch also claims it. Arrivals left with empty masks
/// and groups left with no arrivals are dropped.
ArrivalBatch resolve_conflicts(ArrivalBatch batch);

/// Delay-weighted partial aggregation:
///   w' = w + sum_l alpha_l / |group_l| sum_{k in group_l} S_k (w_k - w).
/// Expects a conflict-resolved batch. Throws InternalError for a group with
/// delay above the schedule's l_max.
ModelVec server_aggregate(std::span<const double> w, const ArrivalBatch& batch,
                          const DelayWeightSchedule& schedule);

/// Coordinate-wise mean of full client models; returns w when there are none.
ModelVec online_fed_aggregate(std::span<const double> w, std::span<const ModelVec> updates);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace paofed
