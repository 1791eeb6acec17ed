#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "paofed/algorithms.hpp"
#include "paofed/rng.hpp"

namespace paofed {

/// What happens to a delay drawn above l_max.
enum class DelayOverflow { kClamp, kDrop };

struct AsyncConfig {
  /// Participation probability of each availability group.
  std::vector<double> availability_groups{0.25, 0.1, 0.025, 0.005};
  /// Delays come in multiples of this many iterations.
  std::size_t delay_granularity = 1;
  /// P(delay >= g j) = delay_base^j.
  double delay_base = 0.2;
  std::size_t l_max = 10;
  DelayOverflow overflow = DelayOverflow::kClamp;

  void validate() const;
  /// Availability group of client k: clients cycle through the groups so every
  /// data group contains each availability group equally often.
  std::size_t availability_group_of(std::size_t k) const { return k % availability_groups.size(); }
  double availability_of(std::size_t k) const { return availability_groups[availability_group_of(k)]; }
};

/// Bernoulli(p) participation; always false without new data. One draw is
/// consumed whenever has_new_data holds.
bool sample_availability(double p, bool has_new_data, Rng& rng);

/// Draws a delay g i with P(i >= j) = delta^j from a single uniform. Under
/// kClamp the result never exceeds l_max; under kDrop it may, and the channel
/// discards such messages.
std::size_t sample_delay(const AsyncConfig& cfg, Rng& rng);

struct InFlightMessage {
  std::size_t client = 0;
  std::size_t send_iteration = 0;
  Fragment fragment;
  std::size_t delivery_iteration = 0;

  std::size_t delay() const noexcept { return delivery_iteration - send_iteration; }
};

/// Upstream client-to-server link. Messages wait until their delivery
/// iteration and are then handed over grouped by delay.
class Channel {
 public:
  explicit Channel(std::size_t l_max, DelayOverflow overflow = DelayOverflow::kClamp)
      : l_max_(l_max), overflow_(overflow) {}

  /// Enqueues msg for msg.delivery_iteration. Returns false when the message
  /// was dropped for exceeding l_max.
  bool send(InFlightMessage msg);
  ArrivalBatch deliver(std::size_t n);

  std::size_t pending() const noexcept;
  std::size_t dropped() const noexcept { return dropped_; }
  std::size_t l_max() const noexcept { return l_max_; }

 private:
  std::size_t l_max_;
  DelayOverflow overflow_;
  std::size_t dropped_ = 0;
  std::map<std::size_t, std::vector<InFlightMessage>> queue_;
};

}  // namespace paofed
