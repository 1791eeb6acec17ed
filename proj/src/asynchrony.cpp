#include "paofed/asynchrony.hpp"

#include <cmath>
#include <string>

#include "paofed/error.hpp"

namespace paofed {

void AsyncConfig::validate() const {
  if (availability_groups.empty()) throw ParameterError("async: need at least one availability group");
  for (double p : availability_groups)
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("async: availability must lie in [0, 1]");
  if (!(delay_base >= 0.0 && delay_base < 1.0))
    throw ParameterError("async: delay_base must lie in [0, 1)");
  if (delay_granularity == 0) throw ParameterError("async: delay_granularity must be positive");
  if (l_max % delay_granularity != 0)
    throw ParameterError("async: l_max must be a multiple of delay_granularity");
}

bool sample_availability(double p, bool has_new_data, Rng& rng) {
  if (!has_new_data) return false;
  return uniform01(rng) < p;
}

std::size_t sample_delay(const AsyncConfig& cfg, Rng& rng) {
  const double u = 1.0 - uniform01(rng);  // (0, 1]
  const std::size_t max_steps = cfg.l_max / cfg.delay_granularity;
  std::size_t steps = 0;
  if (cfg.delay_base > 0.0 && u < 1.0) {
    // P(log u / log delta >= j) = P(u <= delta^j) = delta^j.
    const double ratio = std::log(u) / std::log(cfg.delay_base);
    steps = ratio >= static_cast<double>(max_steps + 1) ? max_steps + 1
                                                        : static_cast<std::size_t>(std::floor(ratio));
  }
  if (steps > max_steps && cfg.overflow == DelayOverflow::kClamp) steps = max_steps;
  return steps * cfg.delay_granularity;
}

bool Channel::send(InFlightMessage msg) {
  if (msg.delivery_iteration < msg.send_iteration)
    throw ParameterError("channel: delivery precedes send");
  if (msg.delay() > l_max_) {
    if (overflow_ == DelayOverflow::kDrop) {
      ++dropped_;
      return false;
    }
    msg.delivery_iteration = msg.send_iteration + l_max_;
  }
  const std::size_t at = msg.delivery_iteration;
  queue_[at].push_back(std::move(msg));
  return true;
}

ArrivalBatch Channel::deliver(std::size_t n) {
  ArrivalBatch batch;
  batch.iteration = n;
  auto it = queue_.find(n);
  if (it == queue_.end()) return batch;
  for (InFlightMessage& msg : it->second)
    batch.groups[msg.delay()].push_back(Arrival{msg.client, std::move(msg.fragment)});
  queue_.erase(it);
  return batch;
}

std::size_t Channel::pending() const noexcept {
  std::size_t n = 0;
  for (const auto& [at, msgs] : queue_) n += msgs.size();
  return n;
}

}  // namespace paofed
