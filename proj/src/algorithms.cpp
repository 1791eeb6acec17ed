#include "paofed/algorithms.hpp"

#include <cmath>
#include <string>

#include "paofed/error.hpp"

namespace paofed {

DelayWeightSchedule DelayWeightSchedule::flat(std::size_t l_max) {
  return DelayWeightSchedule(std::vector<double>(l_max + 1, 1.0));
}

DelayWeightSchedule DelayWeightSchedule::geometric(double base, std::size_t l_max) {
  if (!(base >= 0.0 && base <= 1.0)) throw ParameterError("alpha: geometric base must be in [0, 1]");
  std::vector<double> w(l_max + 1);
  for (std::size_t l = 0; l <= l_max; ++l) w[l] = std::pow(base, static_cast<double>(l));
  return DelayWeightSchedule(std::move(w));
}

DelayWeightSchedule::DelayWeightSchedule(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ParameterError("alpha: schedule needs at least alpha_0");
  if (weights_[0] != 1.0) throw ParameterError("alpha: alpha_0 must be 1");
  for (double a : weights_)
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("alpha: weights must lie in [0, 1]");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kOnlineFed: return "online_fed";
    case Variant::kOnlineFedSgd: return "online_fedsgd";
    case Variant::kPsoFed: return "pso_fed";
    case Variant::kPaoFed: return "pao_fed";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "online_fed") return Variant::kOnlineFed;
  if (name == "online_fedsgd") return Variant::kOnlineFedSgd;
  if (name == "pso_fed") return Variant::kPsoFed;
  if (name == "pao_fed") return Variant::kPaoFed;
  throw ParameterError("unknown variant '" + std::string(name) + "'");
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Fragment extract(std::span<const double> w, const Mask& mask) {
  Fragment f{mask, {}};
  f.values.reserve(mask.size());
  for (std::size_t i : mask.indices) {
    if (i >= w.size()) throw ParameterError("extract: mask index out of range");
    f.values.push_back(w[i]);
  }
  return f;
}

std::size_t ArrivalBatch::arrival_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [l, arrivals] : groups) n += arrivals.size();
  return n;
}

void local_update_inplace(std::span<double> w, std::span<const double> z, double y, double mu) {
  if (w.size() != z.size()) throw ParameterError("local_update: length mismatch");
  const double step = mu * (y - dot(w, z));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += step * z[i];
}

ModelVec local_update(std::span<const double> w, std::span<const double> z, double y, double mu) {
  ModelVec out(w.begin(), w.end());
  local_update_inplace(out, z, y, mu);
  return out;
}

void client_round_inplace(std::span<double> w, const Fragment& fragment,
                          std::span<const double> z, double y, double mu) {
  if (fragment.values.size() != fragment.mask.size())
    throw ParameterError("client_round: fragment carries " + std::to_string(fragment.values.size()) +
                         " values for a mask of " + std::to_string(fragment.mask.size()));
  for (std::size_t j = 0; j < fragment.mask.size(); ++j) {
    const std::size_t i = fragment.mask.indices[j];
    if (i >= w.size()) throw ParameterError("client_round: mask index out of range");
    w[i] = fragment.values[j];
  }
  local_update_inplace(w, z, y, mu);
}

ModelVec client_round(std::span<const double> w, const Fragment& fragment,
                      std::span<const double> z, double y, double mu) {
  ModelVec out(w.begin(), w.end());
  client_round_inplace(out, fragment, z, y, mu);
  return out;
}

ArrivalBatch resolve_conflicts(ArrivalBatch batch) {
  // Groups are visited in increasing delay, so the first claim on a
  // coordinate comes from the most recent send.
  std::map<std::size_t, std::size_t> owner;  // coordinate -> smallest delay
  for (const auto& [l, arrivals] : batch.groups)
    for (const Arrival& a : arrivals)
      for (std::size_t i : a.fragment.mask.indices) owner.try_emplace(i, l);

  ArrivalBatch out;
  out.iteration = batch.iteration;
  for (auto& [l, arrivals] : batch.groups) {
    std::vector<Arrival> kept;
    for (Arrival& a : arrivals) {
      Arrival trimmed{a.client, {}};
      for (std::size_t j = 0; j < a.fragment.mask.size(); ++j) {
        const std::size_t i = a.fragment.mask.indices[j];
        if (owner.at(i) != l) continue;
        trimmed.fragment.mask.indices.push_back(i);
        trimmed.fragment.values.push_back(a.fragment.values[j]);
      }
      if (!trimmed.fragment.mask.empty()) kept.push_back(std::move(trimmed));
    }
    if (!kept.empty()) out.groups.emplace(l, std::move(kept));
  }
  return out;
}

ModelVec server_aggregate(std::span<const double> w, const ArrivalBatch& batch,
                          const DelayWeightSchedule& schedule) {
  ModelVec out(w.begin(), w.end());
  ModelVec group_sum(w.size(), 0.0);
  std::vector<char> seen(w.size(), 0);
  std::vector<std::size_t> touched;
  for (const auto& [l, arrivals] : batch.groups) {
    if (arrivals.empty()) continue;
    if (l > schedule.l_max())
      throw InternalError("server_aggregate: arrival delayed by " + std::to_string(l) +
                          " exceeds l_max=" + std::to_string(schedule.l_max()));
    const double coef = schedule.weight(l) / static_cast<double>(arrivals.size());
    touched.clear();
    for (const Arrival& a : arrivals) {
      const Fragment& f = a.fragment;
      if (f.values.size() != f.mask.size())
        throw ParameterError("server_aggregate: fragment length mismatch");
      for (std::size_t j = 0; j < f.mask.size(); ++j) {
        const std::size_t i = f.mask.indices[j];
        if (i >= w.size()) throw ParameterError("server_aggregate: mask index out of range");
        if (!seen[i]) {
          seen[i] = 1;
          touched.push_back(i);
        }
        group_sum[i] += f.values[j] - w[i];
      }
    }
    for (std::size_t i : touched) {
      out[i] += coef * group_sum[i];
      group_sum[i] = 0.0;
      seen[i] = 0;
    }
  }
  return out;
}

ModelVec online_fed_aggregate(std::span<const double> w, std::span<const ModelVec> updates) {
  if (updates.empty()) return ModelVec(w.begin(), w.end());
  ModelVec out(w.size(), 0.0);
  for (const ModelVec& u : updates) {
    if (u.size() != w.size()) throw ParameterError("online_fed_aggregate: length mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) out[i] += u[i];
  }
  const double inv = 1.0 / static_cast<double>(updates.size());
  for (double& v : out) v *= inv;
  return out;
}

}  // namespace paofed
