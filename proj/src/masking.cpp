#include "paofed/masking.hpp"

#include <algorithm>
#include <string>

#include "paofed/error.hpp"

namespace paofed {

bool Mask::contains(std::size_t i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

Mask Mask::contiguous(std::size_t first, std::size_t count, std::size_t dim) {
  if (count > dim) throw ParameterError("mask: more entries than dimensions");
  Mask mask;
  mask.indices.reserve(count);
  for (std::size_t i = 0; i < count; ++i) mask.indices.push_back((first + i) % dim);
  std::sort(mask.indices.begin(), mask.indices.end());
  return mask;
}

Mask circshift(const Mask& mask, std::size_t offset, std::size_t dim) {
  if (dim == 0) throw ParameterError("circshift: dimension must be positive");
  const std::size_t shift = offset % dim;
  Mask out;
  out.indices.reserve(mask.size());
  for (std::size_t i : mask.indices) {
    if (i >= dim) throw ParameterError("circshift: index out of range");
    out.indices.push_back((i + shift) % dim);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

MaskScheduler::MaskScheduler(std::size_t dim, std::size_t m, std::size_t num_clients,
                             SharingMode mode, bool reuse_local)
    : MaskScheduler(dim, m, num_clients, mode, reuse_local,
                    m <= dim && dim > 0 ? Mask::contiguous(0, m, dim) : Mask{}) {}

MaskScheduler::MaskScheduler(std::size_t dim, std::size_t m, std::size_t num_clients,
                             SharingMode mode, bool reuse_local, Mask base)
    : dim_(dim), m_(m), num_clients_(num_clients), mode_(mode), reuse_local_(reuse_local),
      base_(std::move(base)) {
  if (dim == 0) throw ParameterError("masks: D must be positive");
  if (m == 0 || m > dim)
    throw ParameterError("masks: m must satisfy 1 <= m <= D (m=" + std::to_string(m) +
                         ", D=" + std::to_string(dim) + ")");
  if (num_clients == 0) throw ParameterError("masks: K must be positive");
  if (base_.size() != m) throw ParameterError("masks: base mask must hold m entries");
  for (std::size_t i = 0; i < base_.size(); ++i) {
    if (base_.indices[i] >= dim) throw ParameterError("masks: base index out of range");
    if (i > 0 && base_.indices[i] <= base_.indices[i - 1])
      throw ParameterError("masks: base mask must be sorted and distinct");
  }
}

std::size_t MaskScheduler::server_offset(std::size_t k, std::size_t n) const {
  // Offsets are reduced modulo D before multiplying to stay clear of overflow.
  const std::size_t mm = m_ % dim_;
  std::size_t offset = (mm * (n % dim_)) % dim_;
  if (mode_ == SharingMode::kUncoordinated) offset = (offset + mm * (k % dim_)) % dim_;
  return offset;
}

Mask MaskScheduler::server_mask(std::size_t k, std::size_t n) const {
  if (k >= num_clients_) throw ParameterError("masks: client id out of range");
  return circshift(base_, server_offset(k, n), dim_);
}

Mask MaskScheduler::client_mask(std::size_t k, std::size_t n) const {
  if (k >= num_clients_) throw ParameterError("masks: client id out of range");
  std::size_t offset = server_offset(k, n);
  if (reuse_local_) offset = (offset + m_) % dim_;
  return circshift(base_, offset, dim_);
}

}  // namespace paofed
