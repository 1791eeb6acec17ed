#pragma once

#include <cstddef>
#include <vector>

namespace paofed {

/// Sorted set of distinct coordinate indices into [0, D). Stands in for the
/// diagonal 0/1 selection matrices exchanged between server and clients.
struct Mask {
  std::vector<std::size_t> indices;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  bool contains(std::size_t i) const;

  static Mask contiguous(std::size_t first, std::size_t count, std::size_t dim);
  static Mask full(std::size_t dim) { return contiguous(0, dim, dim); }

  friend bool operator==(const Mask&, const Mask&) = default;
};

/// Rotates every index by `offset` modulo `dim` and re-sorts.
Mask circshift(const Mask& mask, std::size_t offset, std::size_t dim);

enum class SharingMode { kCoordinated, kUncoordinated };

/// Rotating mask schedule.
///
/// server mask M(k, n) = circshift(base, m n)          (coordinated)
///                     = circshift(base, m n + m k)    (uncoordinated)
/// client mask S(k, n) = M(k, n)                       (reuse_local = false)
///                     = circshift(M(k, n), m)         (reuse_local = true)
class MaskScheduler {
 public:
  MaskScheduler(std::size_t dim, std::size_t m, std::size_t num_clients, SharingMode mode,
                bool reuse_local);
  MaskScheduler(std::size_t dim, std::size_t m, std::size_t num_clients, SharingMode mode,
                bool reuse_local, Mask base);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t num_clients() const noexcept { return num_clients_; }
  SharingMode mode() const noexcept { return mode_; }
  bool reuse_local() const noexcept { return reuse_local_; }
  const Mask& base() const noexcept { return base_; }

  Mask server_mask(std::size_t k, std::size_t n) const;
  Mask client_mask(std::size_t k, std::size_t n) const;

 private:
  std::size_t server_offset(std::size_t k, std::size_t n) const;

  std::size_t dim_;
  std::size_t m_;
  std::size_t num_clients_;
  SharingMode mode_;
  bool reuse_local_;
  Mask base_;
};

}  // namespace paofed
