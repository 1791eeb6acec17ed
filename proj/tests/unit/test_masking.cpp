#include <doctest.h>

#include <random>
#include <set>

#include "paofed/error.hpp"
#include "paofed/masking.hpp"

using namespace paofed;

namespace {
Mask idx(std::vector<std::size_t> v) { return Mask{std::move(v)}; }
}

TEST_SUITE("masking") {

TEST_CASE("coordinated server masks") {
  const MaskScheduler s(8, 2, 4, SharingMode::kCoordinated, false);
  CHECK(s.base() == idx({0, 1}));
  for (std::size_t k = 0; k < 4; ++k) CHECK(s.server_mask(k, 1) == idx({2, 3}));
  CHECK(s.server_mask(0, 4) == idx({0, 1}));
}

TEST_CASE("uncoordinated server masks") {
  const MaskScheduler s(8, 2, 4, SharingMode::kUncoordinated, false);
  CHECK(s.server_mask(1, 0) == idx({2, 3}));
  CHECK(s.server_mask(3, 1) == idx({0, 1}));
  CHECK(s.server_mask(2, 1) == idx({6, 7}));
}

TEST_CASE("m = D gives the full mask") {
  for (auto mode : {SharingMode::kCoordinated, SharingMode::kUncoordinated})
    for (bool reuse : {false, true}) {
      const MaskScheduler s(8, 8, 3, mode, reuse);
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t n = 0; n < 5; ++n) {
          CHECK(s.server_mask(k, n) == Mask::full(8));
          CHECK(s.client_mask(k, n) == Mask::full(8));
        }
    }
}

TEST_CASE("client masks") {
  const MaskScheduler plain(8, 2, 4, SharingMode::kCoordinated, false);
  const MaskScheduler shifted(8, 2, 4, SharingMode::kCoordinated, true);
  for (std::size_t n = 0; n < 6; ++n) CHECK(plain.client_mask(1, n) == plain.server_mask(1, n));
  REQUIRE(shifted.server_mask(0, 1) == idx({2, 3}));
  CHECK(shifted.client_mask(0, 1) == idx({4, 5}));
  CHECK(shifted.client_mask(0, 3) == idx({0, 1}));
}

TEST_CASE("circshift wraps and sorts") {
  CHECK(circshift(idx({0, 1, 2}), 6, 8) == idx({0, 6, 7}));
  CHECK(circshift(idx({5}), 0, 8) == idx({5}));
  CHECK(Mask::contiguous(6, 3, 8) == idx({0, 6, 7}));
  CHECK(idx({1, 4}).contains(4));
  CHECK_FALSE(idx({1, 4}).contains(2));
}

TEST_CASE("scheduler rejects bad m") {
  CHECK_THROWS_AS(MaskScheduler(8, 0, 2, SharingMode::kCoordinated, false), ParameterError);
  CHECK_THROWS_AS(MaskScheduler(8, 9, 2, SharingMode::kCoordinated, false), ParameterError);
}

TEST_CASE("property: randomized schedules") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t D = 1 + gen() % 64;
    const std::size_t m = 1 + gen() % D;
    const std::size_t K = 1 + gen() % 40;
    const auto mode = gen() % 2 ? SharingMode::kCoordinated : SharingMode::kUncoordinated;
    const bool reuse = gen() % 2;
    const MaskScheduler s(D, m, K, mode, reuse);
    const std::size_t n = gen() % 5000;
    for (std::size_t k = 0; k < K; ++k) {
      const Mask sm = s.server_mask(k, n), cm = s.client_mask(k, n);
      CHECK(sm.size() == m);
      CHECK(cm.size() == m);
      CHECK(std::set<std::size_t>(sm.indices.begin(), sm.indices.end()).size() == m);
      for (std::size_t i : cm.indices) CHECK(i < D);
      if (mode == SharingMode::kCoordinated) CHECK(sm == s.server_mask(0, n));
      CHECK(cm == (reuse ? circshift(sm, m, D) : sm));
    }
    const Mask base = Mask::contiguous(gen() % D, m, D);
    const std::size_t a = gen() % 1000, b = gen() % 1000;
    CHECK(circshift(circshift(base, a, D), b, D) == circshift(base, a + b, D));
  }
}

TEST_CASE("property: coverage within D/m iterations when m divides D") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + gen() % 8;
    const std::size_t D = m * (1 + gen() % 12);
    const std::size_t K = 1 + gen() % 20;
    const auto mode = gen() % 2 ? SharingMode::kCoordinated : SharingMode::kUncoordinated;
    const MaskScheduler s(D, m, K, mode, gen() % 2);
    const std::size_t start = gen() % 1000;
    const std::size_t k = gen() % K;
    std::set<std::size_t> seen, seen_client;
    for (std::size_t n = start; n < start + D / m; ++n) {
      for (std::size_t i : s.server_mask(k, n).indices) seen.insert(i);
      for (std::size_t i : s.client_mask(k, n).indices) seen_client.insert(i);
    }
    CHECK(seen.size() == D);
    CHECK(seen_client.size() == D);
  }
}

}  // TEST_SUITE
