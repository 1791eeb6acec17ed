#include <doctest.h>

#include <cmath>

#include "paofed/asynchrony.hpp"
#include "paofed/error.hpp"

using namespace paofed;

namespace {

InFlightMessage msg(std::size_t client, std::size_t send, std::size_t delay) {
  InFlightMessage m;
  m.client = client;
  m.send_iteration = send;
  m.delivery_iteration = send + delay;
  m.fragment = Fragment{Mask{{client}}, {static_cast<double>(client)}};
  return m;
}

AsyncConfig setting2() {
  AsyncConfig a;
  a.availability_groups = {0.025, 0.01, 0.0025, 0.0005};
  a.delay_base = 0.4;
  a.delay_granularity = 10;
  a.l_max = 60;
  return a;
}

}  // namespace

TEST_SUITE("asynchrony") {

TEST_CASE("availability") {
  Rng rng = make_stream(1, StreamKind::kAvailability, 0);
  CHECK_FALSE(sample_availability(0.9, false, rng));
  CHECK(sample_availability(1.0, true, rng));
  CHECK_FALSE(sample_availability(0.0, true, rng));
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += sample_availability(0.25, true, rng);
  CHECK(std::abs(hits / 1e5 - 0.25) <= 0.01);
}

TEST_CASE("no draw is consumed without data") {
  Rng a = make_stream(3, StreamKind::kAvailability, 0), b = a;
  sample_availability(0.5, false, a);
  CHECK(a() == b());
}

TEST_CASE("availability groups cycle over clients") {
  AsyncConfig a;
  CHECK(a.availability_of(0) == 0.25);
  CHECK(a.availability_of(1) == 0.1);
  CHECK(a.availability_of(6) == 0.025);
  CHECK(a.availability_of(7) == 0.005);
}

TEST_CASE("delay law: zero base") {
  AsyncConfig a;
  a.delay_base = 0.0;
  Rng rng = make_stream(1, StreamKind::kChannel);
  for (int i = 0; i < 1000; ++i) CHECK(sample_delay(a, rng) == 0);
}

TEST_CASE("delay law: setting I tail") {
  AsyncConfig a;
  Rng rng = make_stream(2, StreamKind::kChannel);
  int ge1 = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t d = sample_delay(a, rng);
    CHECK(d <= 10);
    ge1 += d >= 1;
  }
  CHECK(std::abs(ge1 / 1e5 - 0.2) <= 0.01);
}

TEST_CASE("delay law: setting II multiples of 10") {
  const AsyncConfig a = setting2();
  Rng rng = make_stream(3, StreamKind::kChannel);
  int ge20 = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t d = sample_delay(a, rng);
    CHECK(d % 10 == 0);
    CHECK(d <= 60);
    ge20 += d >= 20;
  }
  CHECK(std::abs(ge20 / 1e5 - 0.16) <= 0.01);
}

TEST_CASE("delay law: clamp versus drop") {
  AsyncConfig a;
  a.delay_base = 0.9;
  a.l_max = 2;
  Rng r1 = make_stream(4, StreamKind::kChannel), r2 = r1;
  std::size_t above = 0;
  a.overflow = DelayOverflow::kDrop;
  for (int i = 0; i < 2000; ++i) above += sample_delay(a, r1) > 2;
  CHECK(above > 0);
  a.overflow = DelayOverflow::kClamp;
  for (int i = 0; i < 2000; ++i) CHECK(sample_delay(a, r2) <= 2);
}

TEST_CASE("config validation") {
  AsyncConfig a;
  a.delay_base = 1.0;
  CHECK_THROWS_AS(a.validate(), ParameterError);
  a = AsyncConfig{};
  a.availability_groups = {0.5, 1.5};
  CHECK_THROWS_AS(a.validate(), ParameterError);
  a = setting2();
  a.l_max = 55;
  CHECK_THROWS_AS(a.validate(), ParameterError);
  CHECK_NOTHROW(setting2().validate());
}

TEST_CASE("channel delivers at send plus delay") {
  Channel ch(10);
  CHECK(ch.send(msg(0, 3, 2)));
  CHECK(ch.deliver(3).empty());
  CHECK(ch.deliver(4).empty());
  const ArrivalBatch b = ch.deliver(5);
  REQUIRE(b.groups.size() == 1);
  REQUIRE(b.groups.at(2).size() == 1);
  CHECK(b.groups.at(2)[0].client == 0);
  CHECK(b.iteration == 5);
  CHECK(ch.deliver(5).empty());
  CHECK(ch.pending() == 0);
}

TEST_CASE("channel: reordering and grouping") {
  Channel ch(10);
  ch.send(msg(1, 1, 4));  // arrives at 5
  ch.send(msg(1, 4, 0));  // arrives at 4, sent later
  ch.send(msg(2, 2, 3));  // arrives at 5
  ch.send(msg(3, 5, 0));  // arrives at 5
  CHECK(ch.pending() == 4);
  const ArrivalBatch b4 = ch.deliver(4);
  CHECK(b4.arrival_count() == 1);
  CHECK(b4.groups.count(0) == 1);
  const ArrivalBatch b5 = ch.deliver(5);
  CHECK(b5.arrival_count() == 3);
  CHECK(b5.groups.at(0).size() == 1);
  CHECK(b5.groups.at(3).size() == 1);
  CHECK(b5.groups.at(4).size() == 1);
}

TEST_CASE("channel: over-age messages") {
  Channel clamp(3, DelayOverflow::kClamp);
  CHECK(clamp.send(msg(0, 0, 7)));
  CHECK(clamp.deliver(3).groups.at(3).size() == 1);
  Channel drop(3, DelayOverflow::kDrop);
  CHECK_FALSE(drop.send(msg(0, 0, 7)));
  CHECK(drop.dropped() == 1);
  CHECK(drop.pending() == 0);
}

TEST_CASE("channel conservation") {
  Channel ch(10);
  Rng rng = make_stream(9, StreamKind::kChannel);
  AsyncConfig a;
  std::size_t sent = 0, got = 0;
  for (std::size_t n = 0; n < 500; ++n) {
    for (std::size_t k = 0; k < 3; ++k) {
      ch.send(msg(k, n, sample_delay(a, rng)));
      ++sent;
    }
    const ArrivalBatch b = ch.deliver(n);
    for (const auto& [l, arrivals] : b.groups) {
      got += arrivals.size();
      CHECK(l <= 10);
    }
  }
  for (std::size_t n = 500; n < 520; ++n) got += ch.deliver(n).arrival_count();
  CHECK(got == sent);
}

}  // TEST_SUITE
