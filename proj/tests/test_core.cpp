#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vsim/core.hpp"

#include <stdexcept>
#include <vector>

using namespace vsim;

TEST_CASE("events dispatch in time order with FIFO tie-break") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(ns(10), EventKind::TimerExpiry, [&] { order.push_back(3); });
  q.schedule(ns(5), EventKind::TimerExpiry, [&] { order.push_back(1); });
  q.schedule(ns(5), EventKind::TimerExpiry, [&] { order.push_back(2); });
  q.run_until();
  CHECK(order == std::vector<int>{1, 2, 3});
  CHECK(q.now() == ns(10));
}

TEST_CASE("same-time events fire in insertion order, including nested") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(ns(1), EventKind::TimerExpiry, [&] {
    order.push_back(1);
    q.schedule(ns(1), EventKind::TimerExpiry, [&] { order.push_back(3); });
  });
  q.schedule(ns(1), EventKind::TimerExpiry, [&] { order.push_back(2); });
  q.run_until();
  CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("scheduling in the past is rejected") {
  EventQueue q;
  q.schedule(ns(10), EventKind::TimerExpiry, [] {});
  q.run_until();
  CHECK_THROWS_AS(q.schedule(ns(5), EventKind::TimerExpiry, [] {}),
                  std::logic_error);
  // scheduling exactly at now() is allowed
  CHECK_NOTHROW(q.schedule(ns(10), EventKind::TimerExpiry, [] {}));
}

TEST_CASE("cancellation prevents dispatch and reports status") {
  EventQueue q;
  int fired = 0;
  EventHandle h = q.schedule(ns(5), EventKind::TimerExpiry, [&] { ++fired; });
  CHECK(q.cancel(h));
  CHECK_FALSE(q.cancel(h)); // second cancel is a no-op
  q.schedule(ns(6), EventKind::TimerExpiry, [&] { fired += 10; });
  q.run_until();
  CHECK(fired == 10);

  EventHandle h2 = q.schedule(ns(7), EventKind::TimerExpiry, [&] { ++fired; });
  q.run_until();
  CHECK_FALSE(q.cancel(h2)); // already fired
  CHECK_FALSE(q.cancel(EventHandle{})); // invalid handle
}

TEST_CASE("run_until horizon leaves future events queued") {
  EventQueue q;
  int fired = 0;
  q.schedule(ns(5), EventKind::TimerExpiry, [&] { ++fired; });
  q.schedule(ns(50), EventKind::TimerExpiry, [&] { ++fired; });
  CHECK(q.run_until(ns(20)) == ns(20));
  CHECK(fired == 1);
  CHECK_FALSE(q.empty());
  q.run_until();
  CHECK(fired == 2);
  CHECK(q.empty());
}

TEST_CASE("event-count safety limit aborts a runaway loop") {
  EventQueue q;
  q.set_max_events(100);
  std::function<void()> loop = [&] {
    q.schedule(q.now() + ns(1), EventKind::TimerExpiry, loop);
  };
  q.schedule(0, EventKind::TimerExpiry, loop);
  CHECK_THROWS_AS(q.run_until(), std::runtime_error);
}

TEST_CASE("request_stop ends the run after the current event") {
  EventQueue q;
  int fired = 0;
  q.schedule(ns(1), EventKind::TimerExpiry, [&] {
    ++fired;
    q.request_stop();
  });
  q.schedule(ns(2), EventKind::TimerExpiry, [&] { ++fired; });
  q.run_until();
  CHECK(fired == 1);
  CHECK(q.now() == ns(1));
}

TEST_CASE("pending-work flag ignores sampling ticks") {
  EventQueue q;
  CHECK_FALSE(q.has_pending_work());
  q.schedule(ns(1), EventKind::SamplingTick, [] {});
  CHECK_FALSE(q.has_pending_work());
  EventHandle h = q.schedule(ns(2), EventKind::TimerExpiry, [] {});
  CHECK(q.has_pending_work());
  q.cancel(h);
  CHECK_FALSE(q.has_pending_work());
  q.schedule(ns(3), EventKind::PacketArrival, [] {});
  q.run_until();
  CHECK_FALSE(q.has_pending_work());
}

TEST_CASE("dispatch sequence is reproducible across identical schedules") {
  auto record = [] {
    EventQueue q;
    std::vector<std::pair<SimTime, int>> seq;
    for (int i = 0; i < 100; ++i) {
      SimTime t = ns((i * 37) % 17);
      q.schedule(t, EventKind::TimerExpiry,
                 [&seq, &q, i] { seq.emplace_back(q.now(), i); });
    }
    q.run_until();
    return seq;
  };
  CHECK(record() == record());
}
