#ifndef VSIM_CORE_HPP
#define VSIM_CORE_HPP

#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "vsim/time.hpp"

namespace vsim {

enum class EventKind {
  PacketArrival,
  TransmissionComplete,
  TimerExpiry,
  SyncMessage,
  TraceStep,
  SamplingTick,
};

const char* event_kind_name(EventKind k);

// Opaque handle for cancellation. Default-constructed handles are invalid.
struct EventHandle {
  std::uint64_t seq = 0;
  bool valid() const { return seq != 0; }
};

// Deterministic single-threaded event loop. Events with equal fire time are
// dispatched in insertion order, so two runs over the same inputs produce the
// same dispatch sequence.
class EventQueue {
public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  // Aborts (throws std::logic_error) if fire_at < now().
  EventHandle schedule(SimTime fire_at, EventKind kind, Action action,
                       std::string debug_label = {});

  // Returns true if the event had not yet fired and was not already
  // cancelled.
  bool cancel(EventHandle h);

  // Dispatches events in (fire_at, seq) order until the queue drains or the
  // next event would fire past `end`. Returns the final clock: `end` if the
  // horizon was hit, otherwise the time of the last dispatched event (0 if
  // nothing ran).
  SimTime run_until(SimTime end = kTimeInfinity);

  // Stops the current run_until after the in-flight event returns. Used
  // when the workload has finished and only housekeeping events remain.
  void request_stop() { stop_ = true; }

  // Runaway guard; exceeded during run_until -> std::runtime_error.
  void set_max_events(std::uint64_t n) { max_events_ = n; }
  std::uint64_t dispatched() const { return dispatched_; }

  bool empty() const { return pending_.empty(); }

  // True while anything other than a SamplingTick is queued. Sampling ticks
  // self-reschedule, so periodic work uses this to stop perpetuating itself
  // once the simulated workload can make no further progress.
  bool has_pending_work() const { return pending_work_ > 0; }

  // Optional one-line-per-dispatch debug log.
  void set_event_log(std::ostream* os) { log_ = os; }

private:
  struct Entry {
    SimTime fire_at;
    std::uint64_t seq;
    EventKind kind;
    Action action;
    std::string label;
    bool cancelled = false;
    bool operator>(const Entry& o) const {
      if (fire_at != o.fire_at) return fire_at > o.fire_at;
      return seq > o.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::unordered_set<std::uint64_t> pending_; // queued and not cancelled
  std::unordered_set<std::uint64_t> pending_ticks_; // SamplingTick subset
  std::uint64_t pending_work_ = 0; // pending events that are not ticks
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 1;
  std::uint64_t dispatched_ = 0;
  std::uint64_t max_events_ = 10'000'000'000ULL;
  bool stop_ = false;
  std::ostream* log_ = nullptr;
};

} // namespace vsim

#endif
