#include "vsim/core.hpp"

#include <sstream>
#include <stdexcept>

namespace vsim {

std::string format_time(SimTime t) {
  std::ostringstream os;
  if (t == kTimeInfinity) return "inf";
  if (t % 1000 == 0)
    os << t / 1000 << "ns";
  else
    os << t << "ps";
  return os.str();
}

const char* event_kind_name(EventKind k) {
  switch (k) {
  case EventKind::PacketArrival: return "packet-arrival";
  case EventKind::TransmissionComplete: return "transmission-complete";
  case EventKind::TimerExpiry: return "timer-expiry";
  case EventKind::SyncMessage: return "sync-message";
  case EventKind::TraceStep: return "trace-step";
  case EventKind::SamplingTick: return "sampling-tick";
  }
  return "?";
}

EventHandle EventQueue::schedule(SimTime fire_at, EventKind kind,
                                 Action action, std::string debug_label) {
  if (fire_at < now_) {
    throw std::logic_error("EventQueue::schedule: event at " +
                           format_time(fire_at) + " is in the past (now=" +
                           format_time(now_) + ", kind=" +
                           event_kind_name(kind) + ")");
  }
  std::uint64_t seq = next_seq_++;
  heap_.push(Entry{fire_at, seq, kind, std::move(action),
                   std::move(debug_label)});
  pending_.insert(seq);
  if (kind == EventKind::SamplingTick)
    pending_ticks_.insert(seq);
  else
    ++pending_work_;
  return EventHandle{seq};
}

bool EventQueue::cancel(EventHandle h) {
  if (!h.valid()) return false;
  if (pending_.erase(h.seq) == 0) return false;
  if (pending_ticks_.erase(h.seq) == 0) --pending_work_;
  return true;
}

SimTime EventQueue::run_until(SimTime end) {
  stop_ = false;
  while (!heap_.empty()) {
    if (stop_) break;
    const Entry& top = heap_.top();
    if (pending_.count(top.seq) == 0) { // cancelled; drop lazily
      heap_.pop();
      continue;
    }
    if (top.fire_at > end) {
      now_ = end; // horizon reached with work left queued
      return now_;
    }
    Entry e = std::move(const_cast<Entry&>(top));
    heap_.pop();
    pending_.erase(e.seq);
    if (pending_ticks_.erase(e.seq) == 0) --pending_work_;
    now_ = e.fire_at;
    if (++dispatched_ > max_events_)
      throw std::runtime_error("EventQueue: event-count safety limit (" +
                               std::to_string(max_events_) + ") exceeded");
    if (log_)
      *log_ << format_time(now_) << ' ' << event_kind_name(e.kind)
            << (e.label.empty() ? "" : " ") << e.label << '\n';
    e.action();
  }
  return now_;
}

} // namespace vsim
