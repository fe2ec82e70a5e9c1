#include "vsim/sim.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace vsim {

Simulator::Simulator(SimConfig cfg, TraceProgram prog)
    : cfg_(std::move(cfg)), prog_(std::move(prog)),
      topo_(build(cfg_.topology)) {
  cfg_.power.port = LinkPowerProfile::of(cfg_.sleep);
  if (cfg_.rank_to_node.empty() &&
      prog_.ranks > static_cast<int>(topo_.nodes.size()))
    throw ConfigError("trace has more ranks than the topology has nodes "
                      "and no rank-to-node placement was given");
  if (!cfg_.rank_to_node.empty() &&
      cfg_.rank_to_node.size() != static_cast<std::size_t>(prog_.ranks))
    throw ConfigError("rank_to_node mapping size != rank count");
  q_.set_max_events(cfg_.max_events);
}

bool Simulator::port_is_up(const PortRt& p) const {
  return links_[p.link].state == PortPowerState::Wake;
}

SimTime Simulator::handshake_leg(const LinkRt& l) const {
  return cfg_.fabric.serialization(cfg_.fabric.control_message_bytes) +
         l.wire;
}

void Simulator::init_ports() {
  ports_.resize(topo_.ports.size());
  links_.resize(topo_.links.size());
  for (const auto& lr : topo_.links) {
    LinkRt& l = links_[lr.id];
    l.id = lr.id;
    l.pa = lr.port_a;
    l.pb = lr.port_b;
    l.wire = lr.cls == LinkClass::Global ? cfg_.fabric.wire_global
                                         : cfg_.fabric.wire_local;
  }
  for (const auto& pr : topo_.ports) {
    PortRt& p = ports_[pr.id];
    p.id = pr.id;
    p.link = pr.link;
    p.device = pr.device;
    p.is_nic = pr.is_nic;
    p.credits = cfg_.fabric.input_capacity; // remote input buffer
    p.idle_open = true;
    p.idle_since = 0;
    p.policy = std::make_unique<PortPolicy>(cfg_.policy, topo_.diameter);
    if (!pr.is_nic) switches_[pr.device].ports.push_back(pr.id);
  }
  for (auto& [sw, rt] : switches_)
    rt.rr_ptr.assign(rt.ports.size(), 0);
  // every output queue starts empty: arm the power-down timer from t=0 so
  // unused ports can sleep
  for (auto& p : ports_) arm_pdt(p);
}

void Simulator::start_ranks() {
  ranks_.resize(prog_.ranks);
  node_ranks_.assign(topo_.nodes.size(), {});
  node_busy_.assign(topo_.nodes.size(), 0);
  for (int r = 0; r < prog_.ranks; ++r) {
    ranks_[r].node = cfg_.rank_to_node.empty() ? r : cfg_.rank_to_node[r];
    if (ranks_[r].node < 0 ||
        ranks_[r].node >= static_cast<int>(topo_.nodes.size()))
      throw ConfigError("rank mapped to nonexistent node");
    node_ranks_[ranks_[r].node].push_back(r);
    q_.schedule(0, EventKind::TraceStep, [this, r] { advance_rank(r); },
                "rank-start");
  }
}

// ---------------------------------------------------------------- engine --

void Simulator::advance_rank(int r) {
  RankRt& rk = ranks_[r];
  rk.status = RankStatus::Ready;
  while (true) {
    if (rk.pc >= prog_.steps[r].size()) {
      rk.status = RankStatus::Done;
      if (++ranks_done_ == prog_.ranks) {
        all_done_ = true;
        done_at_ = q_.now();
        q_.request_stop();
      }
      return;
    }
    const TraceStep& step = prog_.steps[r][rk.pc];
    if (const auto* c = std::get_if<ComputeStep>(&step)) {
      ++rk.pc;
      node_busy_[rk.node] += c->duration;
      if (c->duration == 0) continue;
      q_.schedule(q_.now() + c->duration, EventKind::TraceStep,
                  [this, r] { advance_rank(r); }, "compute-done");
      return;
    }
    if (const auto* s = std::get_if<SendStep>(&step)) {
      ++rk.pc;
      issue_send(r, *s);
      if (rk.status == RankStatus::BlockedInject) return;
      continue;
    }
    const auto& rv = std::get<RecvStep>(step);
    auto key = std::make_pair(rv.src, r);
    auto& chan = channels_[key];
    if (!chan.empty() && messages_.at(chan.front()).completed) {
      messages_.erase(chan.front());
      chan.pop_front();
      ++rk.pc;
      continue;
    }
    rk.status = RankStatus::BlockedRecv;
    rk.wait_channel = key;
    return;
  }
}

void Simulator::issue_send(int r, const SendStep& s) {
  RankRt& rk = ranks_[r];
  int src_node = rk.node;
  int dst_node = cfg_.rank_to_node.empty() ? s.dst : cfg_.rank_to_node[s.dst];
  std::uint64_t mid = next_msg_id_++;
  std::uint64_t npkts =
      (s.bytes + cfg_.fabric.mtu - 1) / cfg_.fabric.mtu;

  MsgRec m{mid, r, s.dst, npkts, false};
  if (src_node == dst_node) {
    // self-message: delivered locally, never routed
    m.remaining = 0;
    m.completed = true;
    channels_[{r, s.dst}].push_back(mid);
    messages_.emplace(mid, m);
    on_message_complete(messages_.at(mid));
    return;
  }
  channels_[{r, s.dst}].push_back(mid);
  messages_.emplace(mid, m);

  auto path = std::make_shared<const std::vector<int>>(
      topo_.route(src_node, dst_node));
  std::int64_t left = s.bytes;
  while (left > 0) {
    std::int64_t sz = std::min(left, cfg_.fabric.mtu);
    left -= sz;
    SimPacket pkt;
    pkt.id = next_pkt_id_++;
    pkt.src_node = src_node;
    pkt.dst_node = dst_node;
    pkt.size = sz;
    pkt.created_at = q_.now();
    pkt.hops = static_cast<int>(path->size());
    pkt.message_id = mid;
    pkt.path = path;
    pkt.hop_index = 0;
    rk.pending_inject.push_back(std::move(pkt));
    ++result_.packets_injected;
  }
  try_inject(r);
  if (!rk.pending_inject.empty()) rk.status = RankStatus::BlockedInject;
}

void Simulator::try_inject(int r) {
  RankRt& rk = ranks_[r];
  PortRt& nic = ports_[topo_.nic_port(rk.node)];
  while (!rk.pending_inject.empty() &&
         nic.out_bytes + rk.pending_inject.front().size <=
             cfg_.fabric.injection_capacity) {
    SimPacket pkt = std::move(rk.pending_inject.front());
    rk.pending_inject.pop_front();
    enqueue_out(nic, std::move(pkt));
  }
  if (rk.pending_inject.empty() && rk.status == RankStatus::BlockedInject)
    advance_rank(r);
}

void Simulator::on_message_complete(MsgRec& m) {
  m.completed = true;
  // wake the receiver if it is blocked on this channel's front message
  RankRt& rk = ranks_[m.dst];
  if (rk.status != RankStatus::BlockedRecv) return;
  auto key = std::make_pair(m.src, m.dst);
  if (rk.wait_channel != key) return;
  const auto& chan = channels_.at(key);
  if (!chan.empty() && chan.front() == m.id) {
    int r = m.dst;
    advance_rank(r); // consumes the message at the Recv step
  }
}

// ---------------------------------------------------------------- fabric --

void Simulator::close_idle_gap(PortRt& p) {
  if (!p.idle_open) return;
  p.idle_open = false;
  SimTime gap = q_.now() - p.idle_since;
  if (gap <= 0) return;
  p.policy->observe_idle(gap, port_is_up(p), p.last_armed_tpdt);
  auto it = result_.idle_samples.find(p.id);
  if (it != result_.idle_samples.end()) it->second.push_back(gap);
}

void Simulator::enqueue_out(PortRt& p, SimPacket pkt) {
  close_idle_gap(p);
  p.policy->note_activity();
  cancel_pdt(p);
  p.out_bytes += pkt.size;
  if (p.out_bytes + p.out_reserved >
      (p.is_nic ? cfg_.fabric.injection_capacity
                : cfg_.fabric.output_capacity))
    throw std::logic_error("output buffer overflow on port " +
                           std::to_string(p.id));
  p.out_q.push_back(std::move(pkt));

  LinkRt& l = link_of(p);
  switch (l.state) {
  case PortPowerState::Wake:
    if (p.hs_committed) {
      l.pending_wake = true; // going down shortly; wake right after
    } else if (!p.down_req_inflight) {
      try_tx(p);
    }
    // down_req_inflight: wait for the response; reject resumes, accept
    // powers down and the queue triggers a wake afterwards
    break;
  case PortPowerState::Sleep:
    initiate_power_up(l);
    break;
  case PortPowerState::TransitionDown:
    l.pending_wake = true;
    break;
  case PortPowerState::TransitionUp:
  case PortPowerState::Handshaking:
    break;
  }
}

void Simulator::try_tx(PortRt& p) {
  if (p.tx_busy || p.out_q.empty()) return;
  LinkRt& l = link_of(p);
  if (l.state != PortPowerState::Wake) return;
  if (p.hs_committed || p.down_req_inflight) return;
  SimPacket& pkt = p.out_q.front();
  if (p.credits < pkt.size) return;

  p.credits -= pkt.size;
  p.tx_busy = true;
  p.policy->record_hops(pkt.hops);
  p.policy->note_activity();

  SimTime ser = cfg_.fabric.serialization(pkt.size);
  SimPacket flying = pkt;
  flying.hop_index = pkt.hop_index + 1;
  int pid = p.id;
  q_.schedule(q_.now() + ser, EventKind::TransmissionComplete,
              [this, pid] { on_tx_complete(ports_[pid]); }, "tx");
  int qid = peer(p).id;
  q_.schedule(q_.now() + ser + l.wire, EventKind::PacketArrival,
              [this, qid, flying]() mutable {
                on_arrival(ports_[qid], std::move(flying));
              },
              "rx");
}

void Simulator::on_tx_complete(PortRt& p) {
  assert(p.tx_busy && !p.out_q.empty());
  p.out_bytes -= p.out_q.front().size;
  p.out_q.pop_front();
  p.tx_busy = false;
  if (p.is_nic) {
    // injection space freed; blocked rank may proceed
    for (int r : node_ranks_[p.device])
      if (!ranks_[r].pending_inject.empty()) try_inject(r);
  } else {
    // output space freed; a head-of-line packet may now fit
    schedule_arbitration(p.device);
  }
  if (!p.out_q.empty()) {
    try_tx(p);
  } else {
    p.idle_open = true;
    p.idle_since = q_.now();
    arm_pdt(p);
  }
}

void Simulator::on_arrival(PortRt& p, SimPacket pkt) {
  // reception restarts the receiving side's power-down countdown
  cancel_pdt(p);
  if (p.out_q.empty() && !p.tx_busy && !p.hs_committed &&
      !p.down_req_inflight && link_of(p).state == PortPowerState::Wake)
    arm_pdt(p);
  if (p.is_nic) {
    deliver(p, pkt);
    // delivery frees the NIC buffer immediately; credit flows back
    int sender = peer(p).id;
    std::int64_t sz = pkt.size;
    q_.schedule(q_.now() + link_of(p).wire, EventKind::SyncMessage,
                [this, sender, sz] {
                  ports_[sender].credits += sz;
                  try_tx(ports_[sender]);
                },
                "credit");
    return;
  }
  p.in_bytes += pkt.size;
  if (p.in_bytes > cfg_.fabric.input_capacity)
    throw std::logic_error("input buffer overflow on port " +
                           std::to_string(p.id));
  p.in_q.push_back(std::move(pkt));
  schedule_arbitration(p.device);
}

void Simulator::deliver(PortRt& nic, SimPacket& pkt) {
  if (pkt.dst_node != nic.device)
    throw std::logic_error("misrouted packet " + std::to_string(pkt.id));
  pkt.delivered_at = q_.now();
  ++result_.packets_delivered;
  result_.latencies.push_back(pkt.delivered_at - pkt.created_at);
  std::uint64_t bits = static_cast<std::uint64_t>(pkt.size) * 8;
  result_.ledger.delivered_payload_bits += bits;
  bits_this_interval_ += bits;
  MsgRec& m = messages_.at(pkt.message_id);
  if (--m.remaining == 0) on_message_complete(m);
}

void Simulator::schedule_arbitration(int sw) {
  SwitchRt& rt = switches_.at(sw);
  if (rt.arb_scheduled) return;
  rt.arb_scheduled = true;
  q_.schedule(q_.now(), EventKind::PacketArrival,
              [this, sw] { arbitrate(sw); }, "arbitrate");
}

void Simulator::arbitrate(int sw) {
  SwitchRt& rt = switches_.at(sw);
  rt.arb_scheduled = false;
  const auto& plist = rt.ports;
  std::vector<bool> input_granted(plist.size(), false);
  int grants = 0;

  for (std::size_t oi = 0; oi < plist.size(); ++oi) {
    PortRt& out = ports_[plist[oi]];
    // round-robin over inputs whose head-of-line packet routes to `out`
    int n = static_cast<int>(plist.size());
    int chosen = -1;
    for (int step = 0; step < n; ++step) {
      int ii = (rt.rr_ptr[oi] + step) % n;
      if (input_granted[ii]) continue;
      PortRt& in = ports_[plist[ii]];
      if (in.in_q.empty()) continue;
      const SimPacket& head = in.in_q.front();
      if ((*head.path)[head.hop_index] != out.id) continue;
      if (out.out_bytes + out.out_reserved + head.size >
          cfg_.fabric.output_capacity)
        continue; // no room for this packet; a smaller head may still fit
      chosen = ii;
      break;
    }
    if (chosen < 0) continue;
    rt.rr_ptr[oi] = (chosen + 1) % n;
    input_granted[chosen] = true;
    ++grants;

    PortRt& in = ports_[plist[chosen]];
    SimPacket pkt = std::move(in.in_q.front());
    in.in_q.pop_front();
    in.in_bytes -= pkt.size;
    out.out_reserved += pkt.size;

    // credit back to the upstream transmitter
    int upstream = peer(in).id;
    std::int64_t sz = pkt.size;
    q_.schedule(q_.now() + link_of(in).wire, EventKind::SyncMessage,
                [this, upstream, sz] {
                  ports_[upstream].credits += sz;
                  try_tx(ports_[upstream]);
                },
                "credit");

    int oid = out.id;
    q_.schedule(q_.now() + cfg_.fabric.switch_delay, EventKind::PacketArrival,
                [this, oid, pkt]() mutable {
                  ports_[oid].out_reserved -= pkt.size;
                  enqueue_out(ports_[oid], std::move(pkt));
                },
                "xbar");
  }

  if (grants > 0) {
    for (std::size_t ii = 0; ii < plist.size(); ++ii)
      if (!ports_[plist[ii]].in_q.empty()) {
        schedule_arbitration(sw);
        break;
      }
  }
}

// ----------------------------------------------------------- link power --

void Simulator::arm_pdt(PortRt& p) {
  SimTime tpdt = p.policy->current_tpdt();
  p.last_armed_tpdt = tpdt;
  if (tpdt == kTimeInfinity) return; // always-on: never request power-down
  int pid = p.id;
  p.pdt_handle = q_.schedule(q_.now() + tpdt, EventKind::TimerExpiry,
                             [this, pid] { on_pdt_expiry(ports_[pid]); },
                             "pdt");
  p.pdt_armed = true;
}

void Simulator::cancel_pdt(PortRt& p) {
  if (!p.pdt_armed) return;
  q_.cancel(p.pdt_handle);
  p.pdt_armed = false;
}

void Simulator::on_pdt_expiry(PortRt& p) {
  p.pdt_armed = false;
  if (!p.out_q.empty() || p.tx_busy) return;
  LinkRt& l = link_of(p);
  if (l.state != PortPowerState::Wake) return;
  if (p.down_req_inflight || p.hs_committed) return;
  request_power_down(p);
}

void Simulator::request_power_down(PortRt& p) {
  p.down_req_inflight = true;
  LinkRt& l = link_of(p);
  SimTime leg = handshake_leg(l);
  int pid = p.id;
  q_.schedule(q_.now() + leg, EventKind::SyncMessage,
              [this, pid] {
                PortRt& req = ports_[pid];
                on_down_request(peer(req), req);
              },
              "pwr-down-req");
}

void Simulator::on_down_request(PortRt& responder, PortRt& requester) {
  LinkRt& l = link_of(responder);
  bool reject = !responder.out_q.empty() || responder.tx_busy ||
                responder.hs_committed ||
                l.state != PortPowerState::Wake ||
                (responder.down_req_inflight &&
                 responder.id < requester.id);
  if (!reject) {
    responder.hs_committed = true;
    if (responder.down_req_inflight) responder.down_req_void = true;
  }
  SimTime leg = handshake_leg(l);
  int rid = requester.id;
  bool accepted = !reject;
  q_.schedule(q_.now() + leg, EventKind::SyncMessage,
              [this, rid, accepted] {
                on_down_response(ports_[rid], accepted);
              },
              "pwr-down-resp");
}

void Simulator::on_down_response(PortRt& requester, bool accepted) {
  requester.down_req_inflight = false;
  if (requester.down_req_void) {
    // this port already yielded to the peer's own request
    requester.down_req_void = false;
    return;
  }
  LinkRt& l = link_of(requester);
  if (!accepted) {
    if (!requester.out_q.empty()) {
      try_tx(requester);
    } else {
      // rearm: keep waiting for the next quiet t_PDT window
      arm_pdt(requester);
    }
    return;
  }
  // synchronized transition start: requester send time + RTT == now
  peer(requester).hs_committed = false;
  requester.hs_committed = false;
  set_state(l, PortPowerState::TransitionDown);
  int lid = l.id;
  q_.schedule(q_.now() + cfg_.power.port.t_s, EventKind::SyncMessage,
              [this, lid] { on_down_complete(links_[lid]); }, "pwr-down");
}

void Simulator::on_down_complete(LinkRt& l) {
  set_state(l, PortPowerState::Sleep);
  if (l.pending_wake || !ports_[l.pa].out_q.empty() ||
      !ports_[l.pb].out_q.empty())
    initiate_power_up(l);
}

void Simulator::initiate_power_up(LinkRt& l) {
  if (l.up_req_inflight || l.state != PortPowerState::Sleep) return;
  l.up_req_inflight = true;
  l.pending_wake = false;
  // request + always-positive response; both ends transition together at
  // the requester's send time + RTT
  int lid = l.id;
  q_.schedule(q_.now() + 2 * handshake_leg(l), EventKind::SyncMessage,
              [this, lid] { on_up_response(links_[lid]); }, "pwr-up-resp");
}

void Simulator::on_up_response(LinkRt& l) {
  l.up_req_inflight = false;
  set_state(l, PortPowerState::TransitionUp);
  int lid = l.id;
  q_.schedule(q_.now() + cfg_.power.port.t_w, EventKind::SyncMessage,
              [this, lid] {
                LinkRt& lk = links_[lid];
                set_state(lk, PortPowerState::Wake);
                for (int pid : {lk.pa, lk.pb}) {
                  PortRt& p = ports_[pid];
                  if (p.out_q.empty()) {
                    if (!p.pdt_armed) arm_pdt(p);
                  } else {
                    try_tx(p);
                  }
                }
              },
              "pwr-up");
}

void Simulator::set_state(LinkRt& l, PortPowerState s) {
  l.times.accrue(l.state, q_.now() - l.entered);
  if (cfg_.collect_state_log)
    result_.state_log.push_back(StateChange{q_.now(), l.id, l.state, s});
  ++result_.link_transitions;
  l.state = s;
  l.entered = q_.now();
}

// ------------------------------------------------------------- sampling --

void Simulator::on_recalc_tick() {
  SimTime t_w = cfg_.power.port.t_w;
  for (auto& p : ports_) {
    p.policy->recalc(t_w);
    auto it = result_.tpdt_trajectory.find(p.id);
    if (it != result_.tpdt_trajectory.end())
      it->second.emplace_back(q_.now(), p.policy->current_tpdt());
  }
  if (!q_.has_pending_work()) return; // workload quiescent; let the run end
  q_.schedule(q_.now() + cfg_.policy.bound.recalc_interval,
              EventKind::SamplingTick, [this] { on_recalc_tick(); },
              "recalc");
}

void Simulator::on_efficiency_tick() {
  double denom = aggregate_bw_bits_per_sec_ *
                 to_sec(cfg_.efficiency_interval);
  result_.efficiency.samples.push_back(
      static_cast<double>(bits_this_interval_) / denom);
  bits_this_interval_ = 0;
  if (!q_.has_pending_work()) return; // workload quiescent; let the run end
  q_.schedule(q_.now() + cfg_.efficiency_interval, EventKind::SamplingTick,
              [this] { on_efficiency_tick(); }, "efficiency");
}

// ------------------------------------------------------------------ run --

RunResult Simulator::run() {
  for (int port : cfg_.report_ports) {
    result_.idle_samples[port];
    result_.tpdt_trajectory[port];
  }
  aggregate_bw_bits_per_sec_ =
      static_cast<double>(topo_.links.size()) *
      static_cast<double>(cfg_.fabric.bandwidth_gbps) * 1e9;
  result_.efficiency.interval = cfg_.efficiency_interval;

  init_ports();
  start_ranks();
  bool adaptive = cfg_.policy.kind == PolicyKind::PerfBound ||
                  cfg_.policy.kind == PolicyKind::PerfBoundCorrect;
  if (adaptive)
    q_.schedule(cfg_.policy.bound.recalc_interval, EventKind::SamplingTick,
                [this] { on_recalc_tick(); }, "recalc");
  q_.schedule(cfg_.efficiency_interval, EventKind::SamplingTick,
              [this] { on_efficiency_tick(); }, "efficiency");

  q_.run_until(kTimeInfinity);

  if (!all_done_)
    throw std::runtime_error(
        "simulation reached quiescence with unfinished ranks (trace "
        "deadlock or unmatched traffic)");

  RunResult out = std::move(result_);
  finish(out);
  return out;
}

void Simulator::finish(RunResult& out) {
  out.makespan = done_at_;
  // close the books at the makespan
  for (auto& l : links_) {
    l.times.accrue(l.state, out.makespan - l.entered);
    l.entered = out.makespan;
  }
  out.ledger.makespan = out.makespan;
  out.ledger.switch_count = static_cast<int>(switches_.size());
  out.ledger.port_times.resize(ports_.size());
  for (const auto& l : links_) {
    out.ledger.port_times[l.pa] = l.times;
    out.ledger.port_times[l.pb] = l.times;
  }
  out.ledger.node_busy = node_busy_;
  // trailing partial efficiency interval
  if (bits_this_interval_ > 0 || out.efficiency.samples.empty() ||
      out.makespan % cfg_.efficiency_interval != 0) {
    double denom =
        aggregate_bw_bits_per_sec_ * to_sec(cfg_.efficiency_interval);
    out.efficiency.samples.push_back(
        static_cast<double>(bits_this_interval_) / denom);
  }
  out.latency = latency_stats(out.latencies);
  out.energy = finalize(out.ledger, cfg_.power, nullptr);
}

} // namespace vsim
