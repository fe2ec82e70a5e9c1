#ifndef VSIM_SIM_HPP
#define VSIM_SIM_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <vector>

#include "vsim/core.hpp"
#include "vsim/energy.hpp"
#include "vsim/fabric.hpp"
#include "vsim/link_power.hpp"
#include "vsim/metrics.hpp"
#include "vsim/policy.hpp"
#include "vsim/time.hpp"
#include "vsim/topology.hpp"
#include "vsim/traffic.hpp"

namespace vsim {

struct SimConfig {
  TopologyConfig topology;
  FabricParams fabric;
  PowerParams power; // .port is overwritten from `sleep` at run start
  SleepProfile sleep = SleepProfile::FastWake;
  PolicyConfig policy;
  SimTime efficiency_interval = us(100);
  std::vector<int> report_ports; // idle samples + t_PDT trajectories
  std::vector<int> rank_to_node; // empty = identity mapping
  std::uint64_t max_events = 10'000'000'000ULL;
  bool collect_state_log = false;
};

struct StateChange {
  SimTime at;
  int link;
  PortPowerState from;
  PortPowerState to;
};

struct RunResult {
  SimTime makespan = 0;
  std::vector<SimTime> latencies; // per delivered packet, delivery order
  LatencyStats latency;
  EnergyLedger ledger;
  EnergyReport energy; // no baseline applied; callers compare runs
  std::uint64_t packets_injected = 0;
  std::uint64_t packets_delivered = 0;
  EfficiencySeries efficiency;
  std::map<int, std::vector<SimTime>> idle_samples;
  std::map<int, std::vector<std::pair<SimTime, SimTime>>> tpdt_trajectory;
  std::vector<StateChange> state_log;
  std::uint64_t link_transitions = 0;
};

// One trace replay over one network instance. Single-threaded; instances
// share nothing, so parameter sweeps may run many in parallel.
class Simulator {
public:
  Simulator(SimConfig cfg, TraceProgram prog);
  RunResult run();

  const TopologyGraph& topology() const { return topo_; }

private:
  struct PortRt {
    int id = -1;
    int link = -1;
    int device = -1;
    bool is_nic = false;
    std::deque<SimPacket> out_q;
    std::int64_t out_bytes = 0;
    std::int64_t out_reserved = 0; // granted, in switch traversal
    std::deque<SimPacket> in_q;
    std::int64_t in_bytes = 0;
    std::int64_t credits = 0;
    bool tx_busy = false;
    EventHandle pdt_handle;
    bool pdt_armed = false;
    SimTime last_armed_tpdt = 0;
    SimTime idle_since = 0;
    bool idle_open = false;
    bool down_req_inflight = false;
    bool down_req_void = false;
    bool hs_committed = false; // accepted a power-down, waiting for sync
    std::unique_ptr<PortPolicy> policy;
  };

  struct LinkRt {
    int id = -1;
    int pa = -1, pb = -1;
    SimTime wire = 0;
    PortPowerState state = PortPowerState::Wake;
    SimTime entered = 0;
    StateTimes times;
    bool pending_wake = false;
    bool up_req_inflight = false;
  };

  struct SwitchRt {
    std::vector<int> ports; // ascending port ids
    bool arb_scheduled = false;
    std::vector<int> rr_ptr; // per output slot: next input slot to consider
  };

  struct MsgRec {
    std::uint64_t id;
    int src, dst;
    std::uint64_t remaining; // packets not yet delivered
    bool completed = false;
  };

  enum class RankStatus { Ready, BlockedRecv, BlockedInject, Done };

  struct RankRt {
    int node = -1;
    std::size_t pc = 0;
    RankStatus status = RankStatus::Ready;
    std::deque<SimPacket> pending_inject;
    std::pair<int, int> wait_channel{-1, -1}; // (src, dst) when BlockedRecv
  };

  // wiring
  void init_ports();
  void start_ranks();

  // trace engine
  void advance_rank(int r);
  void issue_send(int r, const SendStep& s);
  void try_inject(int r);
  void on_message_complete(MsgRec& m);

  // fabric
  void enqueue_out(PortRt& p, SimPacket pkt);
  void try_tx(PortRt& p);
  void on_tx_complete(PortRt& p);
  void on_arrival(PortRt& q, SimPacket pkt);
  void deliver(PortRt& nic, SimPacket& pkt);
  void schedule_arbitration(int sw);
  void arbitrate(int sw);

  // link power protocol
  void arm_pdt(PortRt& p);
  void cancel_pdt(PortRt& p);
  void on_pdt_expiry(PortRt& p);
  void request_power_down(PortRt& p);
  void on_down_request(PortRt& responder, PortRt& requester);
  void on_down_response(PortRt& requester, bool accepted);
  void on_down_complete(LinkRt& l);
  void initiate_power_up(LinkRt& l);
  void on_up_response(LinkRt& l);
  void set_state(LinkRt& l, PortPowerState s);
  bool port_is_up(const PortRt& p) const;
  SimTime handshake_leg(const LinkRt& l) const; // control ser + wire

  void close_idle_gap(PortRt& p);

  // housekeeping
  void on_recalc_tick();
  void on_efficiency_tick();
  void finish(RunResult& out);

  PortRt& peer(const PortRt& p) {
    const LinkRec& l = topo_.links[p.link];
    return ports_[l.port_a == p.id ? l.port_b : l.port_a];
  }
  LinkRt& link_of(const PortRt& p) { return links_[p.link]; }

  SimConfig cfg_;
  TraceProgram prog_;
  TopologyGraph topo_;
  EventQueue q_;

  std::vector<PortRt> ports_;
  std::vector<LinkRt> links_;
  std::map<int, SwitchRt> switches_;
  std::vector<RankRt> ranks_;
  std::vector<std::vector<int>> node_ranks_; // node id -> ranks placed there
  std::vector<SimTime> node_busy_;
  std::map<std::pair<int, int>, std::deque<std::uint64_t>> channels_;
  std::map<std::uint64_t, MsgRec> messages_;
  std::uint64_t next_msg_id_ = 1;
  std::uint64_t next_pkt_id_ = 1;
  int ranks_done_ = 0;
  bool all_done_ = false;
  SimTime done_at_ = 0;

  RunResult result_;
  std::uint64_t bits_this_interval_ = 0;
  double aggregate_bw_bits_per_sec_ = 0;
};

} // namespace vsim

#endif
