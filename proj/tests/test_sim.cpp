#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vsim/sim.hpp"

#include <variant>
#include <vector>

using namespace vsim;

namespace {

SimConfig micro_cfg(int nodes) {
  SimConfig c;
  c.topology = TopologyConfig::micro(nodes);
  return c;
}

TraceProgram prog(std::vector<std::vector<TraceStep>> steps) {
  TraceProgram p;
  p.ranks = static_cast<int>(steps.size());
  p.steps = std::move(steps);
  return p;
}

void check_accounting(const RunResult& r) {
  CHECK(r.packets_injected == r.packets_delivered);
  for (const auto& st : r.ledger.port_times)
    CHECK(st.total() == r.makespan);
  CHECK(r.energy.total_joules ==
        doctest::Approx(r.energy.node_joules + r.energy.switch_joules +
                        r.energy.port_joules));
}

SyntheticPattern random_pattern(int ranks, std::uint64_t seed) {
  SyntheticPattern pat;
  pat.kind = PatternKind::UniformRandom;
  pat.ranks = ranks;
  pat.random_messages = 200;
  pat.seed = seed;
  return pat;
}

} // namespace

TEST_CASE("single packet latency matches the closed form") {
  // NIC serialization + wire + switch traversal + serialization + wire:
  // 81.92 + 10 + 100 + 81.92 + 10 ns = 283.84 ns
  SimConfig cfg = micro_cfg(2);
  TraceProgram p = prog({{SendStep{1, 4096}}, {RecvStep{0}}});
  RunResult r = Simulator(cfg, p).run();
  REQUIRE(r.latencies.size() == 1);
  CHECK(r.latencies[0] == ns(283) + ps(840));
  CHECK(r.makespan == r.latencies[0]);
  check_accounting(r);
}

TEST_CASE("multi-packet message segments at the MTU and pipelines") {
  SimConfig cfg = micro_cfg(2);
  TraceProgram p = prog({{SendStep{1, 3 * 4096}}, {RecvStep{0}}});
  RunResult r = Simulator(cfg, p).run();
  REQUIRE(r.latencies.size() == 3);
  // cut-through at packet granularity: each extra packet adds one
  // serialization time at the bottleneck
  CHECK(r.makespan == ns(283) + ps(840) + 2 * (ns(81) + ps(920)));
  check_accounting(r);
}

TEST_CASE("pure compute trace: makespan equals the longest program") {
  SimConfig cfg = micro_cfg(2);
  TraceProgram p =
      prog({{ComputeStep{us(30)}}, {ComputeStep{us(10)}, ComputeStep{us(5)}}});
  RunResult r = Simulator(cfg, p).run();
  CHECK(r.makespan == us(30));
  CHECK(r.packets_injected == 0);
  check_accounting(r);
}

TEST_CASE("messages to a co-located rank complete without packets") {
  SimConfig cfg = micro_cfg(2);
  cfg.rank_to_node = {0, 0, 1};
  TraceProgram p = prog({{SendStep{1, 8192}},
                         {RecvStep{0}, SendStep{2, 4096}},
                         {RecvStep{1}}});
  RunResult r = Simulator(cfg, p).run();
  CHECK(r.packets_injected == 1); // only the cross-node message
  check_accounting(r);
}

TEST_CASE("sends block once the injection buffer fills, then drain") {
  SimConfig cfg = micro_cfg(2);
  // 40 MTU packets vs a 16-packet injection buffer
  TraceProgram p = prog({{SendStep{1, 40 * 4096}, ComputeStep{ns(1)}},
                         {RecvStep{0}}});
  RunResult r = Simulator(cfg, p).run();
  CHECK(r.packets_delivered == 40);
  check_accounting(r);
}

TEST_CASE("FIFO channels pair receives with sends in order") {
  SimConfig cfg = micro_cfg(2);
  TraceProgram p = prog({{SendStep{1, 64}, SendStep{1, 4096}, RecvStep{1}},
                         {RecvStep{0}, RecvStep{0}, SendStep{0, 64}}});
  RunResult r = Simulator(cfg, p).run();
  CHECK(r.packets_delivered == 3);
  check_accounting(r);
}

TEST_CASE("deadlocked traces are detected, not spun on") {
  SimConfig cfg = micro_cfg(2);
  TraceProgram p = prog({{RecvStep{1}}, {RecvStep{0}}});
  CHECK_THROWS_AS(Simulator(cfg, p).run(), std::runtime_error);

  // same with a power-managed fabric: armed timers must also drain
  cfg.policy.kind = PolicyKind::FixedPdt;
  cfg.policy.fixed_tpdt = us(1);
  CHECK_THROWS_AS(Simulator(cfg, p).run(), std::runtime_error);
}

TEST_CASE("random workloads conserve packets under every policy") {
  TopologyConfig topo;
  topo.groups = 5;
  topo.switches_per_group = 4;
  topo.radix = 4;
  topo.nodes_per_group = 4; // 20 nodes
  TraceProgram p = generate(random_pattern(20, 77));
  for (PolicyKind kind :
       {PolicyKind::AlwaysOn, PolicyKind::FixedPdt, PolicyKind::PerfBound,
        PolicyKind::PerfBoundCorrect}) {
    SimConfig cfg;
    cfg.topology = topo;
    cfg.policy.kind = kind;
    cfg.policy.fixed_tpdt = us(1);
    cfg.policy.bound.recalc_interval = us(100);
    RunResult r = Simulator(cfg, p).run();
    CHECK(r.packets_delivered > 0);
    check_accounting(r);
  }
}

TEST_CASE("repeated runs are bit-identical") {
  TraceProgram p = generate(random_pattern(8, 5));
  SimConfig cfg = micro_cfg(8);
  cfg.policy.kind = PolicyKind::PerfBoundCorrect;
  cfg.policy.bound.recalc_interval = us(50);
  cfg.collect_state_log = true;
  RunResult a = Simulator(cfg, p).run();
  RunResult b = Simulator(cfg, p).run();
  CHECK(a.makespan == b.makespan);
  CHECK(a.latencies == b.latencies);
  CHECK(a.link_transitions == b.link_transitions);
  CHECK(a.energy.total_joules == b.energy.total_joules);
  REQUIRE(a.state_log.size() == b.state_log.size());
  for (std::size_t i = 0; i < a.state_log.size(); ++i) {
    CHECK(a.state_log[i].at == b.state_log[i].at);
    CHECK(a.state_log[i].link == b.state_log[i].link);
    CHECK(a.state_log[i].to == b.state_log[i].to);
  }
}

TEST_CASE("baseline policy keeps every link awake for the whole run") {
  TraceProgram p = generate(random_pattern(4, 9));
  SimConfig cfg = micro_cfg(4);
  RunResult r = Simulator(cfg, p).run();
  CHECK(r.link_transitions == 0);
  for (const auto& st : r.ledger.port_times) {
    CHECK(st.wake == r.makespan);
    CHECK(st.sleep == 0);
  }
}

TEST_CASE("power management reduces port energy on sparse traffic") {
  SyntheticPattern pat; // bursts separated by 50 us of compute
  pat.ranks = 4;
  pat.iterations = 10;
  TraceProgram p = generate(pat);

  SimConfig base = micro_cfg(4);
  RunResult always_on = Simulator(base, p).run();

  SimConfig managed = base;
  managed.policy.kind = PolicyKind::FixedPdt;
  managed.policy.fixed_tpdt = us(1);
  RunResult pdt = Simulator(managed, p).run();

  CHECK(pdt.link_transitions > 0);
  CHECK(pdt.energy.port_joules < always_on.energy.port_joules);
  // powering down costs time: execution can only slow down
  CHECK(pdt.makespan >= always_on.makespan);
  check_accounting(pdt);
}

TEST_CASE("efficiency series integrates back to the delivered bits") {
  TraceProgram p = generate(random_pattern(6, 3));
  SimConfig cfg = micro_cfg(6);
  RunResult r = Simulator(cfg, p).run();
  double capacity_bits_per_interval =
      6.0 * 400e9 * to_sec(cfg.efficiency_interval);
  double sum = 0;
  for (double s : r.efficiency.samples) sum += s * capacity_bits_per_interval;
  CHECK(sum == doctest::Approx(static_cast<double>(
                   r.ledger.delivered_payload_bits))
                   .epsilon(1e-9));
}

TEST_CASE("idle samples and threshold trajectories are captured on request") {
  SyntheticPattern pat;
  pat.ranks = 2;
  pat.iterations = 20;
  pat.gap = us(20);
  TraceProgram p = generate(pat);
  SimConfig cfg = micro_cfg(2);
  cfg.policy.kind = PolicyKind::PerfBound;
  cfg.policy.bound.recalc_interval = us(100);
  cfg.report_ports = {0};
  RunResult r = Simulator(cfg, p).run();
  REQUIRE(r.idle_samples.count(0) == 1);
  CHECK(!r.idle_samples.at(0).empty());
  for (SimTime gap : r.idle_samples.at(0)) CHECK(gap > 0);
  REQUIRE(r.tpdt_trajectory.count(0) == 1);
  CHECK(!r.tpdt_trajectory.at(0).empty());
}
