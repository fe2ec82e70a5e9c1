#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vsim/energy.hpp"

using namespace vsim;

namespace {
constexpr int kNodes = 4160;
constexpr int kSwitches = 1040;
constexpr int kPorts = 20800;
} // namespace

TEST_CASE("node power is linear in usage and range-checked") {
  PowerParams p;
  CHECK(node_power(p, 0.0) == 800.0);
  CHECK(node_power(p, 1.0) == 1200.0);
  CHECK(node_power(p, 0.5) == 1000.0);
  CHECK_THROWS(node_power(p, -0.1));
  CHECK_THROWS(node_power(p, 1.1));
}

TEST_CASE("idle-system power shares per port state") {
  PowerParams p;
  // all nodes idle (800 W), ports statically in one state
  struct Row {
    PortPowerState state;
    LinkPowerProfile profile;
    double network_pct, ports_pct;
  };
  const Row rows[] = {
      {PortPowerState::Wake, LinkPowerProfile::fast_wake(), 18.575, 12.214},
      {PortPowerState::Sleep, LinkPowerProfile::fast_wake(), 12.136, 5.272},
      {PortPowerState::Sleep, LinkPowerProfile::deep_sleep(), 8.519, 1.372},
  };
  for (const Row& r : rows) {
    PowerParams params = p;
    params.port = r.profile;
    PowerBreakdown b = system_power_snapshot(params, kNodes, kSwitches,
                                             kPorts, 0.0, r.state);
    CHECK(b.network_share() * 100 ==
          doctest::Approx(r.network_pct).epsilon(1e-4));
    CHECK(b.ports_share() * 100 ==
          doctest::Approx(r.ports_pct).epsilon(1e-4));
  }
}

TEST_CASE("full-load power shares per port state") {
  PowerParams p;
  const struct {
    PortPowerState state;
    LinkPowerProfile profile;
    double network_pct;
  } rows[] = {
      {PortPowerState::Wake, LinkPowerProfile::fast_wake(), 13.201},
      {PortPowerState::Sleep, LinkPowerProfile::fast_wake(), 8.432},
      {PortPowerState::Sleep, LinkPowerProfile::deep_sleep(), 5.845},
  };
  for (const auto& r : rows) {
    PowerParams params = p;
    params.port = r.profile;
    PowerBreakdown b = system_power_snapshot(params, kNodes, kSwitches,
                                             kPorts, 1.0, r.state);
    CHECK(b.network_share() * 100 ==
          doctest::Approx(r.network_pct).epsilon(1e-4));
  }
}

TEST_CASE("aggregate component powers at scale") {
  PowerParams p;
  PowerBreakdown idle = system_power_snapshot(p, kNodes, kSwitches, kPorts,
                                              0.0, PortPowerState::Wake);
  CHECK(idle.switches_watts == doctest::Approx(260e3));
  CHECK(idle.nodes_watts == doctest::Approx(3.328e6));
  CHECK(idle.ports_watts == doctest::Approx(499.2e3));
  PowerBreakdown busy = system_power_snapshot(p, kNodes, kSwitches, kPorts,
                                              1.0, PortPowerState::Wake);
  CHECK(busy.nodes_watts == doctest::Approx(4.992e6));
}

TEST_CASE("energy integration over a hand-built ledger") {
  PowerParams p;
  p.port = LinkPowerProfile::fast_wake();
  EnergyLedger led;
  led.makespan = sec(1);
  led.switch_count = 2;
  led.delivered_payload_bits = 1'000'000;
  // one port fully awake, one asleep half the time
  StateTimes awake;
  awake.wake = sec(1);
  StateTimes half;
  half.wake = ms(400);
  half.sleep = ms(500);
  half.up = ms(60);
  half.down = ms(40);
  led.port_times = {awake, half};
  // one node busy 25 % of the run, one idle
  led.node_busy = {ms(250), 0};

  EnergyReport r = finalize(led, p, nullptr);
  // 24 W x 1 s  +  24 x (0.4+0.06+0.04) + 9.6 x 0.5
  CHECK(r.port_joules == doctest::Approx(24.0 + 24.0 * 0.5 + 9.6 * 0.5));
  CHECK(r.switch_joules == doctest::Approx(2 * 250.0));
  // 800 x 1 s baseline each + 400 x busy
  CHECK(r.node_joules == doctest::Approx(800.0 * 2 + 400.0 * 0.25));
  CHECK(r.total_joules ==
        doctest::Approx(r.port_joules + r.switch_joules + r.node_joules));
  CHECK(r.joules_per_bit == doctest::Approx(r.total_joules / 1e6));
  CHECK(r.savings_fraction == 0.0);

  EnergyReport base = r;
  EnergyReport vs = finalize(led, p, &base);
  CHECK(vs.savings_fraction == doctest::Approx(0.0));
  base.total_joules = r.total_joules * 2;
  vs = finalize(led, p, &base);
  CHECK(vs.savings_fraction == doctest::Approx(0.5));
}
