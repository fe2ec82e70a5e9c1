#include "vsim/energy.hpp"

#include <stdexcept>

namespace vsim {

double node_power(const PowerParams& p, double usage) {
  if (usage < 0.0 || usage > 1.0)
    throw std::logic_error("node_power: usage outside [0,1]");
  return p.node_min_watts + usage * (p.node_max_watts - p.node_min_watts);
}

PowerBreakdown system_power_snapshot(const PowerParams& p, int node_count,
                                     int switch_count, int port_count,
                                     double usage, PortPowerState state) {
  PowerBreakdown b;
  b.nodes_watts = node_count * node_power(p, usage);
  b.switches_watts = switch_count * p.switch_chassis_watts;
  b.ports_watts = port_count * state_power(p.port, state);
  return b;
}

EnergyReport finalize(const EnergyLedger& ledger, const PowerParams& params,
                      const EnergyReport* baseline) {
  EnergyReport r;
  double span_s = to_sec(ledger.makespan);
  for (const auto& t : ledger.port_times) {
    r.port_joules += params.port.wake_watts * to_sec(t.wake + t.up + t.down) +
                     params.port.sleep_watts * to_sec(t.sleep);
  }
  for (SimTime busy : ledger.node_busy) {
    r.node_joules += params.node_min_watts * span_s +
                     (params.node_max_watts - params.node_min_watts) *
                         to_sec(busy);
  }
  r.switch_joules =
      ledger.switch_count * params.switch_chassis_watts * span_s;
  r.total_joules = r.node_joules + r.switch_joules + r.port_joules;
  if (ledger.delivered_payload_bits > 0)
    r.joules_per_bit =
        r.total_joules / static_cast<double>(ledger.delivered_payload_bits);
  if (baseline && baseline->total_joules > 0)
    r.savings_fraction = 1.0 - r.total_joules / baseline->total_joules;
  return r;
}

} // namespace vsim
