#ifndef VSIM_ENERGY_HPP
#define VSIM_ENERGY_HPP

#include <cstdint>
#include <vector>

#include "vsim/link_power.hpp"
#include "vsim/time.hpp"

namespace vsim {

struct PowerParams {
  double switch_chassis_watts = 250.0;
  double node_min_watts = 800.0;
  double node_max_watts = 1200.0;
  LinkPowerProfile port;
};

// node_min + usage x (node_max - node_min)
double node_power(const PowerParams& p, double usage);

struct PowerBreakdown {
  double nodes_watts = 0;
  double switches_watts = 0;
  double ports_watts = 0;
  double total() const { return nodes_watts + switches_watts + ports_watts; }
  double network_share() const {
    return (switches_watts + ports_watts) / total();
  }
  double ports_share() const { return ports_watts / total(); }
};

// Instantaneous draw with every node at `usage` and every port in `state`.
PowerBreakdown system_power_snapshot(const PowerParams& p, int node_count,
                                     int switch_count, int port_count,
                                     double usage, PortPowerState state);

// Time-in-state integration over a finished run.
struct EnergyLedger {
  std::vector<StateTimes> port_times; // indexed by port id
  std::vector<SimTime> node_busy;     // usage-1 time per node
  SimTime makespan = 0;
  int switch_count = 0;
  std::uint64_t delivered_payload_bits = 0;
};

struct EnergyReport {
  double node_joules = 0;
  double switch_joules = 0;
  double port_joules = 0;
  double total_joules = 0;
  double joules_per_bit = 0; // 0 when nothing delivered
  double savings_fraction = 0; // vs baseline; 0 when no baseline given
};

// savings = 1 - policy/baseline total joules; pass nullptr for no baseline.
EnergyReport finalize(const EnergyLedger& ledger, const PowerParams& params,
                      const EnergyReport* baseline);

} // namespace vsim

#endif
