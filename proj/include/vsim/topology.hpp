#ifndef VSIM_TOPOLOGY_HPP
#define VSIM_TOPOLOGY_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsim/time.hpp"

namespace vsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two-level Megafly/Dragonfly+ arrangement: each group is a complete
// bipartite graph of `a` leaf switches x `a` spine switches with
// a = switches_per_group / 2, and every pair of groups is joined by exactly
// one global link between spine switches.
struct TopologyConfig {
  int groups = 65;
  int nodes_per_group = 64;
  int switches_per_group = 16;
  int radix = 16;

  // Single-switch star used by the micro benchmarks: `micro_nodes` NICs
  // hanging off one switch, no groups. Selected with groups == 0.
  int micro_nodes = 0;

  static TopologyConfig micro(int nodes) {
    TopologyConfig c;
    c.groups = 0;
    c.nodes_per_group = 0;
    c.switches_per_group = 0;
    c.radix = 0;
    c.micro_nodes = nodes;
    return c;
  }
};

enum class SwitchRole { Leaf, Spine, Micro };

struct SwitchRec {
  int id;
  SwitchRole role;
  int group;
};

struct NodeRec {
  int id;
  int group;
  int leaf_switch;      // switch id
  int local_port_index; // port index on the leaf switch
};

enum class LinkClass { NodeAttach, Local, Global };

struct PortRec {
  int id;
  int device; // switch id, or node id for NIC ports
  bool is_nic;
  int link = -1;
};

struct LinkRec {
  int id;
  int port_a;
  int port_b;
  LinkClass cls;
};

struct TopologyGraph {
  TopologyConfig config;
  std::vector<SwitchRec> switches;
  std::vector<NodeRec> nodes;
  std::vector<PortRec> ports;
  std::vector<LinkRec> links;

  int spines_per_group() const { return config.switches_per_group / 2; }
  int diameter = 0; // links NIC-to-NIC

  int nic_port(int node) const; // the single port on a node
  int peer_port(int port) const;
  int port_device(int port) const { return ports[port].device; }

  // Deterministic minimal route: ordered list of transmitting ports, one per
  // traversed link, starting at src's NIC port. Throws on src == dst.
  std::vector<int> route(int src_node, int dst_node) const;

  std::string dump_json() const;

  // wiring bookkeeping, filled by build(); consumers use route()/nic_port()
  std::map<std::pair<int, int>, int> global_link_; // (min g, max g) -> link id
  std::vector<int> nic_port_;                      // node -> NIC port id
  std::vector<std::vector<int>> leaf_down_port_;   // leaf sw -> node ports
  std::vector<std::vector<int>> leaf_up_port_;     // leaf sw -> per-spine port
  std::vector<std::vector<int>> spine_down_port_;  // spine sw -> per-leaf port
};

// Validates the bipartite/radix arithmetic and wires the graph. Throws
// ConfigError naming the violated equation.
TopologyGraph build(const TopologyConfig& config);

// Per-source-port record of packet hop counts, yielding proportions p_i used
// for the hop-weighted degradation budget.
class HopDistanceTable {
public:
  explicit HopDistanceTable(int max_hops) : counts_(max_hops + 1, 0) {}

  void record(int hops);
  std::uint64_t total() const { return total_; }
  double proportion(int hops) const;
  int max_hops() const { return static_cast<int>(counts_.size()) - 1; }

  // bound x sum_i p_i / h_i; empty table falls back to bound / max_hops
  // (most conservative budget).
  double local_bound(double bound) const;

private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

} // namespace vsim

#endif
