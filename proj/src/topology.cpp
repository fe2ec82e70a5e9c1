#include "vsim/topology.hpp"

#include <json.hpp>

#include <stdexcept>

namespace vsim {

namespace {

int add_port(TopologyGraph& g, int device, bool is_nic) {
  int id = static_cast<int>(g.ports.size());
  g.ports.push_back(PortRec{id, device, is_nic, -1});
  return id;
}

int add_link(TopologyGraph& g, int pa, int pb, LinkClass cls) {
  int id = static_cast<int>(g.links.size());
  g.links.push_back(LinkRec{id, pa, pb, cls});
  g.ports[pa].link = id;
  g.ports[pb].link = id;
  return id;
}

TopologyGraph build_micro(const TopologyConfig& cfg) {
  if (cfg.micro_nodes < 2)
    throw ConfigError("micro topology requires micro_nodes >= 2");
  TopologyGraph g;
  g.config = cfg;
  g.switches.push_back(SwitchRec{0, SwitchRole::Micro, 0});
  g.leaf_down_port_.resize(1);
  for (int n = 0; n < cfg.micro_nodes; ++n) {
    g.nodes.push_back(NodeRec{n, 0, 0, n});
    int nic = add_port(g, n, true);
    g.nic_port_.push_back(nic);
    int swp = add_port(g, 0, false);
    add_link(g, nic, swp, LinkClass::NodeAttach);
    g.leaf_down_port_[0].push_back(swp);
  }
  g.diameter = 2;
  return g;
}

} // namespace

TopologyGraph build(const TopologyConfig& cfg) {
  if (cfg.groups == 0) return build_micro(cfg);

  if (cfg.groups < 1) throw ConfigError("groups must be >= 1");
  if (cfg.switches_per_group < 2 || cfg.switches_per_group % 2 != 0)
    throw ConfigError("switches_per_group must be even and >= 2 "
                      "(a = switches_per_group/2 leaf/spine split)");
  const int a = cfg.switches_per_group / 2;
  if (cfg.radix % 2 != 0)
    throw ConfigError("radix must be even (radix/2 up and down ports)");
  const int half = cfg.radix / 2;
  if (cfg.nodes_per_group != a * half)
    throw ConfigError("nodes_per_group (" +
                      std::to_string(cfg.nodes_per_group) +
                      ") != a*radix/2 (" + std::to_string(a * half) + ")");
  if (cfg.groups > 1 && (cfg.groups - 1) * 2 != a * cfg.radix)
    throw ConfigError("groups-1 (" + std::to_string(cfg.groups - 1) +
                      ") != a*radix/2 (" + std::to_string(a) + "*" +
                      std::to_string(cfg.radix) +
                      "/2); one global link per group pair is impossible");

  TopologyGraph g;
  g.config = cfg;

  const int S = cfg.switches_per_group;
  for (int grp = 0; grp < cfg.groups; ++grp) {
    for (int s = 0; s < S; ++s) {
      int id = grp * S + s;
      g.switches.push_back(
          SwitchRec{id, s < a ? SwitchRole::Leaf : SwitchRole::Spine, grp});
    }
  }
  g.leaf_down_port_.resize(g.switches.size());
  g.leaf_up_port_.resize(g.switches.size());
  g.spine_down_port_.resize(g.switches.size());

  // node attachments
  for (int grp = 0; grp < cfg.groups; ++grp) {
    for (int n = 0; n < cfg.nodes_per_group; ++n) {
      int id = grp * cfg.nodes_per_group + n;
      int leaf = grp * S + n / half;
      g.nodes.push_back(NodeRec{id, grp, leaf, n % half});
      int nic = add_port(g, id, true);
      g.nic_port_.push_back(nic);
      int swp = add_port(g, leaf, false);
      add_link(g, nic, swp, LinkClass::NodeAttach);
      g.leaf_down_port_[leaf].push_back(swp);
    }
  }

  // intra-group bipartite leaf x spine
  for (int grp = 0; grp < cfg.groups; ++grp) {
    for (int l = 0; l < a; ++l) {
      int leaf = grp * S + l;
      g.leaf_up_port_[leaf].resize(a);
      for (int s = 0; s < a; ++s) {
        int spine = grp * S + a + s;
        if (g.spine_down_port_[spine].empty())
          g.spine_down_port_[spine].resize(a);
        int up = add_port(g, leaf, false);
        int down = add_port(g, spine, false);
        add_link(g, up, down, LinkClass::Local);
        g.leaf_up_port_[leaf][s] = up;
        g.spine_down_port_[spine][l] = down;
      }
    }
  }

  // one global link per group pair; from group gs, the link toward group gd
  // sits at offset ((gd - gs) mod groups) - 1, carved into radix/2-sized
  // slices across the a spines
  std::map<std::pair<int, int>, std::pair<int, int>> pending; // pair -> port
  for (int gs = 0; gs < cfg.groups; ++gs) {
    for (int gd = 0; gd < cfg.groups; ++gd) {
      if (gs == gd) continue;
      int off = ((gd - gs) % cfg.groups + cfg.groups) % cfg.groups - 1;
      int spine = gs * S + a + off / half;
      int port = add_port(g, spine, false);
      auto key = std::minmax(gs, gd);
      auto it = pending.find({key.first, key.second});
      if (it == pending.end()) {
        pending[{key.first, key.second}] = {port, 0};
      } else {
        int link = add_link(g, it->second.first, port, LinkClass::Global);
        g.global_link_[{key.first, key.second}] = link;
      }
    }
  }

  if (cfg.groups > 1)
    g.diameter = 5; // NIC, leaf-spine, global, spine-leaf, NIC
  else
    g.diameter = a > 1 || cfg.nodes_per_group > half ? 4 : 2;
  return g;
}

int TopologyGraph::nic_port(int node) const { return nic_port_.at(node); }

int TopologyGraph::peer_port(int port) const {
  const LinkRec& l = links[ports[port].link];
  return l.port_a == port ? l.port_b : l.port_a;
}

std::vector<int> TopologyGraph::route(int src_node, int dst_node) const {
  if (src_node == dst_node)
    throw std::logic_error("route: src == dst (self-messages are delivered "
                           "locally, never routed)");
  const NodeRec& src = nodes.at(src_node);
  const NodeRec& dst = nodes.at(dst_node);
  std::vector<int> path;
  path.push_back(nic_port(src_node));

  if (config.groups == 0) { // micro star
    path.push_back(peer_port(nic_port(dst_node)));
    return path;
  }

  const int S = config.switches_per_group;
  const int a = spines_per_group();
  const int half = config.radix / 2;

  auto leaf_down = [&](int leaf, int node) {
    return leaf_down_port_[leaf][nodes[node].local_port_index];
  };

  if (src.leaf_switch == dst.leaf_switch) {
    path.push_back(leaf_down(dst.leaf_switch, dst_node));
    return path;
  }

  if (src.group == dst.group) {
    // D-mod-k up-switch choice
    int spine_idx = dst_node % a;
    int spine = src.group * S + a + spine_idx;
    path.push_back(leaf_up_port_[src.leaf_switch][spine_idx]);
    int dst_leaf_idx = dst.leaf_switch - dst.group * S;
    path.push_back(spine_down_port_[spine][dst_leaf_idx]);
    path.push_back(leaf_down(dst.leaf_switch, dst_node));
    return path;
  }

  // ascend to the unique spine owning the global link to dst's group
  int off = ((dst.group - src.group) % config.groups + config.groups) %
                config.groups - 1;
  int spine_idx = off / half;
  path.push_back(leaf_up_port_[src.leaf_switch][spine_idx]);
  auto key = std::minmax(src.group, dst.group);
  const LinkRec& gl = links[global_link_.at({key.first, key.second})];
  int exit_port = switches[ports[gl.port_a].device].group == src.group
                      ? gl.port_a
                      : gl.port_b;
  path.push_back(exit_port);
  int entry_spine = ports[peer_port(exit_port)].device;
  int dst_leaf_idx = dst.leaf_switch - dst.group * S;
  path.push_back(spine_down_port_[entry_spine][dst_leaf_idx]);
  path.push_back(leaf_down(dst.leaf_switch, dst_node));
  return path;
}

std::string TopologyGraph::dump_json() const {
  nlohmann::json j;
  j["config"] = {{"groups", config.groups},
                 {"nodes_per_group", config.nodes_per_group},
                 {"switches_per_group", config.switches_per_group},
                 {"radix", config.radix},
                 {"micro_nodes", config.micro_nodes}};
  j["diameter"] = diameter;
  auto& sw = j["switches"] = nlohmann::json::array();
  for (const auto& s : switches)
    sw.push_back({{"id", s.id},
                  {"role", s.role == SwitchRole::Leaf    ? "leaf"
                           : s.role == SwitchRole::Spine ? "spine"
                                                         : "micro"},
                  {"group", s.group}});
  auto& nd = j["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes)
    nd.push_back({{"id", n.id},
                  {"group", n.group},
                  {"leaf_switch", n.leaf_switch},
                  {"local_port_index", n.local_port_index}});
  auto& pt = j["ports"] = nlohmann::json::array();
  for (const auto& p : ports)
    pt.push_back({{"id", p.id},
                  {"device", p.device},
                  {"nic", p.is_nic},
                  {"link", p.link}});
  auto& lk = j["links"] = nlohmann::json::array();
  for (const auto& l : links)
    lk.push_back({{"id", l.id},
                  {"port_a", l.port_a},
                  {"port_b", l.port_b},
                  {"class", l.cls == LinkClass::NodeAttach ? "node"
                            : l.cls == LinkClass::Local    ? "local"
                                                           : "global"}});
  return j.dump(2);
}

void HopDistanceTable::record(int hops) {
  if (hops < 1 || hops > max_hops())
    throw std::logic_error("HopDistanceTable::record: hops out of range");
  ++counts_[hops];
  ++total_;
}

double HopDistanceTable::proportion(int hops) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(counts_.at(hops)) / static_cast<double>(total_);
}

double HopDistanceTable::local_bound(double bound) const {
  if (total_ == 0) return bound / static_cast<double>(max_hops());
  double acc = 0.0;
  for (int h = 1; h <= max_hops(); ++h)
    if (counts_[h] != 0)
      acc += static_cast<double>(counts_[h]) / static_cast<double>(total_) / h;
  return bound * acc;
}

} // namespace vsim
