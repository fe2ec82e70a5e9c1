#ifndef VSIM_FABRIC_HPP
#define VSIM_FABRIC_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "vsim/time.hpp"

namespace vsim {

struct FabricParams {
  int bandwidth_gbps = 400;
  std::int64_t input_capacity = 64 * 1024;  // bytes per input buffer
  std::int64_t output_capacity = 64 * 1024; // bytes per output buffer
  std::int64_t injection_capacity = 64 * 1024;
  SimTime switch_delay = ns(100);
  SimTime wire_local = ns(10);  // NIC attach + intra-group links
  SimTime wire_global = ns(50);
  std::int64_t mtu = 4096;
  std::int64_t control_message_bytes = 64;

  // bits x ps-per-bit; exact for 400 Gbps (2.5 ps/bit), rounded up otherwise
  SimTime serialization(std::int64_t bytes) const {
    std::int64_t bits = bytes * 8;
    std::int64_t num = bits * 1000;
    return (num + bandwidth_gbps - 1) / bandwidth_gbps;
  }
};

struct SimPacket {
  std::uint64_t id = 0;
  int src_node = -1;
  int dst_node = -1;
  std::int64_t size = 0; // bytes
  SimTime created_at = 0;
  SimTime delivered_at = -1;
  int hops = 0; // routed path length in links
  std::uint64_t message_id = 0;
  std::shared_ptr<const std::vector<int>> path; // transmitting port per link
  int hop_index = 0; // next transmitting port = (*path)[hop_index]
};

} // namespace vsim

#endif
