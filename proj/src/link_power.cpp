#include "vsim/link_power.hpp"

#include <cmath>

namespace vsim {

const char* sleep_profile_name(SleepProfile p) {
  return p == SleepProfile::FastWake ? "fast_wake" : "deep_sleep";
}

const char* power_state_name(PortPowerState s) {
  switch (s) {
  case PortPowerState::Wake: return "wake";
  case PortPowerState::Sleep: return "sleep";
  case PortPowerState::TransitionUp: return "transition_up";
  case PortPowerState::TransitionDown: return "transition_down";
  case PortPowerState::Handshaking: return "handshaking";
  }
  return "?";
}

double state_power(const LinkPowerProfile& p, PortPowerState s) {
  return s == PortPowerState::Sleep ? p.sleep_watts : p.wake_watts;
}

double register_capacity_seconds(int bits, double resolution_seconds) {
  return std::ldexp(1.0, bits) * resolution_seconds;
}

} // namespace vsim
