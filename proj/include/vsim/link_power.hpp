#ifndef VSIM_LINK_POWER_HPP
#define VSIM_LINK_POWER_HPP

#include <array>
#include <string>

#include "vsim/time.hpp"

namespace vsim {

enum class SleepProfile { FastWake, DeepSleep };

const char* sleep_profile_name(SleepProfile p);

// Per-state power draw and transition times of the configured low-power
// state. Exactly one sleep profile is active per experiment.
struct LinkPowerProfile {
  double wake_watts = 24.0;
  double sleep_watts;
  SimTime t_w; // sleep -> Wake
  SimTime t_s; // Wake -> sleep

  static LinkPowerProfile fast_wake() {
    return LinkPowerProfile{24.0, 9.6, ns(375), ns(200)};
  }
  static LinkPowerProfile deep_sleep() {
    return LinkPowerProfile{24.0, 2.4, ns(4480), us(2)};
  }
  static LinkPowerProfile of(SleepProfile p) {
    return p == SleepProfile::FastWake ? fast_wake() : deep_sleep();
  }
};

enum class PortPowerState {
  Wake,
  Sleep,          // the configured low-power state (Fast Wake or Deep Sleep)
  TransitionUp,
  TransitionDown,
  Handshaking,    // negotiating a power-down; billed at Wake power
};

const char* power_state_name(PortPowerState s);

// Time-in-state buckets for one port. Handshaking accrues into the Wake
// bucket (the port draws full power while negotiating).
struct StateTimes {
  SimTime wake = 0;
  SimTime sleep = 0;
  SimTime up = 0;
  SimTime down = 0;

  SimTime total() const { return wake + sleep + up + down; }
  void accrue(PortPowerState s, SimTime dt) {
    switch (s) {
    case PortPowerState::Wake:
    case PortPowerState::Handshaking: wake += dt; break;
    case PortPowerState::Sleep: sleep += dt; break;
    case PortPowerState::TransitionUp: up += dt; break;
    case PortPowerState::TransitionDown: down += dt; break;
    }
  }
};

// Transition states draw Wake power.
double state_power(const LinkPowerProfile& p, PortPowerState s);

// Maximum t_PDT value a hardware register of `bits` width can encode at
// `resolution` (2^bits x resolution).
double register_capacity_seconds(int bits, double resolution_seconds);

} // namespace vsim

#endif
