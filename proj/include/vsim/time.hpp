#ifndef VSIM_TIME_HPP
#define VSIM_TIME_HPP

#include <cstdint>
#include <limits>
#include <string>

namespace vsim {

// Simulation time in integer picoseconds. Picosecond resolution keeps every
// timing constant in the model exactly representable (a 64 B frame at
// 400 Gbps serializes in 1.28 ns = 1280 ps), and a signed 64-bit count still
// covers ~106 days of simulated time.
using SimTime = std::int64_t;

constexpr SimTime kTimeInfinity = std::numeric_limits<SimTime>::max();

constexpr SimTime ps(std::int64_t v) { return v; }
constexpr SimTime ns(std::int64_t v) { return v * 1000; }
constexpr SimTime us(std::int64_t v) { return v * 1'000'000; }
constexpr SimTime ms(std::int64_t v) { return v * 1'000'000'000; }
constexpr SimTime sec(std::int64_t v) { return v * 1'000'000'000'000; }

constexpr double to_ns(SimTime t) { return static_cast<double>(t) / 1e3; }
constexpr double to_us(SimTime t) { return static_cast<double>(t) / 1e6; }
constexpr double to_sec(SimTime t) { return static_cast<double>(t) / 1e12; }

std::string format_time(SimTime t);

} // namespace vsim

#endif
