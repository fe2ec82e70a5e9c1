#ifndef VSIM_METRICS_HPP
#define VSIM_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vsim/time.hpp"

namespace vsim {

struct LatencyStats {
  std::uint64_t count = 0;
  double mean_ns = 0;
  double p50_ns = 0;
  double p95_ns = 0;
  double p99_ns = 0;
  double max_ns = 0;
};

// Nearest-rank percentiles on the sorted sample.
LatencyStats latency_stats(std::vector<SimTime> samples);
SimTime percentile_nearest_rank(const std::vector<SimTime>& sorted, double p);

struct EfficiencySeries {
  SimTime interval = us(100);
  std::vector<double> samples; // delivered bits / (aggregate bw x interval)
};

// Fixed 200-bin histogram of idle-period durations up to the 99th
// percentile, with per-bin CDF.
struct InactivityReport {
  int port = -1;
  SimTime p99 = 0;
  SimTime bin_width = 0;
  std::vector<std::uint64_t> bins; // 200 entries
  std::vector<double> cdf;         // cumulative fraction of ALL samples
  std::uint64_t sample_count = 0;
};

InactivityReport histogram_report(int port,
                                  const std::vector<SimTime>& idle_samples,
                                  int bin_count = 200);

struct OverheadReport {
  double exec_time_pct = 0;
  double mean_latency_pct = 0;
};

OverheadReport overhead(SimTime makespan_policy, double mean_latency_policy,
                        SimTime makespan_base, double mean_latency_base);

} // namespace vsim

#endif
