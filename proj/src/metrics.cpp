#include "vsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vsim {

SimTime percentile_nearest_rank(const std::vector<SimTime>& sorted, double p) {
  if (sorted.empty()) return 0;
  auto n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

LatencyStats latency_stats(std::vector<SimTime> samples) {
  LatencyStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  double sum = 0;
  for (SimTime v : samples) sum += to_ns(v);
  s.mean_ns = sum / static_cast<double>(samples.size());
  s.p50_ns = to_ns(percentile_nearest_rank(samples, 50));
  s.p95_ns = to_ns(percentile_nearest_rank(samples, 95));
  s.p99_ns = to_ns(percentile_nearest_rank(samples, 99));
  s.max_ns = to_ns(samples.back());
  return s;
}

InactivityReport histogram_report(int port,
                                  const std::vector<SimTime>& idle_samples,
                                  int bin_count) {
  if (idle_samples.empty())
    throw std::logic_error("histogram_report: no idle samples");
  InactivityReport rep;
  rep.port = port;
  rep.sample_count = idle_samples.size();
  std::vector<SimTime> sorted = idle_samples;
  std::sort(sorted.begin(), sorted.end());
  rep.p99 = percentile_nearest_rank(sorted, 99);
  // bins cover [0, p99]; outliers beyond p99 are excluded from the display
  // but still count toward the CDF denominator
  rep.bin_width = std::max<SimTime>(1, (rep.p99 + bin_count - 1) / bin_count);
  rep.bins.assign(bin_count, 0);
  for (SimTime v : sorted) {
    if (v > rep.p99) break;
    auto bin = std::min<SimTime>(v / rep.bin_width, bin_count - 1);
    ++rep.bins[bin];
  }
  rep.cdf.resize(bin_count);
  std::uint64_t acc = 0;
  for (int i = 0; i < bin_count; ++i) {
    acc += rep.bins[i];
    rep.cdf[i] = static_cast<double>(acc) /
                 static_cast<double>(rep.sample_count);
  }
  return rep;
}

OverheadReport overhead(SimTime makespan_policy, double mean_latency_policy,
                        SimTime makespan_base, double mean_latency_base) {
  OverheadReport r;
  if (makespan_base > 0)
    r.exec_time_pct = (static_cast<double>(makespan_policy) /
                           static_cast<double>(makespan_base) -
                       1.0) *
                      100.0;
  if (mean_latency_base > 0)
    r.mean_latency_pct =
        (mean_latency_policy / mean_latency_base - 1.0) * 100.0;
  return r;
}

} // namespace vsim
