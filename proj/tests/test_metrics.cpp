#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace vsim;

namespace {

// Sort-based nearest-rank oracle.
SimTime oracle_percentile(std::vector<SimTime> v, double p) {
  std::sort(v.begin(), v.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(v.size())));
  if (rank == 0) rank = 1;
  return v[rank - 1];
}

} // namespace

TEST_CASE("percentiles agree with the sort oracle on random samples") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng() % 10000;
    std::vector<SimTime> v(n);
    for (auto& x : v) x = static_cast<SimTime>(rng() % 1'000'000);
    std::vector<SimTime> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {1.0, 50.0, 95.0, 99.0, 100.0})
      CHECK(percentile_nearest_rank(sorted, p) == oracle_percentile(v, p));
  }
}

TEST_CASE("latency statistics on a known sample") {
  std::vector<SimTime> v;
  for (int i = 1; i <= 100; ++i) v.push_back(ns(i));
  LatencyStats s = latency_stats(v);
  CHECK(s.count == 100);
  CHECK(s.mean_ns == doctest::Approx(50.5));
  CHECK(s.p50_ns == doctest::Approx(50.0));
  CHECK(s.p95_ns == doctest::Approx(95.0));
  CHECK(s.p99_ns == doctest::Approx(99.0));
  CHECK(s.max_ns == doctest::Approx(100.0));

  LatencyStats empty = latency_stats({});
  CHECK(empty.count == 0);
  CHECK(empty.mean_ns == 0);
}

TEST_CASE("idle-period report: 200 bins up to the 99th percentile") {
  std::vector<SimTime> samples;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i)
    samples.push_back(us(1) + static_cast<SimTime>(rng() % us(400)));
  InactivityReport r = histogram_report(3, samples);
  CHECK(r.port == 3);
  CHECK(r.bins.size() == 200);
  CHECK(r.cdf.size() == 200);
  CHECK(r.sample_count == 5000);
  CHECK(r.p99 == oracle_percentile(samples, 99.0));
  // bin width spans [0, p99] across 200 bins
  CHECK(r.bin_width * 200 >= r.p99);
  CHECK(r.bin_width * 199 < r.p99 + r.bin_width);
  // CDF is monotone, bounded by 1, and ends near 0.99 (outliers excluded
  // from bins but counted in the denominator)
  double prev = 0;
  for (double c : r.cdf) {
    CHECK(c >= prev);
    CHECK(c <= 1.0);
    prev = c;
  }
  CHECK(r.cdf.back() == doctest::Approx(0.99).epsilon(0.01));
  std::uint64_t binned = 0;
  for (auto b : r.bins) binned += b;
  CHECK(binned <= r.sample_count);
  CHECK(r.cdf.back() ==
        doctest::Approx(static_cast<double>(binned) / r.sample_count));

  CHECK_THROWS_AS(histogram_report(0, {}), std::logic_error);
}

TEST_CASE("overhead of a run against itself is exactly zero") {
  OverheadReport o = overhead(ms(10), 1234.5, ms(10), 1234.5);
  CHECK(o.exec_time_pct == 0.0);
  CHECK(o.mean_latency_pct == 0.0);
  OverheadReport worse = overhead(ms(11), 1300.0, ms(10), 1000.0);
  CHECK(worse.exec_time_pct == doctest::Approx(10.0));
  CHECK(worse.mean_latency_pct == doctest::Approx(30.0));
}
