#ifndef VSIM_POLICY_HPP
#define VSIM_POLICY_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "vsim/time.hpp"
#include "vsim/topology.hpp"

namespace vsim {

enum class HistRetention { Unbounded, SelfClearing, Circular };

struct HistogramConfig {
  SimTime bin_width = us(1);
  SimTime max_bin = sec(1);
  HistRetention retention = HistRetention::Unbounded;
  int capacity = 250; // N for self_clearing / circular

  int bin_count() const { return static_cast<int>(max_bin / bin_width); }
};

// Per-port record of idle-period durations, binned. Three retention
// strategies: keep everything, wipe after every N insertions, or keep a
// sliding window of the last N samples.
class InactivityHistogram {
public:
  explicit InactivityHistogram(HistogramConfig cfg);

  void record(SimTime duration);
  std::uint64_t count(int bin) const;
  std::uint64_t total() const { return total_; }
  int highest_bin() const; // -1 when empty
  const HistogramConfig& config() const { return cfg_; }
  SimTime bin_center(int bin) const {
    return bin * cfg_.bin_width + cfg_.bin_width / 2;
  }

private:
  HistogramConfig cfg_;
  std::map<int, std::uint64_t> counts_;
  std::deque<int> window_; // circular retention: FIFO of bin indices
  std::uint64_t total_ = 0;
  std::uint64_t since_clear_ = 0;
};

struct BoundConfig {
  double bound = 0.01;           // degradation threshold fraction
  SimTime recalc_interval = ms(10); // X
};

// Histogram bin-scan: walking bins from highest to lowest, accumulate
// counts; return the center of the lowest-indexed bin whose running total is
// still <= budget. No qualifying bin -> max_tpdt; empty histogram ->
// initial_tpdt.
SimTime perfbound_tpdt(const InactivityHistogram& hist, double budget,
                       SimTime max_tpdt, SimTime initial_tpdt);

// N = l * X / t_w (kept fractional).
double delay_budget(double local_bound, SimTime interval, SimTime t_w);

// Miss-tracking state for PerfBoundCorrect: a shift register of the last n_R
// hit/miss outcomes plus a FIFO of the miss ratios still inside the register.
class CorrectionState {
public:
  explicit CorrectionState(int register_length);

  // A miss carries the ratio idle_duration / t_pdt_in_force (>= 1).
  void record_hit();
  void record_miss(double ratio);

  int misses() const { return miss_count_; }
  int register_length() const { return length_; }
  double miss_fraction() const {
    return static_cast<double>(miss_count_) / length_;
  }
  const std::deque<double>& ratios() const { return ratios_; }

  // miss% x geometric mean of stored ratios; 0 when no misses.
  double correction_factor() const;

private:
  void shift(bool miss);
  int length_;
  std::deque<bool> bits_; // at most length_ entries, oldest at front
  std::deque<double> ratios_;
  int miss_count_ = 0;
};

// min(base * (1 + cf), max_tpdt): the correction only lengthens t_PDT.
SimTime corrected_tpdt(SimTime base, double cf, SimTime max_tpdt);

enum class PolicyKind { AlwaysOn, FixedPdt, PerfBound, PerfBoundCorrect };

const char* policy_kind_name(PolicyKind k);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::AlwaysOn;
  SimTime fixed_tpdt = 0;       // FixedPdt; kTimeInfinity = never sleep
  BoundConfig bound;            // PerfBound*
  HistogramConfig histogram;    // PerfBound*
  int register_length = 32;     // n_R, PerfBoundCorrect
  SimTime max_tpdt = ms(1);
  SimTime initial_tpdt = 0;     // before any history: sleep immediately
};

// Per-port policy engine: owns the histogram, hop-distance table and
// correction state, and produces the t_PDT in force.
class PortPolicy {
public:
  PortPolicy(const PolicyConfig& cfg, int max_hops);

  SimTime current_tpdt() const { return tpdt_; }
  bool adaptive() const {
    return cfg_.kind == PolicyKind::PerfBound ||
           cfg_.kind == PolicyKind::PerfBoundCorrect;
  }

  void record_hops(int hops);
  // Idle gap observed at packet arrival; port_was_up selects hit vs miss.
  // tpdt_in_force is the threshold under which the port powered down (the
  // miss-ratio denominator).
  void observe_idle(SimTime gap, bool port_was_up, SimTime tpdt_in_force);
  void note_activity() { active_since_tick_ = true; }

  // Periodic recalculation (every X); retains t_PDT when the port saw no
  // activity since the previous tick.
  void recalc(SimTime t_w);

  const InactivityHistogram& histogram() const { return hist_; }
  const HopDistanceTable& hops() const { return hops_; }
  const CorrectionState* correction() const {
    return cfg_.kind == PolicyKind::PerfBoundCorrect ? &corr_ : nullptr;
  }

private:
  PolicyConfig cfg_;
  InactivityHistogram hist_;
  HopDistanceTable hops_;
  CorrectionState corr_;
  SimTime tpdt_;
  bool active_since_tick_ = false;
};

} // namespace vsim

#endif
