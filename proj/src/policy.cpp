#include "vsim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsim {

InactivityHistogram::InactivityHistogram(HistogramConfig cfg) : cfg_(cfg) {
  if (cfg_.bin_width <= 0)
    throw std::logic_error("InactivityHistogram: bin_width must be > 0");
  if (cfg_.max_bin < cfg_.bin_width)
    throw std::logic_error("InactivityHistogram: max_bin < bin_width");
  if (cfg_.retention != HistRetention::Unbounded && cfg_.capacity <= 0)
    throw std::logic_error("InactivityHistogram: capacity must be > 0");
}

void InactivityHistogram::record(SimTime duration) {
  if (duration < 0)
    throw std::logic_error("InactivityHistogram: negative duration");
  int bin = static_cast<int>(
      std::min<SimTime>(duration / cfg_.bin_width, cfg_.bin_count() - 1));
  ++counts_[bin];
  ++total_;
  switch (cfg_.retention) {
  case HistRetention::Unbounded:
    break;
  case HistRetention::SelfClearing:
    // wipe AFTER the Nth insertion, leaving the histogram empty
    if (++since_clear_ >= static_cast<std::uint64_t>(cfg_.capacity)) {
      counts_.clear();
      total_ = 0;
      since_clear_ = 0;
    }
    break;
  case HistRetention::Circular:
    window_.push_back(bin);
    if (window_.size() > static_cast<std::size_t>(cfg_.capacity)) {
      int oldest = window_.front();
      window_.pop_front();
      auto it = counts_.find(oldest);
      if (--it->second == 0) counts_.erase(it);
      --total_;
    }
    break;
  }
}

std::uint64_t InactivityHistogram::count(int bin) const {
  auto it = counts_.find(bin);
  return it == counts_.end() ? 0 : it->second;
}

int InactivityHistogram::highest_bin() const {
  return counts_.empty() ? -1 : counts_.rbegin()->first;
}

SimTime perfbound_tpdt(const InactivityHistogram& hist, double budget,
                       SimTime max_tpdt, SimTime initial_tpdt) {
  if (budget < 0) throw std::logic_error("perfbound_tpdt: negative budget");
  if (hist.total() == 0) return initial_tpdt;
  SimTime best = max_tpdt;
  // bins above the highest occupied one have zero cumulative count and
  // always qualify; the lowest of them is the cheapest such candidate
  int highest = hist.highest_bin();
  if (highest + 1 < hist.config().bin_count())
    best = std::min(best, hist.bin_center(highest + 1));
  std::uint64_t acc = 0;
  for (int bin = highest; bin >= 0; --bin) {
    acc += hist.count(bin);
    if (static_cast<double>(acc) <= budget)
      best = std::min(best, hist.bin_center(bin));
    else
      break;
  }
  return best;
}

double delay_budget(double local_bound, SimTime interval, SimTime t_w) {
  if (t_w <= 0) throw std::logic_error("delay_budget: t_w must be > 0");
  return local_bound * static_cast<double>(interval) /
         static_cast<double>(t_w);
}

CorrectionState::CorrectionState(int register_length)
    : length_(register_length) {
  if (length_ <= 0)
    throw std::logic_error("CorrectionState: register length must be > 0");
}

void CorrectionState::shift(bool miss) {
  bits_.push_back(miss);
  if (miss) ++miss_count_;
  if (bits_.size() > static_cast<std::size_t>(length_)) {
    bool evicted = bits_.front();
    bits_.pop_front();
    if (evicted) {
      --miss_count_;
      ratios_.pop_front();
    }
  }
}

void CorrectionState::record_hit() { shift(false); }

void CorrectionState::record_miss(double ratio) {
  if (ratio < 1.0)
    throw std::logic_error("CorrectionState: miss ratio < 1");
  ratios_.push_back(ratio);
  shift(true);
}

double CorrectionState::correction_factor() const {
  if (miss_count_ == 0) return 0.0;
  double log_sum = 0.0;
  for (double r : ratios_) log_sum += std::log(r);
  double geomean = std::exp(log_sum / static_cast<double>(ratios_.size()));
  return miss_fraction() * geomean;
}

SimTime corrected_tpdt(SimTime base, double cf, SimTime max_tpdt) {
  if (base < 0 || cf < 0)
    throw std::logic_error("corrected_tpdt: negative input");
  if (base == kTimeInfinity) return std::min(base, max_tpdt);
  double v = static_cast<double>(base) * (1.0 + cf);
  if (v >= static_cast<double>(max_tpdt)) return max_tpdt;
  return static_cast<SimTime>(v);
}

const char* policy_kind_name(PolicyKind k) {
  switch (k) {
  case PolicyKind::AlwaysOn: return "always_on";
  case PolicyKind::FixedPdt: return "fixed_pdt";
  case PolicyKind::PerfBound: return "perfbound";
  case PolicyKind::PerfBoundCorrect: return "perfbound_correct";
  }
  return "?";
}

PortPolicy::PortPolicy(const PolicyConfig& cfg, int max_hops)
    : cfg_(cfg), hist_(cfg.histogram), hops_(max_hops),
      corr_(cfg.register_length) {
  switch (cfg_.kind) {
  case PolicyKind::AlwaysOn: tpdt_ = kTimeInfinity; break;
  case PolicyKind::FixedPdt: tpdt_ = cfg_.fixed_tpdt; break;
  default: tpdt_ = cfg_.initial_tpdt; break;
  }
}

void PortPolicy::record_hops(int hops) {
  if (!adaptive()) return;
  hops_.record(hops);
  active_since_tick_ = true;
}

void PortPolicy::observe_idle(SimTime gap, bool port_was_up,
                              SimTime tpdt_in_force) {
  if (!adaptive()) return;
  hist_.record(gap);
  active_since_tick_ = true;
  if (cfg_.kind != PolicyKind::PerfBoundCorrect) return;
  if (port_was_up) {
    corr_.record_hit();
  } else {
    // t_PDT may be 0 at startup; clamp the denominator to keep the ratio
    // finite (the cap on the corrected value bounds the effect)
    SimTime denom = std::max<SimTime>(tpdt_in_force, 1);
    corr_.record_miss(std::max(1.0, static_cast<double>(gap) /
                                        static_cast<double>(denom)));
  }
}

void PortPolicy::recalc(SimTime t_w) {
  if (!adaptive()) return;
  if (!active_since_tick_) return; // idle interval: retain t_PDT, skip work
  active_since_tick_ = false;
  double l = hops_.local_bound(cfg_.bound.bound);
  double budget = delay_budget(l, cfg_.bound.recalc_interval, t_w);
  SimTime base = perfbound_tpdt(hist_, budget, cfg_.max_tpdt,
                                cfg_.initial_tpdt);
  double cf = cfg_.kind == PolicyKind::PerfBoundCorrect
                  ? corr_.correction_factor()
                  : 0.0;
  tpdt_ = corrected_tpdt(base, cf, cfg_.max_tpdt);
}

} // namespace vsim
