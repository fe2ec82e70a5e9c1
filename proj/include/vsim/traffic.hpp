#ifndef VSIM_TRAFFIC_HPP
#define VSIM_TRAFFIC_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vsim/time.hpp"

namespace vsim {

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-rank sequential program: compute for a duration, send a message, or
// block on the next message from a given source (FIFO per channel).
struct ComputeStep {
  SimTime duration;
};
struct SendStep {
  int dst;
  std::int64_t bytes;
};
struct RecvStep {
  int src;
};
using TraceStep = std::variant<ComputeStep, SendStep, RecvStep>;

struct TraceProgram {
  int ranks = 0;
  std::vector<std::vector<TraceStep>> steps; // per rank, program order
};

// Grammar (UTF-8, line oriented):
//   vsim-trace v1 <nranks>
//   <rank> c <ns>
//   <rank> s <dst> <bytes>
//   <rank> r <src>
//   # comment
// Throws TraceError with the offending line number. Verifies every Recv has
// a matching Send on its (src,dst) channel.
TraceProgram parse_trace(std::istream& in);
TraceProgram parse_trace_text(const std::string& text);
TraceProgram load_trace_file(const std::string& path);

std::string format_trace(const TraceProgram& p);

enum class PatternKind { OnOffBurst, AllreduceLike, UniformRandom };

struct SyntheticPattern {
  PatternKind kind = PatternKind::OnOffBurst;
  int ranks = 4;
  int iterations = 4;
  std::int64_t message_bytes = 4096;
  int burst_messages = 4;   // on_off_burst: messages per burst
  SimTime gap = us(50);     // on_off_burst: compute gap between bursts
  std::uint64_t seed = 1;   // uniform_random
  int random_messages = 64; // uniform_random: total messages
};

// Reproducible program for the given pattern. allreduce_like emits
// recursive-doubling rounds (log2 ranks, power-of-two rank count required).
TraceProgram generate(const SyntheticPattern& pattern);

} // namespace vsim

#endif
