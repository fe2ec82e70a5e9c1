#include "vsim/traffic.hpp"

#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace vsim {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw TraceError("trace line " + std::to_string(line) + ": " + what);
}

} // namespace

TraceProgram parse_trace(std::istream& in) {
  std::string line;
  int lineno = 0;
  TraceProgram prog;
  bool have_header = false;
  // sends minus recvs per ordered (src,dst) channel
  std::map<std::pair<int, int>, std::int64_t> channel;
  std::map<std::pair<int, int>, int> first_deficit;

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    if (!have_header) {
      std::string magic, version;
      if (!(ls >> magic)) continue; // blank/comment before header
      int n;
      if (!(ls >> version >> n) || magic != "vsim-trace" || version != "v1")
        fail(lineno, "missing header (expected 'vsim-trace v1 <nranks>')");
      if (n < 1) fail(lineno, "rank count must be >= 1");
      prog.ranks = n;
      prog.steps.resize(n);
      have_header = true;
      continue;
    }
    int rank;
    if (!(ls >> rank)) continue; // blank line
    if (rank < 0 || rank >= prog.ranks) fail(lineno, "rank out of range");
    char op;
    if (!(ls >> op)) fail(lineno, "missing opcode");
    switch (op) {
    case 'c': {
      std::int64_t dur;
      if (!(ls >> dur) || dur < 0) fail(lineno, "bad compute duration");
      prog.steps[rank].push_back(ComputeStep{ns(dur)});
      break;
    }
    case 's': {
      int dst;
      std::int64_t bytes;
      if (!(ls >> dst >> bytes)) fail(lineno, "bad send");
      if (dst < 0 || dst >= prog.ranks) fail(lineno, "dst rank out of range");
      if (bytes < 1) fail(lineno, "message must be at least 1 byte");
      prog.steps[rank].push_back(SendStep{dst, bytes});
      ++channel[{rank, dst}];
      break;
    }
    case 'r': {
      int src;
      if (!(ls >> src)) fail(lineno, "bad recv");
      if (src < 0 || src >= prog.ranks) fail(lineno, "src rank out of range");
      prog.steps[rank].push_back(RecvStep{src});
      // file order is not temporal order across ranks: balance is settled
      // after the whole file, but remember where a deficit first appeared
      if (--channel[{src, rank}] < 0 && !first_deficit.count({src, rank}))
        first_deficit[{src, rank}] = lineno;
      break;
    }
    default:
      fail(lineno, std::string("unknown opcode '") + op + "'");
    }
  }
  if (!have_header) fail(lineno, "missing header");
  for (const auto& [chan, balance] : channel)
    if (balance < 0)
      fail(first_deficit.at(chan),
           "unmatched receive (no send on channel " +
               std::to_string(chan.first) + "->" +
               std::to_string(chan.second) + ")");
  return prog;
}

TraceProgram parse_trace_text(const std::string& text) {
  std::istringstream is(text);
  return parse_trace(is);
}

TraceProgram load_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw TraceError("cannot open trace file: " + path);
  return parse_trace(f);
}

std::string format_trace(const TraceProgram& p) {
  std::ostringstream os;
  os << "vsim-trace v1 " << p.ranks << "\n";
  for (int r = 0; r < p.ranks; ++r) {
    for (const auto& s : p.steps[r]) {
      if (auto* c = std::get_if<ComputeStep>(&s))
        os << r << " c " << c->duration / 1000 << "\n";
      else if (auto* sd = std::get_if<SendStep>(&s))
        os << r << " s " << sd->dst << " " << sd->bytes << "\n";
      else if (auto* rv = std::get_if<RecvStep>(&s))
        os << r << " r " << rv->src << "\n";
    }
  }
  return os.str();
}

TraceProgram generate(const SyntheticPattern& pat) {
  if (pat.ranks < 2) throw TraceError("pattern needs at least 2 ranks");
  TraceProgram prog;
  prog.ranks = pat.ranks;
  prog.steps.resize(pat.ranks);

  switch (pat.kind) {
  case PatternKind::OnOffBurst: {
    // even ranks burst toward their odd neighbor, separated by compute gaps
    for (int r = 0; r + 1 < pat.ranks; r += 2) {
      for (int it = 0; it < pat.iterations; ++it) {
        prog.steps[r].push_back(ComputeStep{pat.gap});
        for (int m = 0; m < pat.burst_messages; ++m) {
          prog.steps[r].push_back(SendStep{r + 1, pat.message_bytes});
          prog.steps[r + 1].push_back(RecvStep{r});
        }
      }
    }
    break;
  }
  case PatternKind::AllreduceLike: {
    int rounds = 0;
    while ((1 << rounds) < pat.ranks) ++rounds;
    if ((1 << rounds) != pat.ranks)
      throw TraceError("allreduce_like requires a power-of-two rank count");
    for (int it = 0; it < pat.iterations; ++it) {
      for (int r = 0; r < pat.ranks; ++r)
        if (pat.gap > 0) prog.steps[r].push_back(ComputeStep{pat.gap});
      for (int k = 0; k < rounds; ++k) {
        for (int r = 0; r < pat.ranks; ++r) {
          int partner = r ^ (1 << k);
          prog.steps[r].push_back(SendStep{partner, pat.message_bytes});
          prog.steps[r].push_back(RecvStep{partner});
        }
      }
    }
    break;
  }
  case PatternKind::UniformRandom: {
    std::mt19937_64 rng(pat.seed);
    // sends (with think time) first, receives appended last per rank, so no
    // rank ever blocks another's send
    std::vector<std::vector<TraceStep>> recvs(pat.ranks);
    for (int m = 0; m < pat.random_messages; ++m) {
      int src = static_cast<int>(rng() % pat.ranks);
      int dst = static_cast<int>(rng() % (pat.ranks - 1));
      if (dst >= src) ++dst;
      SimTime think = ns(static_cast<std::int64_t>(rng() % 1000));
      prog.steps[src].push_back(ComputeStep{think});
      prog.steps[src].push_back(SendStep{dst, pat.message_bytes});
      recvs[dst].push_back(RecvStep{src});
    }
    for (int r = 0; r < pat.ranks; ++r)
      prog.steps[r].insert(prog.steps[r].end(), recvs[r].begin(),
                           recvs[r].end());
    break;
  }
  }
  return prog;
}

} // namespace vsim
