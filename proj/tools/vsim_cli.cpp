// Command-line front end: single runs, parameter sweeps, topology dumps,
// trace validation and synthetic-trace generation. Configuration is a JSON
// document plus --set overrides; every report echoes the effective config so
// any run can be reproduced exactly.
#include "vsim/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using nlohmann::json;
using namespace vsim;
namespace fs = std::filesystem;

namespace {

// ------------------------------------------------------------- utilities --

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw CliError("cannot write " + p.string());
  f << content;
}

std::string output_root() {
  if (const char* env = std::getenv("VSIM_OUTPUT_ROOT")) return env;
  return "vsim-out";
}

// ------------------------------------------------- config (de)serializing --

json default_config() {
  return json{
      {"topology",
       {{"groups", 65},
        {"nodes_per_group", 64},
        {"switches_per_group", 16},
        {"radix", 16},
        {"micro_nodes", 0}}},
      {"fabric",
       {{"bandwidth_gbps", 400},
        {"input_capacity_bytes", 65536},
        {"output_capacity_bytes", 65536},
        {"injection_capacity_bytes", 65536},
        {"switch_delay_ns", 100},
        {"wire_local_ns", 10},
        {"wire_global_ns", 50},
        {"mtu_bytes", 4096},
        {"control_message_bytes", 64}}},
      {"power",
       {{"switch_watts", 250.0},
        {"node_min_watts", 800.0},
        {"node_max_watts", 1200.0}}},
      {"sleep_profile", "fast_wake"},
      {"policy",
       {{"kind", "always_on"},
        {"fixed_tpdt_ns", 0},
        {"bound", 0.01},
        {"recalc_interval_ns", 10'000'000},
        {"histogram",
         {{"bin_width_ns", 1000},
          {"max_bin_ns", 1'000'000'000},
          {"retention", "unbounded"},
          {"capacity", 250}}},
        {"register_length", 32},
        {"max_tpdt_ns", 1'000'000},
        {"initial_tpdt_ns", 0}}},
      {"trace",
       {{"file", ""},
        {"pattern",
         {{"kind", "on_off_burst"},
          {"ranks", 4},
          {"iterations", 4},
          {"message_bytes", 4096},
          {"burst_messages", 4},
          {"gap_ns", 50'000},
          {"seed", 1},
          {"random_messages", 64}}}}},
      {"rank_to_node", json::array()},
      {"report_ports", json::array()},
      {"efficiency_interval_ns", 100'000},
      {"max_events", 10'000'000'000ULL},
      {"output_dir", ""},
  };
}

// merge user values over defaults so partial configs stay valid
json load_config(const std::string& path) {
  json cfg = default_config();
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw CliError("cannot open config file: " + path);
    json user;
    try {
      f >> user;
    } catch (const json::exception& e) {
      throw CliError("config parse error in " + path + ": " + e.what());
    }
    cfg.merge_patch(user);
  }
  return cfg;
}

void apply_overrides(json& cfg, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw CliError("--set expects key.path=value, got: " + s);
    std::string key = s.substr(0, eq);
    std::string val = s.substr(eq + 1);
    std::string ptr = "/" + key;
    for (auto& c : ptr)
      if (c == '.') c = '/';
    json parsed;
    try {
      parsed = json::parse(val);
    } catch (const json::exception&) {
      parsed = val; // plain string
    }
    cfg[json::json_pointer(ptr)] = parsed;
  }
}

SleepProfile parse_sleep(const std::string& s) {
  if (s == "fast_wake") return SleepProfile::FastWake;
  if (s == "deep_sleep") return SleepProfile::DeepSleep;
  throw CliError("sleep_profile must be fast_wake or deep_sleep, got: " + s);
}

PolicyKind parse_policy(const std::string& s) {
  if (s == "always_on") return PolicyKind::AlwaysOn;
  if (s == "fixed_pdt") return PolicyKind::FixedPdt;
  if (s == "perfbound") return PolicyKind::PerfBound;
  if (s == "perfbound_correct") return PolicyKind::PerfBoundCorrect;
  throw CliError("unknown policy kind: " + s);
}

HistRetention parse_retention(const std::string& s) {
  if (s == "unbounded") return HistRetention::Unbounded;
  if (s == "self_clearing") return HistRetention::SelfClearing;
  if (s == "circular") return HistRetention::Circular;
  throw CliError("unknown histogram retention: " + s);
}

PatternKind parse_pattern(const std::string& s) {
  if (s == "on_off_burst") return PatternKind::OnOffBurst;
  if (s == "allreduce_like") return PatternKind::AllreduceLike;
  if (s == "uniform_random") return PatternKind::UniformRandom;
  throw CliError("unknown traffic pattern: " + s);
}

SimTime get_ns(const json& j) { return ns(j.get<std::int64_t>()); }

SimTime tpdt_from_ns(const json& j) {
  if (j.is_string() && (j == "inf" || j == "infinity")) return kTimeInfinity;
  std::int64_t v = j.get<std::int64_t>();
  return v < 0 ? kTimeInfinity : ns(v);
}

SimConfig to_sim_config(const json& cfg) {
  SimConfig sc;
  const json& t = cfg.at("topology");
  if (t.at("micro_nodes").get<int>() > 0) {
    sc.topology = TopologyConfig::micro(t.at("micro_nodes").get<int>());
  } else {
    sc.topology.groups = t.at("groups").get<int>();
    sc.topology.nodes_per_group = t.at("nodes_per_group").get<int>();
    sc.topology.switches_per_group = t.at("switches_per_group").get<int>();
    sc.topology.radix = t.at("radix").get<int>();
  }
  const json& f = cfg.at("fabric");
  sc.fabric.bandwidth_gbps = f.at("bandwidth_gbps").get<int>();
  sc.fabric.input_capacity = f.at("input_capacity_bytes").get<std::int64_t>();
  sc.fabric.output_capacity =
      f.at("output_capacity_bytes").get<std::int64_t>();
  sc.fabric.injection_capacity =
      f.at("injection_capacity_bytes").get<std::int64_t>();
  sc.fabric.switch_delay = get_ns(f.at("switch_delay_ns"));
  sc.fabric.wire_local = get_ns(f.at("wire_local_ns"));
  sc.fabric.wire_global = get_ns(f.at("wire_global_ns"));
  sc.fabric.mtu = f.at("mtu_bytes").get<std::int64_t>();
  sc.fabric.control_message_bytes =
      f.at("control_message_bytes").get<std::int64_t>();
  const json& pw = cfg.at("power");
  sc.power.switch_chassis_watts = pw.at("switch_watts").get<double>();
  sc.power.node_min_watts = pw.at("node_min_watts").get<double>();
  sc.power.node_max_watts = pw.at("node_max_watts").get<double>();
  sc.sleep = parse_sleep(cfg.at("sleep_profile").get<std::string>());
  const json& p = cfg.at("policy");
  sc.policy.kind = parse_policy(p.at("kind").get<std::string>());
  sc.policy.fixed_tpdt = tpdt_from_ns(p.at("fixed_tpdt_ns"));
  sc.policy.bound.bound = p.at("bound").get<double>();
  sc.policy.bound.recalc_interval = get_ns(p.at("recalc_interval_ns"));
  const json& h = p.at("histogram");
  sc.policy.histogram.bin_width = get_ns(h.at("bin_width_ns"));
  sc.policy.histogram.max_bin = get_ns(h.at("max_bin_ns"));
  sc.policy.histogram.retention =
      parse_retention(h.at("retention").get<std::string>());
  sc.policy.histogram.capacity = h.at("capacity").get<int>();
  sc.policy.register_length = p.at("register_length").get<int>();
  sc.policy.max_tpdt = get_ns(p.at("max_tpdt_ns"));
  sc.policy.initial_tpdt = get_ns(p.at("initial_tpdt_ns"));
  sc.efficiency_interval = get_ns(cfg.at("efficiency_interval_ns"));
  sc.report_ports = cfg.at("report_ports").get<std::vector<int>>();
  sc.rank_to_node = cfg.at("rank_to_node").get<std::vector<int>>();
  sc.max_events = cfg.at("max_events").get<std::uint64_t>();
  return sc;
}

SyntheticPattern to_pattern(const json& jp) {
  SyntheticPattern pat;
  pat.kind = parse_pattern(jp.at("kind").get<std::string>());
  pat.ranks = jp.at("ranks").get<int>();
  pat.iterations = jp.at("iterations").get<int>();
  pat.message_bytes = jp.at("message_bytes").get<std::int64_t>();
  pat.burst_messages = jp.at("burst_messages").get<int>();
  pat.gap = get_ns(jp.at("gap_ns"));
  pat.seed = jp.at("seed").get<std::uint64_t>();
  pat.random_messages = jp.at("random_messages").get<int>();
  return pat;
}

TraceProgram resolve_trace(const json& cfg) {
  const json& t = cfg.at("trace");
  std::string file = t.at("file").get<std::string>();
  if (!file.empty()) return load_trace_file(file);
  return generate(to_pattern(t.at("pattern")));
}

// ------------------------------------------------------------ reporting --

json latency_json(const LatencyStats& s) {
  return json{{"count", s.count},   {"mean_ns", s.mean_ns},
              {"p50_ns", s.p50_ns}, {"p95_ns", s.p95_ns},
              {"p99_ns", s.p99_ns}, {"max_ns", s.max_ns}};
}

json energy_json(const EnergyReport& e) {
  return json{{"node_joules", e.node_joules},
              {"switch_joules", e.switch_joules},
              {"port_joules", e.port_joules},
              {"total_joules", e.total_joules},
              {"joules_per_bit", e.joules_per_bit},
              {"savings_pct", e.savings_fraction * 100.0}};
}

std::string efficiency_csv(const RunResult& r) {
  std::ostringstream os;
  os << "interval,start_ns,efficiency\n";
  for (std::size_t i = 0; i < r.efficiency.samples.size(); ++i)
    os << i << ',' << to_ns(static_cast<SimTime>(i) * r.efficiency.interval)
       << ',' << r.efficiency.samples[i] << '\n';
  return os.str();
}

std::string tpdt_csv(const RunResult& r) {
  std::ostringstream os;
  os << "port,time_ns,tpdt_ns\n";
  for (const auto& [port, series] : r.tpdt_trajectory)
    for (const auto& [at, tpdt] : series)
      os << port << ',' << to_ns(at) << ','
         << (tpdt == kTimeInfinity ? -1.0 : to_ns(tpdt)) << '\n';
  return os.str();
}

std::string inactivity_csv(const RunResult& r) {
  std::ostringstream os;
  os << "port,bin,low_ns,high_ns,count,cdf\n";
  for (const auto& [port, samples] : r.idle_samples) {
    if (samples.empty()) continue;
    InactivityReport rep = histogram_report(port, samples);
    for (std::size_t b = 0; b < rep.bins.size(); ++b)
      os << port << ',' << b << ','
         << to_ns(static_cast<SimTime>(b) * rep.bin_width) << ','
         << to_ns(static_cast<SimTime>(b + 1) * rep.bin_width) << ','
         << rep.bins[b] << ',' << rep.cdf[b] << '\n';
  }
  return os.str();
}

// --------------------------------------------------------------- baseline --

json baseline_config(const json& cfg) {
  json base = cfg;
  base["policy"] = default_config()["policy"];
  base["policy"]["kind"] = "always_on";
  return base;
}

// cache key: trace content + topology/fabric/power parameters (policy and
// sleep profile do not affect an always-on baseline)
std::string baseline_key(const json& cfg, const TraceProgram& trace) {
  json key{{"topology", cfg.at("topology")},
           {"fabric", cfg.at("fabric")},
           {"power", cfg.at("power")},
           {"rank_to_node", cfg.at("rank_to_node")},
           {"efficiency_interval_ns", cfg.at("efficiency_interval_ns")}};
  return hex64(fnv1a(key.dump() + "\n" + format_trace(trace)));
}

json run_baseline(const json& cfg, const TraceProgram& trace,
                  const fs::path& cache_dir) {
  std::string key = baseline_key(cfg, trace);
  fs::path cache = cache_dir / (key + ".json");
  if (fs::exists(cache)) {
    std::ifstream f(cache);
    json cached;
    f >> cached;
    return cached;
  }
  SimConfig sc = to_sim_config(baseline_config(cfg));
  RunResult r = Simulator(sc, trace).run();
  json out{{"key", key},
           {"makespan_ns", to_ns(r.makespan)},
           {"latency", latency_json(r.latency)},
           {"energy", energy_json(r.energy)}};
  write_file(cache, out.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------- run op --

json execute_run(const json& cfg, const fs::path& out_dir,
                 const fs::path& cache_dir) {
  TraceProgram trace = resolve_trace(cfg);
  json base = run_baseline(cfg, trace, cache_dir);

  SimConfig sc = to_sim_config(cfg);
  RunResult r = Simulator(sc, trace).run();

  EnergyReport base_energy;
  base_energy.total_joules = base.at("energy").at("total_joules");
  EnergyReport energy = finalize(r.ledger, sc.power, &base_energy);
  OverheadReport oh =
      overhead(r.makespan, r.latency.mean_ns,
               ns(static_cast<std::int64_t>(
                   base.at("makespan_ns").get<double>())),
               base.at("latency").at("mean_ns").get<double>());

  json summary{
      {"config", cfg},
      {"makespan_ns", to_ns(r.makespan)},
      {"latency", latency_json(r.latency)},
      {"energy", energy_json(energy)},
      {"overhead",
       {{"exec_time_pct", oh.exec_time_pct},
        {"mean_latency_pct", oh.mean_latency_pct}}},
      {"packets",
       {{"injected", r.packets_injected}, {"delivered", r.packets_delivered}}},
      {"link_transitions", r.link_transitions},
      {"baseline", base},
      {"policy_parameters",
       {{"kind", cfg.at("policy").at("kind")},
        {"tpdt_ns", cfg.at("policy").at("fixed_tpdt_ns")},
        {"bound", cfg.at("policy").at("bound")},
        {"histogram", cfg.at("policy").at("histogram")},
        {"register_length", cfg.at("policy").at("register_length")}}},
  };

  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  write_file(out_dir / "efficiency.csv", efficiency_csv(r));
  if (!r.tpdt_trajectory.empty())
    write_file(out_dir / "tpdt_trajectory.csv", tpdt_csv(r));
  if (!r.idle_samples.empty())
    write_file(out_dir / "inactivity_histogram.csv", inactivity_csv(r));
  return summary;
}

// -------------------------------------------------------------- sweep op --

struct SweepRun {
  int id;
  json overrides; // axis name -> value
  json cfg;
};

std::vector<SweepRun> expand_axes(const json& cfg, const json& axes) {
  if (!axes.is_object() || axes.empty())
    throw CliError("sweep requires a non-empty 'axes' object");
  std::vector<std::pair<std::string, json>> dims;
  for (const auto& [key, values] : axes.items()) {
    if (!values.is_array() || values.empty())
      throw CliError("sweep axis '" + key + "' must be a non-empty array");
    dims.emplace_back(key, values);
  }
  std::vector<SweepRun> runs;
  std::vector<std::size_t> idx(dims.size(), 0);
  while (true) {
    SweepRun run;
    run.id = static_cast<int>(runs.size());
    run.cfg = cfg;
    for (std::size_t d = 0; d < dims.size(); ++d) {
      const json& v = dims[d].second[idx[d]];
      run.overrides[dims[d].first] = v;
      std::string ptr = "/" + dims[d].first;
      for (auto& c : ptr)
        if (c == '.') c = '/';
      run.cfg[json::json_pointer(ptr)] = v;
    }
    runs.push_back(std::move(run));
    std::size_t d = 0;
    for (; d < dims.size(); ++d) {
      if (++idx[d] < dims[d].second.size()) break;
      idx[d] = 0;
    }
    if (d == dims.size()) break;
  }
  return runs;
}

int execute_sweep(const json& cfg, const json& axes, const fs::path& out_dir,
                  const fs::path& cache_dir, int jobs) {
  std::vector<SweepRun> runs = expand_axes(cfg, axes);
  fs::create_directories(out_dir);

  // warm the baseline cache up front so workers do not race to compute it
  run_baseline(cfg, resolve_trace(cfg), cache_dir);

  struct Row {
    json overrides;
    std::string status;
    double makespan_ns = 0, total_joules = 0, savings_pct = 0;
    std::string error;
  };
  std::vector<Row> rows(runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      const SweepRun& run = runs[i];
      fs::path rdir = out_dir / ("run-" + std::to_string(run.id));
      Row& row = rows[i];
      row.overrides = run.overrides;
      try {
        fs::path done_marker = rdir / "summary.json";
        json summary;
        if (fs::exists(done_marker)) { // idempotent resume
          std::ifstream f(done_marker);
          f >> summary;
          row.status = "cached";
        } else {
          summary = execute_run(run.cfg, rdir, cache_dir);
          row.status = "ok";
        }
        row.makespan_ns = summary.at("makespan_ns");
        row.total_joules = summary.at("energy").at("total_joules");
        row.savings_pct = summary.at("energy").at("savings_pct");
      } catch (const std::exception& e) {
        row.status = "error";
        row.error = e.what();
        std::lock_guard<std::mutex> lk(io_mutex);
        std::cerr << "run " << run.id << " failed: " << e.what() << "\n";
      }
    }
  };

  if (jobs < 1) jobs = 1;
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream index;
  index << "run,parameters,status,makespan_ns,total_joules,savings_pct,error\n";
  int failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (row.status == "error") ++failed;
    std::string params = row.overrides.dump();
    for (auto& c : params)
      if (c == ',') c = ';';
    index << i << ',' << params << ',' << row.status << ','
          << row.makespan_ns << ',' << row.total_joules << ','
          << row.savings_pct << ',' << row.error << '\n';
  }
  write_file(out_dir / "index.csv", index.str());
  std::cout << "sweep: " << runs.size() << " runs, " << failed
            << " failed; index at " << (out_dir / "index.csv").string()
            << "\n";
  return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace-driven interconnect power-management simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, trace_path, axes_path;
  std::vector<std::string> sets;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  int micro_nodes = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--set", sets,
                    "override a config value, e.g. --set policy.kind=fixed_pdt");
    sub->add_option("--out", out_dir, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "execute one experiment");
  add_common(run);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Cartesian sweep over config axes");
  add_common(sweep);
  sweep
      ->add_option("--axes", axes_path,
                   "JSON file: {\"axes\": {key: [values...]}}")
      ->required();
  sweep->add_option("--jobs", jobs, "parallel workers");

  CLI::App* topo = app.add_subcommand("topo-dump", "print the wired topology");
  add_common(topo);
  topo->add_option("--micro", micro_nodes,
                   "single-switch star with N nodes instead of the config");

  CLI::App* check = app.add_subcommand("trace-check", "validate a trace file");
  check->add_option("trace", trace_path, "trace file")->required();

  CLI::App* gen =
      app.add_subcommand("gen-traffic", "emit a synthetic trace to stdout");
  add_common(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    json cfg = load_config(config_path);
    apply_overrides(cfg, sets);
    fs::path root = output_root();
    fs::path cache_dir = root / "baseline-cache";
    fs::path out =
        !out_dir.empty()
            ? fs::path(out_dir)
            : (!cfg.at("output_dir").get<std::string>().empty()
                   ? fs::path(cfg.at("output_dir").get<std::string>())
                   : root / "run");

    if (run->parsed()) {
      json summary = execute_run(cfg, out, cache_dir);
      std::cout << "summary written to " << (out / "summary.json").string()
                << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      std::ifstream f(axes_path);
      if (!f) throw CliError("cannot open axes file: " + axes_path);
      json axes_doc;
      f >> axes_doc;
      return execute_sweep(cfg, axes_doc.at("axes"), out, cache_dir, jobs);
    }
    if (topo->parsed()) {
      if (micro_nodes > 0)
        cfg["topology"]["micro_nodes"] = micro_nodes;
      TopologyGraph g = build(to_sim_config(cfg).topology);
      std::cout << g.dump_json() << "\n";
      return 0;
    }
    if (check->parsed()) {
      TraceProgram t = load_trace_file(trace_path);
      std::size_t steps = 0;
      for (const auto& s : t.steps) steps += s.size();
      std::cout << json{{"ok", true}, {"ranks", t.ranks}, {"steps", steps}}
                       .dump()
                << "\n";
      return 0;
    }
    if (gen->parsed()) {
      TraceProgram t = generate(to_pattern(cfg.at("trace").at("pattern")));
      std::cout << format_trace(t);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cout << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
