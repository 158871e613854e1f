// uwoan: run, sweep, and inspect network-initialization simulations.
//
// Exit codes: 0 success, 1 usage error, 2 configuration error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uwoan/batch.hpp"
#include "uwoan/config.hpp"
#include "uwoan/scenario.hpp"
#include "uwoan/sim_engine.hpp"

namespace fs = std::filesystem;
using namespace uwoan;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

SimConfig config_from(const std::string& path)
{
  return path.empty() ? SimConfig{} : load_config(path);
}

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw UsageError("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<double> parse_c_list(const std::string& text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || end != item.data() + item.size())
      throw UsageError("bad --c-list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw UsageError("--c-list is empty");
  return out;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir)
{
  const SimConfig cfg = config_from(config_path);
  const std::uint64_t s = seed.value_or(cfg.seed);
  const TracedRun result = trace(cfg, s);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file(dir / "report.json", report_to_json(result.report));
  write_file(dir / "trace.log", trace_text(result.trace));
  write_file(dir / "topology.json", export_topology(result.report, TopologyFormat::Json));
  write_file(dir / "topology.dot", export_topology(result.report, TopologyFormat::Dot));

  const auto& r = result.report;
  std::printf("seed %llu c0 %g: access %.4f dual-hop %.4f avg sound delay %.4f s max decomposition %.3f s\n",
              static_cast<unsigned long long>(s), r.c0, r.access_rate, r.dual_hop_rate, r.avg_sound_delay,
              r.max_decomp_delay);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& c_list, std::size_t seeds, const std::string& out,
              int threads, bool serial)
{
  const SimConfig cfg = config_from(config_path);
  const auto c0s = parse_c_list(c_list);
  if (seeds == 0)
    throw UsageError("--seeds must be positive");
  const auto specs = sweep_specs(cfg, c0s, seeds);
  const auto reports = serial ? run_batch_serial(specs) : run_batch_parallel(specs, threads);
  write_file(out, sweep_csv(reports));

  std::printf("%-8s %6s %18s %18s %18s %18s\n", "c0", "runs", "access", "dual-hop", "sound delay s",
              "max decomp s");
  for (const auto& g : aggregate(reports)) {
    std::printf("%-8g %6zu %9.4f ±%7.4f %9.4f ±%7.4f %9.4f ±%7.4f %9.3f ±%7.3f\n", g.c0, g.runs, g.access_rate.mean,
                g.access_rate.stddev, g.dual_hop_rate.mean, g.dual_hop_rate.stddev, g.avg_sound_delay.mean,
                g.avg_sound_delay.stddev, g.max_decomp_delay.mean, g.max_decomp_delay.stddev);
  }
  return 0;
}

int cmd_topo(const std::string& report_path, const std::string& format)
{
  const TopologyFormat f = parse_topology_format(format);
  std::ifstream in(report_path);
  if (!in)
    throw UsageError("cannot open report '" + report_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::cout << export_topology(report_from_json(ss.str()), f);
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Hybrid optical-acoustic network initialization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Simulate one deployment; write report, trace, and topology");
  run_cmd->add_option("--config", config_path, "Config file (key = value); defaults when omitted");
  run_cmd->add_option("--seed", seed, "RNG seed (defaults to the config's seed)");
  run_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::string sweep_config;
  std::string c_list = "0.056,0.120,0.151";
  std::size_t seeds = 100;
  std::string csv_out;
  int threads = 0;
  bool serial = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep over attenuation coefficients");
  sweep_cmd->add_option("--config", sweep_config, "Config file (key = value); defaults when omitted");
  sweep_cmd->add_option("--c-list", c_list, "Comma-separated c0 values")->capture_default_str();
  sweep_cmd->add_option("--seeds", seeds, "Runs per c0 (seeds start at the config's seed)")->capture_default_str();
  sweep_cmd->add_option("--out", csv_out, "CSV output path")->required();
  sweep_cmd->add_option("--threads", threads, "Worker threads (0 = OpenMP default)");
  sweep_cmd->add_flag("--serial", serial, "Use the single-threaded reference path");

  std::string report_path;
  std::string format = "json";
  auto* topo_cmd = app.add_subcommand("topo", "Export the topology of a saved report");
  topo_cmd->add_option("--report", report_path, "report.json written by `run`")->required();
  topo_cmd->add_option("--format", format, "dot or json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd)
      return cmd_run(config_path, seed, out_dir);
    if (*sweep_cmd)
      return cmd_sweep(sweep_config, c_list, seeds, csv_out, threads, serial);
    if (*topo_cmd)
      return cmd_topo(report_path, format);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
