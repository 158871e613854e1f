#include "uwoan/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>

#include <json.hpp>

namespace uwoan {

using ojson = nlohmann::ordered_json;

namespace {

std::string num(double v)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<const SimReport*> sorted_view(std::span<const SimReport> reports)
{
  std::vector<const SimReport*> v;
  v.reserve(reports.size());
  for (const auto& r : reports)
    v.push_back(&r);
  std::stable_sort(v.begin(), v.end(), [](const SimReport* a, const SimReport* b) {
    return a->c0 != b->c0 ? a->c0 < b->c0 : a->seed < b->seed;
  });
  return v;
}

MetricSummary summarize(const std::vector<double>& xs)
{
  MetricSummary s;
  if (xs.empty())
    return s;
  double sum = 0.0;
  for (double x : xs)
    sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs)
    sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

ojson position_json(const Position& p) { return ojson{{"east", p.east}, {"north", p.north}, {"depth", p.depth}}; }

Position position_from(const ojson& j)
{
  return {j.at("east").get<double>(), j.at("north").get<double>(), j.at("depth").get<double>()};
}

template <typename T>
ojson optional_json(const std::optional<T>& v)
{
  return v ? ojson(*v) : ojson(nullptr);
}

template <typename T>
std::optional<T> optional_from(const ojson& j)
{
  if (j.is_null())
    return std::nullopt;
  return j.get<T>();
}

} // namespace

std::vector<GroupSummary> aggregate(std::span<const SimReport> reports)
{
  if (reports.empty())
    throw ScenarioError("aggregate needs at least one report");
  const auto sorted = sorted_view(reports);

  std::vector<GroupSummary> out;
  std::size_t begin = 0;
  while (begin < sorted.size()) {
    std::size_t end = begin;
    const double c0 = sorted[begin]->c0;
    while (end < sorted.size() && sorted[end]->c0 == c0) {
      if (sorted[end]->config_fingerprint != sorted[begin]->config_fingerprint)
        throw ScenarioError("reports with c0 = " + num(c0) + " come from different configurations");
      ++end;
    }
    auto column = [&](const std::function<double(const SimReport&)>& f) {
      std::vector<double> xs;
      for (std::size_t k = begin; k < end; ++k)
        xs.push_back(f(*sorted[k]));
      return summarize(xs);
    };
    GroupSummary g;
    g.c0 = c0;
    g.runs = end - begin;
    g.access_rate = column([](const SimReport& r) { return r.access_rate; });
    g.dual_hop_rate = column([](const SimReport& r) { return r.dual_hop_rate; });
    g.avg_sound_delay = column([](const SimReport& r) { return r.avg_sound_delay; });
    g.max_decomp_delay = column([](const SimReport& r) { return r.max_decomp_delay; });
    g.n_failed = column([](const SimReport& r) { return static_cast<double>(r.n_failed); });
    g.n_unresolved = column([](const SimReport& r) { return static_cast<double>(r.n_unresolved); });
    out.push_back(g);
    begin = end;
  }
  return out;
}

std::string sweep_csv(std::span<const SimReport> reports)
{
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const SimReport* r : sorted_view(reports)) {
    out += num(r->c0) + ',' + std::to_string(r->seed) + ',' + num(r->access_rate) + ',' + num(r->dual_hop_rate) +
           ',' + num(r->avg_sound_delay) + ',' + num(r->max_decomp_delay) + ',' + std::to_string(r->n_failed) +
           ',' + std::to_string(r->n_unresolved) + '\n';
  }
  if (!reports.empty()) {
    for (const auto& g : aggregate(reports)) {
      out += num(g.c0) + ",mean," + num(g.access_rate.mean) + ',' + num(g.dual_hop_rate.mean) + ',' +
             num(g.avg_sound_delay.mean) + ',' + num(g.max_decomp_delay.mean) + ',' + num(g.n_failed.mean) + ',' +
             num(g.n_unresolved.mean) + '\n';
    }
  }
  return out;
}

std::string report_to_json(const SimReport& r)
{
  ojson j;
  j["seed"] = r.seed;
  j["c0"] = r.c0;
  j["n_uwn"] = r.n_uwn;
  j["bs"] = position_json(r.bs);
  j["access_rate"] = r.access_rate;
  j["dual_hop_rate"] = r.dual_hop_rate;
  j["avg_sound_delay_s"] = r.avg_sound_delay;
  j["max_decomp_delay_s"] = r.max_decomp_delay;
  j["n_accessed"] = r.n_accessed;
  j["n_dual_hop"] = r.n_dual_hop;
  j["n_failed"] = r.n_failed;
  j["n_unresolved"] = r.n_unresolved;
  j["n_dormant"] = r.n_dormant;
  j["n_misidentified"] = r.n_misidentified;
  j["acoustic_deliveries"] = r.acoustic_deliveries;
  j["unknown_beams"] = r.unknown_beams;

  ojson nodes = ojson::array();
  for (const auto& n : r.nodes) {
    ojson o;
    o["index"] = n.index;
    o["network_id"] = optional_json(n.network_id);
    o["initial"] = position_json(n.initial);
    o["final"] = position_json(n.final_position);
    o["outcome"] = n.outcome;
    o["via_relay"] = n.via_relay;
    o["relay_id"] = optional_json(n.relay_id);
    o["access_time"] = optional_json(n.access_time);
    o["decomposition_time"] = n.decomposition_time;
    o["lifecycle"] = n.lifecycle;
    o["bs_stage"] = n.bs_stage;
    nodes.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);

  ojson edges = ojson::array();
  for (const auto& e : r.edges)
    edges.push_back(ojson{{"from", e.from}, {"to", e.to}, {"hop", e.hop}});
  j["edges"] = std::move(edges);
  j["config_fingerprint"] = r.config_fingerprint;
  return j.dump(2) + "\n";
}

SimReport report_from_json(std::string_view text)
{
  try {
    const ojson j = ojson::parse(text);
    SimReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.c0 = j.at("c0").get<double>();
    r.n_uwn = j.at("n_uwn").get<std::size_t>();
    r.bs = position_from(j.at("bs"));
    r.access_rate = j.at("access_rate").get<double>();
    r.dual_hop_rate = j.at("dual_hop_rate").get<double>();
    r.avg_sound_delay = j.at("avg_sound_delay_s").get<double>();
    r.max_decomp_delay = j.at("max_decomp_delay_s").get<double>();
    r.n_accessed = j.at("n_accessed").get<std::size_t>();
    r.n_dual_hop = j.at("n_dual_hop").get<std::size_t>();
    r.n_failed = j.at("n_failed").get<std::size_t>();
    r.n_unresolved = j.at("n_unresolved").get<std::size_t>();
    r.n_dormant = j.at("n_dormant").get<std::size_t>();
    r.n_misidentified = j.at("n_misidentified").get<std::size_t>();
    r.acoustic_deliveries = j.at("acoustic_deliveries").get<std::size_t>();
    r.unknown_beams = j.at("unknown_beams").get<std::size_t>();
    for (const auto& o : j.at("nodes")) {
      NodeResult n;
      n.index = o.at("index").get<std::size_t>();
      n.network_id = optional_from<NetworkId>(o.at("network_id"));
      n.initial = position_from(o.at("initial"));
      n.final_position = position_from(o.at("final"));
      n.outcome = o.at("outcome").get<std::string>();
      n.via_relay = o.at("via_relay").get<bool>();
      n.relay_id = optional_from<NetworkId>(o.at("relay_id"));
      n.access_time = optional_from<double>(o.at("access_time"));
      n.decomposition_time = o.at("decomposition_time").get<double>();
      n.lifecycle = o.at("lifecycle").get<std::string>();
      n.bs_stage = o.at("bs_stage").get<std::string>();
      r.nodes.push_back(std::move(n));
    }
    for (const auto& e : j.at("edges"))
      r.edges.push_back({e.at("from").get<std::uint32_t>(), e.at("to").get<std::uint32_t>(), e.at("hop").get<int>()});
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("malformed report JSON: ") + e.what());
  }
}

TopologyFormat parse_topology_format(std::string_view name)
{
  if (name == "json")
    return TopologyFormat::Json;
  if (name == "dot")
    return TopologyFormat::Dot;
  throw ScenarioError("unknown topology format '" + std::string(name) + "' (expected json or dot)");
}

std::string export_topology(const SimReport& r, TopologyFormat format)
{
  if (format == TopologyFormat::Json) {
    ojson j;
    ojson nodes = ojson::array();
    nodes.push_back(ojson{{"id", kBsTopologyId}, {"x", r.bs.east}, {"y", r.bs.north}, {"depth", r.bs.depth},
                          {"outcome", "bs"}});
    for (const auto& n : r.nodes)
      nodes.push_back(ojson{{"id", n.topology_id()}, {"x", n.final_position.east}, {"y", n.final_position.north},
                            {"depth", n.final_position.depth}, {"outcome", n.outcome}});
    ojson edges = ojson::array();
    for (const auto& e : r.edges)
      edges.push_back(ojson{{"from", e.from}, {"to", e.to}, {"hop", e.hop}});
    j["nodes"] = std::move(nodes);
    j["edges"] = std::move(edges);
    return j.dump(2) + "\n";
  }

  std::string out = "digraph uwoan {\n";
  out += "  bs [label=\"BS\", shape=doublecircle, pos=\"" + num(r.bs.east) + "," + num(r.bs.north) + "\"];\n";
  for (const auto& n : r.nodes) {
    out += "  n" + std::to_string(n.topology_id()) + " [label=\"" + std::to_string(n.topology_id()) +
           "\", outcome=\"" + n.outcome + "\", depth=\"" + num(n.final_position.depth) + "\", pos=\"" +
           num(n.final_position.east) + "," + num(n.final_position.north) + "\"];\n";
  }
  for (const auto& e : r.edges) {
    const std::string to = e.to == kBsTopologyId ? std::string("bs") : "n" + std::to_string(e.to);
    out += "  n" + std::to_string(e.from) + " -> " + to + " [hop=" + std::to_string(e.hop) +
           (e.hop == 2 ? ", style=dashed" : "") + "];\n";
  }
  out += "}\n";
  return out;
}

Topology parse_topology_json(std::string_view text)
{
  try {
    const ojson j = ojson::parse(text);
    Topology t;
    for (const auto& o : j.at("nodes"))
      t.nodes.push_back({o.at("id").get<std::uint32_t>(), o.at("x").get<double>(), o.at("y").get<double>(),
                         o.at("depth").get<double>(), o.at("outcome").get<std::string>()});
    for (const auto& e : j.at("edges"))
      t.edges.push_back({e.at("from").get<std::uint32_t>(), e.at("to").get<std::uint32_t>(), e.at("hop").get<int>()});
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("malformed topology JSON: ") + e.what());
  }
}

} // namespace uwoan
