#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uwoan/report.hpp"

namespace uwoan {

class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct MetricSummary
{
  double mean{0.0};
  double stddev{0.0}; // population standard deviation
};

struct GroupSummary
{
  double c0{0.0};
  std::size_t runs{0};
  MetricSummary access_rate;
  MetricSummary dual_hop_rate;
  MetricSummary avg_sound_delay;
  MetricSummary max_decomp_delay;
  MetricSummary n_failed;
  MetricSummary n_unresolved;
};

/// Mean and spread per metric, grouped by c0 (ascending). The fold runs over
/// reports sorted by (c0, seed), so input order never changes the result.
/// Throws ScenarioError for an empty input or a group mixing configurations.
std::vector<GroupSummary> aggregate(std::span<const SimReport> reports);

/// Sweep CSV: header, one row per run sorted by (c0, seed), then one
/// `seed = mean` row per c0 group.
std::string sweep_csv(std::span<const SimReport> reports);

inline constexpr const char* kSweepCsvHeader =
  "c0,seed,access_rate,dual_hop_rate,avg_sound_delay_s,max_decomp_delay_s,n_failed,n_unresolved";

std::string report_to_json(const SimReport& report);
SimReport report_from_json(std::string_view text);

enum class TopologyFormat { Json, Dot };

TopologyFormat parse_topology_format(std::string_view name);

std::string export_topology(const SimReport& report, TopologyFormat format);

struct TopologyNode
{
  std::uint32_t id{0};
  double x{0.0};
  double y{0.0};
  double depth{0.0};
  std::string outcome;

  bool operator==(const TopologyNode&) const = default;
};

struct Topology
{
  std::vector<TopologyNode> nodes;
  std::vector<TopologyEdge> edges;
};

Topology parse_topology_json(std::string_view text);

} // namespace uwoan
