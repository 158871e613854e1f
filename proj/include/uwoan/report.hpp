#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uwoan/acoustic_frame.hpp"
#include "uwoan/geometry.hpp"

namespace uwoan {

/// Network id of the BS in topology output.
inline constexpr NetworkId kBsTopologyId = 0;
/// Nodes the BS never allocated are listed in topologies as 1024 + index.
inline constexpr std::uint32_t kUnassignedIdBase = 1024;

struct NodeResult
{
  std::size_t index{0};
  std::optional<NetworkId> network_id;
  Position initial{};
  Position final_position{};
  std::string outcome; // accessed | failed | dormant | unresolved
  bool via_relay{false};
  std::optional<NetworkId> relay_id;
  std::optional<double> access_time;
  double decomposition_time{0.0};
  std::string lifecycle;
  std::string bs_stage;

  std::uint32_t topology_id() const
  {
    return network_id ? *network_id : kUnassignedIdBase + static_cast<std::uint32_t>(index);
  }
};

struct TopologyEdge
{
  std::uint32_t from{0};
  std::uint32_t to{0};
  int hop{1}; // 1: direct uplink to the BS; 2: first leg of a relayed uplink

  bool operator==(const TopologyEdge&) const = default;
};

struct SimReport
{
  std::uint64_t seed{0};
  double c0{0.0};
  std::string config_fingerprint;
  Position bs{};
  std::size_t n_uwn{0};

  double access_rate{1.0};
  double dual_hop_rate{0.0};
  double avg_sound_delay{0.0};  // mean one-way acoustic delivery delay, s
  double max_decomp_delay{0.0}; // longest total time a node spent decomposing, s

  std::size_t n_accessed{0};
  std::size_t n_dual_hop{0};
  std::size_t n_failed{0};
  std::size_t n_unresolved{0};
  std::size_t n_dormant{0};
  std::size_t n_misidentified{0};
  std::size_t acoustic_deliveries{0};
  std::size_t unknown_beams{0};

  std::vector<NodeResult> nodes;
  std::vector<TopologyEdge> edges;
};

} // namespace uwoan
