#pragma once

// Brute-force reference answers shared by the unit tests and the acceptance
// binary. Written without reusing library logic beyond plain geometry.

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

#include "uwoan/bs_protocol.hpp"
#include "uwoan/channel.hpp"
#include "uwoan/rng.hpp"

namespace oracle {

using namespace uwoan;

/// Nearest accessed node that has a direct uplink and no relay duty.
inline std::optional<NetworkId> nearest_relay(const BsState& s, NetworkId target)
{
  const NodeRecord& t = s.registry.at(target);
  std::vector<std::tuple<double, NetworkId>> ranked;
  for (const auto& [id, r] : s.registry) {
    const bool eligible =
      id != target && r.stage == HandshakeStage::Accessed && !r.relay_of.has_value() && !r.via_relay;
    if (eligible)
      ranked.emplace_back(distance(r.sonar_position, t.sonar_position), id);
  }
  if (ranked.empty())
    return std::nullopt;
  std::sort(ranked.begin(), ranked.end());
  return std::get<1>(ranked.front());
}

/// Random registry of 1..10 records with mixed stages and some existing
/// relay pairs. Positions sit on a coarse grid so distance ties happen.
inline BsState random_registry(Rng& rng)
{
  BsState s;
  const int n = 1 + static_cast<int>(rng.next() % 10);
  const HandshakeStage stages[] = {HandshakeStage::Accessed,  HandshakeStage::Accessed,
                                   HandshakeStage::Accessed,  HandshakeStage::AwaitingBeam,
                                   HandshakeStage::Assigned,  HandshakeStage::Conflicted,
                                   HandshakeStage::Confirming, HandshakeStage::Failed};
  for (int i = 0; i < n; ++i) {
    NodeRecord r;
    r.network_id = s.next_id++;
    r.track = static_cast<std::size_t>(i);
    r.sonar_position = {static_cast<double>(rng.next() % 5) * 10.0, static_cast<double>(rng.next() % 5) * 10.0,
                        static_cast<double>(rng.next() % 5) * 10.0};
    r.stage = stages[rng.next() % std::size(stages)];
    if (r.stage == HandshakeStage::Accessed) {
      r.access_time = 1.0;
      r.hs1_time = 0.1;
      r.hs2_time = 0.2;
      r.hs3_time = 1.0;
    }
    s.by_track.emplace(r.track, r.network_id);
    s.registry.emplace(r.network_id, r);
  }
  // Bind a few relay pairs: an accessed relay for a pending or relayed node.
  for (auto& [id, r] : s.registry) {
    if (r.stage != HandshakeStage::Accessed || r.relay_of || r.via_relay || !rng.bernoulli(0.3))
      continue;
    for (auto& [oid, o] : s.registry) {
      if (oid == id || o.relayed_by || o.relay_of || o.stage == HandshakeStage::Failed)
        continue;
      o.relayed_by = id;
      r.relay_of = oid;
      if (o.stage == HandshakeStage::Accessed)
        o.via_relay = true;
      else
        o.stage = HandshakeStage::RelayPending;
      break;
    }
  }
  return s;
}

// Composite Simpson over the segment; never uses the closed form.
inline double quadrature_transmittance(const Position& a, const Position& b, const WaterProfile& w)
{
  const int n = 2000;
  const double len = distance(a, b);
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    const double z = a.depth + t * (b.depth - a.depth);
    const double weight = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += weight * w.attenuation_at(z);
  }
  return std::exp(-sum * len / (3.0 * n));
}

/// Last 0.1 m step with received power at or above sensitivity, out to 4 km.
inline double linear_scan_range(const OpticalLinkBudget& b, const WaterProfile& w, double depth)
{
  double last = 0.0;
  for (int k = 1; k < 40000; ++k) {
    const double L = 0.1 * k;
    if (optical_received_power({0, 0, depth}, {L, 0, depth}, b, w) >= b.rx_sensitivity)
      last = L;
  }
  return last;
}

struct Budget
{
  OpticalLinkBudget budget;
  WaterProfile water;
  double depth{0.0};
};

inline Budget random_budget(Rng& rng)
{
  Budget r;
  r.budget.tx_power = rng.uniform(0.01, 1.0);
  r.budget.divergence_half_angle = deg_to_rad(rng.uniform(0.5, 5.0));
  r.budget.rx_sensitivity = std::pow(10.0, rng.uniform(-13.0, -9.0));
  r.water = {rng.uniform(0.03, 0.2), rng.uniform(0.0, 0.0005), 1500.0};
  r.depth = rng.uniform(0, 200);
  return r;
}

} // namespace oracle
