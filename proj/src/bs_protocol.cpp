#include "uwoan/bs_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace uwoan {

const char* to_string(HandshakeStage s)
{
  switch (s) {
  case HandshakeStage::Assigned: return "ASSIGNED";
  case HandshakeStage::Conflicted: return "CONFLICTED";
  case HandshakeStage::AwaitingBeam: return "AWAITING_BEAM";
  case HandshakeStage::Confirming: return "CONFIRMING";
  case HandshakeStage::Accessed: return "ACCESSED";
  case HandshakeStage::RelayPending: return "RELAY_PENDING";
  case HandshakeStage::Failed: return "FAILED";
  }
  return "?";
}

NodeRecord* BsState::find(NetworkId id)
{
  auto it = registry.find(id);
  return it == registry.end() ? nullptr : &it->second;
}

const NodeRecord* BsState::find(NetworkId id) const
{
  auto it = registry.find(id);
  return it == registry.end() ? nullptr : &it->second;
}

std::vector<Detection> sonar_scan(const Position& bs, std::span<const Position> targets, const BsConfig& cfg,
                                  Rng& rng)
{
  std::vector<Detection> out;
  out.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (distance(bs, targets[i]) > cfg.sonar_radius)
      continue;
    if (cfg.p_misdetect > 0.0 && rng.bernoulli(cfg.p_misdetect))
      continue;
    Position seen = targets[i];
    if (cfg.sonar_depth_noise > 0.0)
      seen.depth = std::max(0.0, rng.normal(seen.depth, cfg.sonar_depth_noise));
    out.push_back({i, seen, quantize_depth(seen.depth, cfg.depth_model)});
  }
  return out;
}

namespace {

void refresh_conflicts(BsState& state, double now, const BsConfig& cfg, bool allow_reset)
{
  std::unordered_map<std::int64_t, int> population;
  for (const auto& [id, rec] : state.registry)
    if (rec.in_matching_pool())
      ++population[rec.depth_code.bucket];

  for (auto& [id, rec] : state.registry) {
    if (!rec.in_matching_pool())
      continue;
    const bool shared = population[rec.depth_code.bucket] > 1;
    if ((rec.stage == HandshakeStage::Assigned || rec.stage == HandshakeStage::AwaitingBeam) && shared) {
      // No beam yet, so the node can still be told to move.
      rec.stage = HandshakeStage::Conflicted;
      rec.conflict_round_start = now;
    } else if (rec.stage == HandshakeStage::Conflicted && !shared) {
      rec.stage = HandshakeStage::Assigned;
      rec.retries_remaining = cfg.retries_direct;
    } else if (rec.stage == HandshakeStage::Conflicted && allow_reset &&
               now - rec.conflict_round_start >= cfg.reset_round - 1e-9) {
      rec.reset_bit = !rec.reset_bit;
      rec.conflict_round_start = now;
    }
  }
}

Bearing safe_bearing(const Position& from, const Position& to)
{
  if (distance(from, to) == 0.0)
    return {};
  return bearing_from_to(from, to);
}

void release_relay(BsState& state, NodeRecord& rec)
{
  if (!rec.relayed_by)
    return;
  if (auto* relay = state.find(*rec.relayed_by))
    relay->relay_of.reset();
  rec.relayed_by.reset();
}

} // namespace

void allocate(BsState& state, std::span<const Detection> detections, double now, const BsConfig& cfg)
{
  std::size_t fresh = 0;
  for (const auto& d : detections)
    if (!state.by_track.count(d.track))
      ++fresh;
  if (fresh == 0)
    return;
  if (static_cast<std::size_t>(state.next_id) + fresh - 1 > kMaxNetworkId)
    throw AllocationError("network ID space exhausted: " + std::to_string(fresh) + " new detections, " +
                          std::to_string(kMaxNetworkId + 1 - state.next_id) + " IDs left");

  for (const auto& d : detections) {
    if (state.by_track.count(d.track))
      continue;
    NodeRecord rec;
    rec.network_id = state.next_id++;
    rec.track = d.track;
    rec.sonar_position = d.position;
    rec.depth_code = d.depth_code;
    rec.retries_remaining = cfg.retries_direct;
    rec.conflict_round_start = now;
    state.by_track.emplace(d.track, rec.network_id);
    state.registry.emplace(rec.network_id, rec);
  }
  state.clock = now;
  refresh_conflicts(state, now, cfg, false);
}

void update_decomposition(BsState& state, std::span<const Detection> detections, double now, const BsConfig& cfg)
{
  for (const auto& d : detections) {
    auto it = state.by_track.find(d.track);
    if (it == state.by_track.end())
      continue;
    NodeRecord& rec = state.registry.at(it->second);
    rec.observed_motion = motion_between(rec.sonar_position.depth, d.position.depth, cfg.motion_threshold);
    rec.sonar_position = d.position;
    rec.depth_code = d.depth_code;
  }
  state.clock = now;
  refresh_conflicts(state, now, cfg, true);
}

SuperFrame compose_superframe(BsState& state, const Position& bs_position, double now)
{
  SuperFrame frame;
  frame.frame_seq = state.next_frame_seq++;
  state.clock = now;

  for (auto& [id, rec] : state.registry) {
    if (rec.stage == HandshakeStage::Failed)
      continue;
    SlotPayload slot;
    slot.network_id = id;
    slot.depth_code = static_cast<std::uint16_t>(std::clamp<std::int64_t>(rec.depth_code.bucket, 0, kMaxDepthCode));
    slot.movement_marker = rec.observed_motion;
    slot.reset_bit = rec.reset_bit;

    switch (rec.stage) {
    case HandshakeStage::Assigned:
    case HandshakeStage::Conflicted:
    case HandshakeStage::AwaitingBeam:
      slot.stage = SlotStage::Assign;
      slot.conflict_flag = rec.stage == HandshakeStage::Conflicted;
      slot.set_bearing(safe_bearing(rec.sonar_position, bs_position));
      if (rec.stage == HandshakeStage::Assigned) {
        rec.stage = HandshakeStage::AwaitingBeam;
        if (!rec.hs1_time)
          rec.hs1_time = now;
      }
      break;
    case HandshakeStage::RelayPending: {
      const NodeRecord& relay = state.registry.at(*rec.relayed_by);
      slot.stage = SlotStage::RelayTx;
      slot.partner_id = relay.network_id;
      slot.set_bearing(safe_bearing(rec.sonar_position, relay.sonar_position));
      break;
    }
    case HandshakeStage::Confirming:
      slot.stage = SlotStage::Confirm;
      slot.set_bearing(safe_bearing(rec.sonar_position, bs_position));
      rec.stage = HandshakeStage::Accessed;
      rec.access_time = now;
      if (!rec.hs3_time)
        rec.hs3_time = now;
      break;
    case HandshakeStage::Accessed:
      if (rec.relay_of) {
        const NodeRecord& partner = state.registry.at(*rec.relay_of);
        slot.stage = SlotStage::RelayRx;
        slot.partner_id = partner.network_id;
        slot.set_bearing(safe_bearing(rec.sonar_position, partner.sonar_position));
      } else {
        slot.stage = SlotStage::Confirm;
        slot.set_bearing(safe_bearing(rec.sonar_position, bs_position));
      }
      break;
    case HandshakeStage::Failed:
      break;
    }
    frame.slots.push_back(slot);
  }
  return frame;
}

bool on_optical_arrival(BsState& state, const OpticalBeamReport& beam, double now)
{
  NodeRecord* rec = state.find(beam.claimed_id);
  if (!rec) {
    ++state.unknown_beams;
    return false;
  }
  switch (rec->stage) {
  case HandshakeStage::AwaitingBeam:
  case HandshakeStage::RelayPending:
    if (rec->stage == HandshakeStage::RelayPending && !beam.relayed)
      release_relay(state, *rec);
    rec->via_relay = beam.relayed;
    rec->stage = HandshakeStage::Confirming;
    if (!rec->hs2_time)
      rec->hs2_time = now;
    state.clock = now;
    return true;
  case HandshakeStage::Confirming:
  case HandshakeStage::Accessed:
    return false;
  default:
    ++state.stray_beams;
    return false;
  }
}

std::optional<NetworkId> select_relay(const BsState& state, NetworkId for_id)
{
  const NodeRecord* target = state.find(for_id);
  if (!target)
    return std::nullopt;
  std::optional<NetworkId> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& [id, rec] : state.registry) {
    if (id == for_id || rec.stage != HandshakeStage::Accessed || rec.relay_of || rec.via_relay)
      continue;
    const double d = distance(rec.sonar_position, target->sonar_position);
    // Registry iterates in ascending ID order, so strict < keeps the lower ID on ties.
    if (d < best_distance) {
      best_distance = d;
      best = id;
    }
  }
  return best;
}

void handle_timeouts(BsState& state, double now, const BsConfig& cfg)
{
  state.clock = now;
  for (auto& [id, rec] : state.registry) {
    if (rec.stage == HandshakeStage::AwaitingBeam) {
      if (--rec.retries_remaining > 0)
        continue;
      if (auto relay = select_relay(state, id)) {
        state.registry.at(*relay).relay_of = id;
        rec.relayed_by = relay;
        rec.stage = HandshakeStage::RelayPending;
        rec.retries_remaining = cfg.retries_relay;
      } else {
        rec.stage = HandshakeStage::Failed;
      }
    } else if (rec.stage == HandshakeStage::RelayPending) {
      if (--rec.retries_remaining > 0)
        continue;
      release_relay(state, rec);
      rec.stage = HandshakeStage::Failed;
    }
  }
}

void check_invariants(const BsState& state)
{
  auto fail = [](NetworkId id, const std::string& what) {
    throw std::logic_error("BS invariant violated for id " + std::to_string(id) + ": " + what);
  };
  if (state.by_track.size() != state.registry.size())
    throw std::logic_error("BS invariant violated: track index out of sync");
  for (const auto& [id, rec] : state.registry) {
    if (rec.network_id != id || id == 0 || id >= state.next_id)
      fail(id, "bad network id");
    auto t = state.by_track.find(rec.track);
    if (t == state.by_track.end() || t->second != id)
      fail(id, "track index mismatch");
    if (rec.relay_of) {
      const NodeRecord* partner = state.find(*rec.relay_of);
      if (!partner || partner->relayed_by != id)
        fail(id, "relay_of without matching relayed_by");
      if (rec.stage != HandshakeStage::Accessed || rec.via_relay)
        fail(id, "relay is not a direct accessed node");
    }
    if (rec.relayed_by) {
      const NodeRecord* relay = state.find(*rec.relayed_by);
      if (!relay || relay->relay_of != id)
        fail(id, "relayed_by without matching relay_of");
      if (relay->stage != HandshakeStage::Accessed)
        fail(id, "relay record is not accessed");
      if (rec.relay_of)
        fail(id, "relay chain longer than two hops");
    }
    if (rec.stage == HandshakeStage::Accessed) {
      if (!rec.access_time)
        fail(id, "accessed without access time");
      if (!rec.hs1_time || !rec.hs2_time || !rec.hs3_time || *rec.hs1_time > *rec.hs2_time ||
          *rec.hs2_time > *rec.hs3_time)
        fail(id, "accessed without ordered three-way handshake");
    }
    if (rec.via_relay && rec.stage == HandshakeStage::Accessed && !rec.relayed_by)
      fail(id, "relayed access without relay binding");
  }
}

} // namespace uwoan
