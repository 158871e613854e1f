#include "uwoan/uwn_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace uwoan {

const char* to_string(Lifecycle l)
{
  switch (l) {
  case Lifecycle::Dormant: return "DORMANT";
  case Lifecycle::Activated: return "ACTIVATED";
  case Lifecycle::Matching: return "MATCHING";
  case Lifecycle::ConflictMoving: return "CONFLICT_MOVING";
  case Lifecycle::Emitting: return "EMITTING";
  case Lifecycle::Accessed: return "ACCESSED";
  case Lifecycle::Failed: return "FAILED";
  }
  return "?";
}

UwnState make_uwn(double depth)
{
  UwnState s;
  s.original_depth = depth;
  s.own_depth = depth;
  return s;
}

void on_trigger(UwnState& state, const UwnConfig& cfg)
{
  if (state.lifecycle == Lifecycle::Dormant)
    state.lifecycle = Lifecycle::Activated;
  if (state.trigger_depth)
    state.scan_motion = motion_between(*state.trigger_depth, state.own_depth, cfg.motion_threshold);
  state.trigger_depth = state.own_depth;
}

void apply_movement(UwnState& state, const Movement& m, double now)
{
  state.vertical_velocity = m.velocity;
  state.movement_deadline = m.velocity == 0.0 ? now : now + m.duration;
}

Movement draw_movement(Rng& rng, const MovementConfig& cfg, double depth, double region_depth)
{
  const bool dive_drawn = rng.uniform01() < 0.5;
  const double speed = rng.uniform(cfg.v_min, cfg.v_max);
  double duration = rng.uniform(cfg.t_min, cfg.t_max);

  const double room_down = std::max(0.0, region_depth - depth);
  const double room_up = std::max(0.0, depth);
  const double travel = speed * duration;

  bool dive = dive_drawn;
  if (travel > (dive ? room_down : room_up))
    dive = !dive;
  const double room = dive ? room_down : room_up;
  if (travel > room) {
    // Neither direction fits; take the roomier one and stop at the boundary.
    dive = room_down >= room_up;
    duration = (dive ? room_down : room_up) / speed;
  }
  return {dive ? speed : -speed, duration};
}

Movement on_access(UwnState& state, double now, const UwnConfig& cfg)
{
  state.lifecycle = Lifecycle::Accessed;
  const double offset = state.original_depth - state.own_depth;
  Movement m;
  if (std::abs(offset) >= cfg.movement.return_tolerance) {
    m.velocity = std::copysign(cfg.movement.v_return, offset);
    m.duration = std::abs(offset) / cfg.movement.v_return;
  }
  apply_movement(state, m, now);
  return m;
}

std::optional<NetworkId> forward_beam(const UwnState& state, const IncomingBeam& beam, const UwnConfig& cfg)
{
  if (state.lifecycle != Lifecycle::Accessed || !state.relay_duty)
    return std::nullopt;
  if (beam.claimed_id != state.relay_duty->partner_id)
    return std::nullopt;
  if (beam.incidence_deg > cfg.rx_fov_half_angle_deg)
    return std::nullopt;
  return beam.claimed_id;
}

namespace {

void leave_conflict(UwnState& state, double now)
{
  if (state.lifecycle == Lifecycle::ConflictMoving)
    state.conflict_time += now - state.conflict_entered_at;
}

FrameResponse follow_own_slot(UwnState& state, const SuperFrame& frame, double now, const UwnConfig& cfg)
{
  FrameResponse r;
  const SlotPayload* slot = frame.find(*state.matched_id);
  if (!slot) {
    // The BS released our slot: identification was announced as failed.
    if (state.lifecycle == Lifecycle::Emitting) {
      state.lifecycle = Lifecycle::Failed;
      state.emission_bearing.reset();
    }
    return r;
  }

  switch (slot->stage) {
  case SlotStage::Assign:
    if (state.lifecycle == Lifecycle::Emitting && !slot->conflict_flag) {
      state.emission_bearing = slot->bearing();
      r.emit_beam = true;
    }
    break;
  case SlotStage::RelayTx:
    if (state.lifecycle == Lifecycle::Emitting) {
      state.emission_bearing = slot->bearing();
      r.emit_beam = true;
    }
    break;
  case SlotStage::Confirm:
    if (state.lifecycle == Lifecycle::Emitting)
      r.movement = on_access(state, now, cfg);
    state.relay_duty.reset();
    break;
  case SlotStage::RelayRx:
    if (state.lifecycle == Lifecycle::Emitting)
      r.movement = on_access(state, now, cfg);
    state.relay_duty = RelayDuty{slot->partner_id, slot->bearing()};
    break;
  }
  return r;
}

} // namespace

FrameResponse match_frame(UwnState& state, const SuperFrame& frame, double now, Rng& rng, const UwnConfig& cfg)
{
  FrameResponse r;
  if (state.lifecycle == Lifecycle::Dormant || state.lifecycle == Lifecycle::Failed)
    return r;
  if (state.lifecycle == Lifecycle::Activated)
    state.lifecycle = Lifecycle::Matching;
  if (state.matched_id)
    return follow_own_slot(state, frame, now, cfg);

  const auto own_code = quantize_depth(state.own_depth, cfg.depth_model).bucket;
  std::vector<const SlotPayload*> candidates;
  for (const auto& s : frame.slots) {
    if (s.stage != SlotStage::Assign || s.depth_code != own_code)
      continue;
    if (cfg.marker_matching && s.movement_marker != state.scan_motion)
      continue;
    candidates.push_back(&s);
  }
  if (candidates.empty())
    return r;

  if (candidates.size() == 1 && !candidates.front()->conflict_flag) {
    const SlotPayload& slot = *candidates.front();
    if (state.vertical_velocity != 0.0) {
      // The slot was computed from a scan taken before this frame left the
      // BS; a moving node may have crossed a bucket edge since. Hold still and
      // confirm against the next scan.
      state.verifying = true;
      r.movement = Movement{};
      apply_movement(state, *r.movement, now);
      return r;
    }
    leave_conflict(state, now);
    state.verifying = false;
    state.matched_id = slot.network_id;
    state.emission_bearing = slot.bearing();
    state.lifecycle = Lifecycle::Emitting;
    r.emit_beam = true;
    return r;
  }

  const bool reset_seen = std::any_of(candidates.begin(), candidates.end(), [&](const SlotPayload* s) {
    return s->reset_bit != state.last_reset_bit;
  });
  if (state.lifecycle != Lifecycle::ConflictMoving) {
    state.lifecycle = Lifecycle::ConflictMoving;
    state.conflict_entered_at = now;
    state.last_reset_bit = candidates.front()->reset_bit;
  } else if (reset_seen) {
    state.last_reset_bit = !state.last_reset_bit;
  } else if (!state.verifying) {
    return r;
  }
  state.verifying = false;
  r.movement = draw_movement(rng, cfg.movement, state.own_depth, cfg.region_depth);
  apply_movement(state, *r.movement, now);
  return r;
}

} // namespace uwoan
