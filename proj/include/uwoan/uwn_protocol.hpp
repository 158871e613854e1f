#pragma once

#include <optional>

#include "uwoan/acoustic_frame.hpp"
#include "uwoan/geometry.hpp"
#include "uwoan/rng.hpp"

namespace uwoan {

enum class Lifecycle { Dormant, Activated, Matching, ConflictMoving, Emitting, Accessed, Failed };

const char* to_string(Lifecycle l);

struct MovementConfig
{
  double v_min{0.05}; // m/s
  double v_max{0.5};
  double t_min{1.0}; // s
  double t_max{3.0};
  double v_return{0.5};
  double return_tolerance{0.1}; // m
};

struct UwnConfig
{
  DepthModel depth_model{};
  MovementConfig movement{};
  bool marker_matching{true};
  double region_depth{200.0};
  double rx_fov_half_angle_deg{30.0};
  double motion_threshold{1e-6}; // m, same rule the BS uses for its markers
};

/// Vertical motion command. Positive velocity dives. A zero velocity stops
/// the node; duration is ignored in that case.
struct Movement
{
  double velocity{0.0};
  double duration{0.0};
};

struct RelayDuty
{
  NetworkId partner_id{0};
  Bearing receiver_bearing{};
};

struct UwnState
{
  Lifecycle lifecycle{Lifecycle::Dormant};
  std::optional<NetworkId> matched_id;
  std::optional<Bearing> emission_bearing;
  std::optional<RelayDuty> relay_duty;
  double original_depth{0.0};
  double own_depth{0.0};
  double vertical_velocity{0.0};
  double movement_deadline{0.0};
  bool last_reset_bit{false};

  // Depth at the previous sonar trigger and the sign of the change between
  // the last two triggers: the node's view of what the sonar observed.
  std::optional<double> trigger_depth;
  MovementMarker scan_motion{MovementMarker::None};
  // Stopped after a unique match while moving; the match is re-checked on the
  // next frame before emitting.
  bool verifying{false};

  double conflict_entered_at{0.0};
  double conflict_time{0.0};

  MovementMarker own_motion() const
  {
    if (vertical_velocity > 0.0)
      return MovementMarker::Diving;
    if (vertical_velocity < 0.0)
      return MovementMarker::Rising;
    return MovementMarker::None;
  }
};

UwnState make_uwn(double depth);

/// Sonar trigger received; `own_depth` must be current.
void on_trigger(UwnState& state, const UwnConfig& cfg = {});

struct FrameResponse
{
  bool emit_beam{false};
  std::optional<Movement> movement;
};

/// Process one decoded superframe at time `now`. `own_depth` must already
/// reflect the node's depth at `now`.
FrameResponse match_frame(UwnState& state, const SuperFrame& frame, double now, Rng& rng, const UwnConfig& cfg);

/// Random decomposition move from `depth`. Consumes exactly three draws:
/// direction, speed, duration. A move that would leave [0, region_depth] is
/// flipped; if it cannot fit either way it is shortened.
Movement draw_movement(Rng& rng, const MovementConfig& cfg, double depth, double region_depth);

/// Third handshake received: become ACCESSED and head back to the original
/// depth.
Movement on_access(UwnState& state, double now, const UwnConfig& cfg);

struct IncomingBeam
{
  NetworkId claimed_id{0};
  double incidence_deg{0.0};
};

/// Relay duty: returns the originator's id to re-emit toward the BS, or
/// nothing when the beam is not from the partner or outside the field of view.
std::optional<NetworkId> forward_beam(const UwnState& state, const IncomingBeam& beam, const UwnConfig& cfg);

/// Bookkeeping when the engine finishes a movement segment.
void apply_movement(UwnState& state, const Movement& m, double now);

} // namespace uwoan
