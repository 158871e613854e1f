#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "uwoan/acoustic_frame.hpp"
#include "uwoan/geometry.hpp"
#include "uwoan/rng.hpp"

namespace uwoan {

class AllocationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class HandshakeStage { Assigned, Conflicted, AwaitingBeam, Confirming, Accessed, RelayPending, Failed };

const char* to_string(HandshakeStage s);

struct BsConfig
{
  DepthModel depth_model{};
  double sonar_radius{1000.0};
  double p_misdetect{0.0};
  double sonar_depth_noise{0.0}; // standard deviation, meters
  int retries_direct{5};
  int retries_relay{5};
  double reset_round{5.0}; // seconds a conflict may persist before a velocity reset
  double motion_threshold{1e-6};
};

/// A sonar echo. `track` is the sonar's persistent target identity across
/// scans; the BS never learns which physical node it belongs to.
struct Detection
{
  std::size_t track{0};
  Position position{};
  DepthCode depth_code{};
};

struct NodeRecord
{
  NetworkId network_id{0};
  std::size_t track{0};
  Position sonar_position{};
  DepthCode depth_code{};
  HandshakeStage stage{HandshakeStage::Assigned};
  int retries_remaining{0};
  std::optional<NetworkId> relay_of;
  std::optional<NetworkId> relayed_by;
  MovementMarker observed_motion{MovementMarker::None};
  std::optional<double> access_time;
  bool via_relay{false};

  bool reset_bit{false};
  double conflict_round_start{0.0};

  // First broadcast of the assignment, first accepted beam, first
  // confirmation broadcast.
  std::optional<double> hs1_time;
  std::optional<double> hs2_time;
  std::optional<double> hs3_time;

  /// Stages whose slot is an ASSIGN slot that UWNs match depth against.
  bool in_matching_pool() const
  {
    return stage == HandshakeStage::Assigned || stage == HandshakeStage::Conflicted ||
           stage == HandshakeStage::AwaitingBeam;
  }
};

struct BsState
{
  std::map<NetworkId, NodeRecord> registry; // iteration order == allocation order
  std::map<std::size_t, NetworkId> by_track;
  std::uint32_t next_frame_seq{0};
  NetworkId next_id{1};
  double clock{0.0};

  std::size_t unknown_beams{0};
  std::size_t stray_beams{0};

  NodeRecord* find(NetworkId id);
  const NodeRecord* find(NetworkId id) const;
};

/// Echo every target within the sonar radius, quantizing its depth.
/// Randomness is drawn only for non-zero misdetection / noise knobs.
std::vector<Detection> sonar_scan(const Position& bs, std::span<const Position> targets, const BsConfig& cfg,
                                  Rng& rng);

/// Give fresh sequential IDs to detections on unknown tracks, then recompute
/// depth conflicts. Throws AllocationError when the ID space would overflow;
/// the state is left untouched in that case.
void allocate(BsState& state, std::span<const Detection> detections, double now, const BsConfig& cfg);

/// Fold a re-scan into known records (position, depth code, observed motion)
/// and recompute conflicts; toggles the reset bit of conflicts that outlive
/// one round.
void update_decomposition(BsState& state, std::span<const Detection> detections, double now, const BsConfig& cfg);

/// Build the next superframe and advance the stages whose broadcast is a
/// protocol step (first ASSIGN, CONFIRM).
SuperFrame compose_superframe(BsState& state, const Position& bs_position, double now);

struct OpticalBeamReport
{
  NetworkId claimed_id{0};
  bool relayed{false};
};

/// Second handshake. Returns true when the beam advanced a record.
bool on_optical_arrival(BsState& state, const OpticalBeamReport& beam, double now);

/// Nearest accessed, direct-uplink node without a relay assignment, by sonar
/// position; ties go to the lower ID.
std::optional<NetworkId> select_relay(const BsState& state, NetworkId for_id);

void handle_timeouts(BsState& state, double now, const BsConfig& cfg);

/// Throws std::logic_error naming the first violated registry invariant.
void check_invariants(const BsState& state);

} // namespace uwoan
