#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "uwoan/geometry.hpp"

namespace uwoan {

class FrameError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using NetworkId = std::uint16_t; // 10 bits on the wire; 0 means "none"

inline constexpr NetworkId kMaxNetworkId = 1023;

enum class SlotStage : std::uint8_t { Assign = 0, Confirm = 1, RelayRx = 2, RelayTx = 3 };

enum class MovementMarker : std::uint8_t { None = 0, Diving = 1, Rising = 2 };

const char* to_string(SlotStage s);
const char* to_string(MovementMarker m);

/// Sign of a depth change larger than `threshold` (positive = deeper).
MovementMarker motion_between(double before, double after, double threshold);

/// One TDMA slot of the downward superframe. Wire layout, MSB first:
///
///   network_id 10 | depth_code 14 | azimuth 16 | elevation 15 | stage 2 |
///   conflict 1 | movement 2 | reset 1 | partner_id 10 | pad 1   (72 bits)
///
/// Angles travel in centidegrees; elevation is offset by +9000 so that 0
/// encodes -90 degrees and 18000 encodes +90 degrees.
struct SlotPayload
{
  NetworkId network_id{0};
  std::uint16_t depth_code{0};
  std::uint16_t azimuth_centideg{0};
  std::uint16_t elevation_centideg{0};
  SlotStage stage{SlotStage::Assign};
  bool conflict_flag{false};
  MovementMarker movement_marker{MovementMarker::None};
  bool reset_bit{false};
  NetworkId partner_id{0};

  bool operator==(const SlotPayload&) const = default;

  Bearing bearing() const;
  void set_bearing(const Bearing& b);
};

struct SuperFrame
{
  std::uint32_t frame_seq{0};
  std::vector<SlotPayload> slots;

  bool operator==(const SuperFrame&) const = default;

  const SlotPayload* find(NetworkId id) const;
};

inline constexpr std::size_t kFrameHeaderBytes = 6;
inline constexpr std::size_t kSlotBytes = 9;

inline constexpr std::uint16_t kMaxDepthCode = 16383;
inline constexpr std::uint16_t kMaxAzimuthCentideg = 35999;
inline constexpr std::uint16_t kMaxElevationCentideg = 18000;

/// Throws FrameError on out-of-range fields, duplicate ids, dangling relay
/// partners, or more than 65535 slots.
void validate(const SuperFrame& frame);

std::vector<std::uint8_t> encode(const SuperFrame& frame);

/// Inverse of encode. Throws FrameError on truncation, trailing bytes, or
/// any validation failure of the decoded frame.
SuperFrame decode(std::span<const std::uint8_t> bytes);

} // namespace uwoan
