#include "uwoan/acoustic_frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <bitset>

namespace uwoan {

const char* to_string(SlotStage s)
{
  switch (s) {
  case SlotStage::Assign: return "ASSIGN";
  case SlotStage::Confirm: return "CONFIRM";
  case SlotStage::RelayRx: return "RELAY_RX";
  case SlotStage::RelayTx: return "RELAY_TX";
  }
  return "?";
}

const char* to_string(MovementMarker m)
{
  switch (m) {
  case MovementMarker::None: return "NONE";
  case MovementMarker::Diving: return "DIVING";
  case MovementMarker::Rising: return "RISING";
  }
  return "?";
}

MovementMarker motion_between(double before, double after, double threshold)
{
  if (after - before > threshold)
    return MovementMarker::Diving;
  if (before - after > threshold)
    return MovementMarker::Rising;
  return MovementMarker::None;
}

Bearing SlotPayload::bearing() const
{
  return {azimuth_centideg / 100.0, (static_cast<int>(elevation_centideg) - 9000) / 100.0};
}

void SlotPayload::set_bearing(const Bearing& b)
{
  long az = std::lround(b.azimuth * 100.0) % 36000;
  if (az < 0)
    az += 36000;
  const long el = std::clamp(std::lround(b.elevation * 100.0), -9000L, 9000L) + 9000;
  azimuth_centideg = static_cast<std::uint16_t>(az);
  elevation_centideg = static_cast<std::uint16_t>(el);
}

const SlotPayload* SuperFrame::find(NetworkId id) const
{
  auto it = std::find_if(slots.begin(), slots.end(), [id](const SlotPayload& s) { return s.network_id == id; });
  return it == slots.end() ? nullptr : &*it;
}

namespace {

class BitWriter
{
public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : m_out(out) {}

  void put(std::uint32_t value, unsigned width)
  {
    for (unsigned i = width; i-- > 0;) {
      if (m_bit == 0)
        m_out.push_back(0);
      if ((value >> i) & 1U)
        m_out.back() |= static_cast<std::uint8_t>(0x80U >> m_bit);
      m_bit = (m_bit + 1) % 8;
    }
  }

private:
  std::vector<std::uint8_t>& m_out;
  unsigned m_bit{0};
};

std::uint64_t load_be(std::span<const std::uint8_t> in, std::size_t at, unsigned n)
{
  std::uint64_t v = 0;
  for (unsigned k = 0; k < n; ++k)
    v = (v << 8) | in[at + k];
  return v;
}

void check_slot(const SlotPayload& s)
{
  if (s.network_id > kMaxNetworkId)
    throw FrameError("network_id out of range: " + std::to_string(s.network_id));
  if (s.partner_id > kMaxNetworkId)
    throw FrameError("partner_id out of range: " + std::to_string(s.partner_id));
  if (s.depth_code > kMaxDepthCode)
    throw FrameError("depth_code out of range: " + std::to_string(s.depth_code));
  if (s.azimuth_centideg > kMaxAzimuthCentideg)
    throw FrameError("azimuth out of range: " + std::to_string(s.azimuth_centideg));
  if (s.elevation_centideg > kMaxElevationCentideg)
    throw FrameError("elevation out of range: " + std::to_string(s.elevation_centideg));
  if (static_cast<unsigned>(s.stage) > 3)
    throw FrameError("invalid stage code");
  if (static_cast<unsigned>(s.movement_marker) > 2)
    throw FrameError("invalid movement marker");
}

} // namespace

void validate(const SuperFrame& frame)
{
  if (frame.slots.size() > 0xFFFF)
    throw FrameError("too many slots");
  std::bitset<kMaxNetworkId + 1> ids;
  for (const auto& s : frame.slots) {
    check_slot(s);
    if (ids.test(s.network_id))
      throw FrameError("duplicate network_id " + std::to_string(s.network_id));
    ids.set(s.network_id);
  }
  for (const auto& s : frame.slots) {
    const bool relay = s.stage == SlotStage::RelayRx || s.stage == SlotStage::RelayTx;
    if (relay && (s.partner_id == 0 || !ids.test(s.partner_id)))
      throw FrameError("relay slot " + std::to_string(s.network_id) + " names a missing partner");
  }
}

std::vector<std::uint8_t> encode(const SuperFrame& frame)
{
  validate(frame);
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + kSlotBytes * frame.slots.size());
  BitWriter w(out);
  w.put(frame.frame_seq >> 16, 16);
  w.put(frame.frame_seq & 0xFFFFU, 16);
  w.put(static_cast<std::uint32_t>(frame.slots.size()), 16);
  for (const auto& s : frame.slots) {
    w.put(s.network_id, 10);
    w.put(s.depth_code, 14);
    w.put(s.azimuth_centideg, 16);
    w.put(s.elevation_centideg, 15);
    w.put(static_cast<std::uint32_t>(s.stage), 2);
    w.put(s.conflict_flag ? 1U : 0U, 1);
    w.put(static_cast<std::uint32_t>(s.movement_marker), 2);
    w.put(s.reset_bit ? 1U : 0U, 1);
    w.put(s.partner_id, 10);
    w.put(0, 1);
  }
  return out;
}

SuperFrame decode(std::span<const std::uint8_t> bytes)
{
  if (bytes.size() < kFrameHeaderBytes)
    throw FrameError("truncated frame header: " + std::to_string(bytes.size()) + " bytes");
  SuperFrame frame;
  frame.frame_seq = static_cast<std::uint32_t>(load_be(bytes, 0, 4));
  const std::size_t count = load_be(bytes, 4, 2);
  const std::size_t expected = kFrameHeaderBytes + kSlotBytes * count;
  if (bytes.size() < expected)
    throw FrameError("truncated frame: need " + std::to_string(expected) + " bytes, have " +
                     std::to_string(bytes.size()));
  if (bytes.size() > expected)
    throw FrameError("trailing bytes after " + std::to_string(count) + " slots");

  // A slot is 72 bits: the first 64 hold everything down to the top three
  // bits of partner_id, the last byte holds the rest plus the pad bit.
  frame.slots.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kFrameHeaderBytes + kSlotBytes * i;
    const std::uint64_t hi = load_be(bytes, at, 8);
    const std::uint8_t lo = bytes[at + 8];
    SlotPayload s;
    s.network_id = static_cast<NetworkId>(hi >> 54);
    s.depth_code = static_cast<std::uint16_t>((hi >> 40) & 0x3FFFU);
    s.azimuth_centideg = static_cast<std::uint16_t>((hi >> 24) & 0xFFFFU);
    s.elevation_centideg = static_cast<std::uint16_t>((hi >> 9) & 0x7FFFU);
    s.stage = static_cast<SlotStage>((hi >> 7) & 3U);
    s.conflict_flag = ((hi >> 6) & 1U) != 0;
    const auto marker = (hi >> 4) & 3U;
    if (marker > 2)
      throw FrameError("invalid movement marker");
    s.movement_marker = static_cast<MovementMarker>(marker);
    s.reset_bit = ((hi >> 3) & 1U) != 0;
    s.partner_id = static_cast<NetworkId>(((hi & 7U) << 7) | (lo >> 1));
    if (lo & 1U)
      throw FrameError("non-zero padding bit");
    frame.slots.push_back(s);
  }
  validate(frame);
  return frame;
}

} // namespace uwoan
