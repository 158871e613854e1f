#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "uwoan/acoustic_frame.hpp"
#include "uwoan/config.hpp"
#include "uwoan/report.hpp"
#include "uwoan/rng.hpp"
#include "uwoan/world.hpp"

namespace uwoan {

enum class EventKind {
  SonarPing,
  SuperframeTx,
  AcousticArrival,
  OpticalArrival,
  MovementExpiry,
  TimeoutCheck,
  SimEnd,
};

const char* to_string(EventKind k);

inline constexpr std::size_t kBsNode = std::numeric_limits<std::size_t>::max();

struct Beam
{
  std::size_t emitter{0};
  Position source{};
  Vec3 direction{0.0, 0.0, 0.0};
  NetworkId claimed_id{0};
  bool relayed{false};
};

struct Event
{
  double time{0.0};
  std::uint64_t seq{0};
  EventKind kind{EventKind::SimEnd};
  std::size_t node{kBsNode}; // receiving / affected node; kBsNode for the BS

  // AcousticArrival: null bytes means the trigger ping.
  std::shared_ptr<const std::vector<std::uint8_t>> frame_bytes;
  double sent_at{0.0};
  Position tx_position{};
  Position rx_position{};

  Beam beam{};              // OpticalArrival
  std::uint64_t epoch{0};   // MovementExpiry
};

/// Min-queue on (time, seq). seq is assigned on scheduling, so events at the
/// same instant pop in the order they were scheduled.
class EventQueue
{
public:
  /// Throws std::logic_error for an event earlier than the current clock.
  void schedule(Event e);
  Event pop();
  bool empty() const { return m_heap.empty(); }
  std::size_t size() const { return m_heap.size(); }
  double now() const { return m_now; }

private:
  struct Later
  {
    bool operator()(const Event& a, const Event& b) const
    {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> m_heap;
  std::uint64_t m_next_seq{0};
  double m_now{0.0};
};

/// One processed event, with structured copies of what assertions need.
struct TraceEntry
{
  double time{0.0};
  std::uint64_t seq{0};
  EventKind kind{EventKind::SimEnd};
  std::string subject; // "bs" or "uwn:<index>"
  std::string origin;  // who emitted the signal: "bs", "uwn:<index>", or "" for internal events
  std::string detail;

  double sent_at{0.0};
  Position tx_position{};
  Position rx_position{};
  bool trigger{false};
  std::vector<std::pair<NetworkId, SlotStage>> slots; // SuperframeTx
  NetworkId beam_id{0};                               // OpticalArrival
  bool beam_relayed{false};
  bool beam_accepted{false};

  /// `time kind subject detail`, time with nine decimals.
  std::string line() const;
};

World generate(const SimConfig& cfg, Rng& rng);
World generate(const SimConfig& cfg, std::uint64_t seed);

/// A deployment with explicit node positions, for hand-built scenarios.
World make_world(const SimConfig& cfg, const std::vector<Position>& positions);

SimReport run(const SimConfig& cfg, std::uint64_t seed);
SimReport run(const SimConfig& cfg, const World& world, std::uint64_t seed);

struct TracedRun
{
  SimReport report;
  std::vector<TraceEntry> trace;
};

TracedRun trace(const SimConfig& cfg, std::uint64_t seed);
TracedRun trace(const SimConfig& cfg, const World& world, std::uint64_t seed);

std::string trace_text(const std::vector<TraceEntry>& trace);

} // namespace uwoan
