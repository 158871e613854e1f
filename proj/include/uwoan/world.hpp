#pragma once

#include <cstdint>
#include <vector>

#include "uwoan/geometry.hpp"

namespace uwoan {

struct Region
{
  double east{200.0};
  double north{200.0};
  double depth{200.0};

  bool contains(const Position& p) const
  {
    return p.east >= 0.0 && p.east <= east && p.north >= 0.0 && p.north <= north && p.depth >= 0.0 &&
           p.depth <= depth;
  }
  Position clamp(const Position& p) const;
};

/// Piecewise-constant-velocity track: position is evaluated in closed form
/// from the last anchor, so no error accumulates with event spacing.
struct NodeKinematics
{
  Position anchor{};
  double anchor_time{0.0};
  double vertical_velocity{0.0};
  std::uint64_t epoch{0}; // bumped on every velocity change; stale expiries carry an old epoch
};

struct World
{
  Position bs{};
  Region region{};
  Vec3 current{0.0, 0.0, 0.0}; // constant horizontal drift, m/s
  std::vector<NodeKinematics> nodes;

  Position position_of(std::size_t node, double t) const;
  std::vector<Position> positions_at(double t) const;

  /// Re-anchor `node` at time `now` and switch to a new vertical velocity.
  void set_vertical_velocity(std::size_t node, double velocity, double now);
};

} // namespace uwoan
