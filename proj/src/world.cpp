#include "uwoan/world.hpp"

#include <algorithm>

namespace uwoan {

Position Region::clamp(const Position& p) const
{
  return {std::clamp(p.east, 0.0, east), std::clamp(p.north, 0.0, north), std::clamp(p.depth, 0.0, depth)};
}

Position World::position_of(std::size_t node, double t) const
{
  const NodeKinematics& k = nodes.at(node);
  const double dt = t - k.anchor_time;
  const Position p{k.anchor.east + current[0] * dt, k.anchor.north + current[1] * dt,
                   k.anchor.depth + k.vertical_velocity * dt};
  return region.clamp(p);
}

std::vector<Position> World::positions_at(double t) const
{
  std::vector<Position> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    out.push_back(position_of(i, t));
  return out;
}

void World::set_vertical_velocity(std::size_t node, double velocity, double now)
{
  NodeKinematics& k = nodes.at(node);
  k.anchor = position_of(node, now);
  k.anchor_time = now;
  k.vertical_velocity = velocity;
  ++k.epoch;
}

} // namespace uwoan
