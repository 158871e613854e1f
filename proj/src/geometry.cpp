#include "uwoan/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace uwoan {

Vec3 displacement(const Position& from, const Position& to)
{
  return {to.east - from.east, to.north - from.north, to.depth - from.depth};
}

Position translate(const Position& p, const Vec3& v, double scale)
{
  return {p.east + scale * v[0], p.north + scale * v[1], p.depth + scale * v[2]};
}

double norm(const Vec3& v) { return std::hypot(v[0], v[1], v[2]); }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

bool is_finite(const Position& p)
{
  return std::isfinite(p.east) && std::isfinite(p.north) && std::isfinite(p.depth);
}

double distance(const Position& a, const Position& b) { return norm(displacement(a, b)); }

Bearing bearing_from_to(const Position& from, const Position& to)
{
  const Vec3 d = displacement(from, to);
  const double length = norm(d);
  if (!(length > 0.0))
    throw GeometryError("degenerate bearing");

  const double run = std::hypot(d[0], d[1]);
  const double rise = -d[2];
  Bearing b;
  b.elevation = rad_to_deg(std::atan2(rise, run));
  if (run <= 1e-12 * length) {
    b.azimuth = 0.0;
    b.elevation = rise > 0.0 ? 90.0 : -90.0;
    return b;
  }
  double az = rad_to_deg(std::atan2(d[0], d[1]));
  if (az < 0.0)
    az += 360.0;
  if (az >= 360.0)
    az -= 360.0;
  b.azimuth = az;
  return b;
}

Vec3 unit_vector(const Bearing& b)
{
  const double az = deg_to_rad(b.azimuth);
  const double el = deg_to_rad(b.elevation);
  const double horizontal = std::cos(el);
  return {horizontal * std::sin(az), horizontal * std::cos(az), -std::sin(el)};
}

double angle_between_deg(const Vec3& a, const Vec3& b)
{
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0))
    throw GeometryError("angle with zero-length vector");
  // atan2 of |a x b| and a.b stays accurate near 0 and 180 degrees.
  const Vec3 cross{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  return rad_to_deg(std::atan2(norm(cross), dot(a, b)));
}

namespace {

double resolution_units(double depth, const DepthModel& model)
{
  if (model.slope == 0.0)
    return depth / model.resolution_at_surface;
  return std::log1p(model.slope * depth / model.resolution_at_surface) / model.slope;
}

} // namespace

DepthCode quantize_depth(double depth, const DepthModel& model)
{
  if (!std::isfinite(depth) || depth < 0.0)
    throw GeometryError("depth must be finite and non-negative");
  if (!(model.resolution_at_surface > 0.0) || model.slope < 0.0)
    throw GeometryError("depth model needs positive surface resolution and non-negative slope");
  return {static_cast<std::int64_t>(std::floor(resolution_units(depth, model))), model.resolution_at(depth)};
}

double bucket_lower_edge(std::int64_t bucket, const DepthModel& model)
{
  const double u = static_cast<double>(bucket);
  if (model.slope == 0.0)
    return u * model.resolution_at_surface;
  return model.resolution_at_surface * std::expm1(model.slope * u) / model.slope;
}

} // namespace uwoan
