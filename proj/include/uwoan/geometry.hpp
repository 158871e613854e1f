#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace uwoan {

class GeometryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Location in the shared reference frame: east and north are horizontal
/// (north follows the geomagnetic field), depth points down with the water
/// surface at 0.
struct Position
{
  double east{0.0};
  double north{0.0};
  double depth{0.0};

  bool operator==(const Position&) const = default;
};

using Vec3 = std::array<double, 3>; // (east, north, depth-down)

Vec3 displacement(const Position& from, const Position& to);
Position translate(const Position& p, const Vec3& v, double scale = 1.0);
double norm(const Vec3& v);
double dot(const Vec3& a, const Vec3& b);
bool is_finite(const Position& p);

/// Emission / receiver direction. Azimuth is clockwise from geomagnetic
/// north in [0, 360); elevation is positive toward the surface in [-90, 90].
struct Bearing
{
  double azimuth{0.0};
  double elevation{0.0};

  bool operator==(const Bearing&) const = default;
};

double distance(const Position& a, const Position& b);

/// Direction from `from` to `to`. Straight up or down has azimuth 0.
/// Throws GeometryError("degenerate bearing") for coincident points.
Bearing bearing_from_to(const Position& from, const Position& to);

/// Unit vector in (east, north, depth-down) coordinates.
Vec3 unit_vector(const Bearing& b);

/// Angle between two non-zero vectors, degrees in [0, 180].
double angle_between_deg(const Vec3& a, const Vec3& b);

inline constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

/// Sonar depth-sounding resolution δ(z) = resolution_at_surface + slope·z.
struct DepthModel
{
  double resolution_at_surface{0.5}; // δ0, meters
  double slope{0.005};               // κ, dimensionless

  double resolution_at(double depth) const { return resolution_at_surface + slope * depth; }
};

struct DepthCode
{
  std::int64_t bucket{0};
  double resolution_at_depth{0.0};

  bool operator==(const DepthCode&) const = default;
};

/// Buckets are laid out so that the bucket covering depth z is δ(z) wide:
/// the index is floor(∫0^z dz'/δ(z')). Two depths collide iff they share a
/// bucket. Throws GeometryError for negative or non-finite depth.
DepthCode quantize_depth(double depth, const DepthModel& model);

/// Lower edge (meters) of a bucket under `model`; inverse of the bucket map.
double bucket_lower_edge(std::int64_t bucket, const DepthModel& model);

} // namespace uwoan
