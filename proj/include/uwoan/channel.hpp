#pragma once

#include "uwoan/geometry.hpp"

namespace uwoan {

/// Water column seen by both physical layers. The optical beam attenuation
/// coefficient varies linearly with depth: c(z) = c0 + gamma * z.
struct WaterProfile
{
  double c0{0.056};           // 1/m at the surface
  double gamma{0.0};          // (1/m)/m
  double sound_speed{1500.0}; // m/s

  double attenuation_at(double depth) const { return c0 + gamma * depth; }
  /// Throws std::invalid_argument unless c(z) > 0 over [0, max_depth].
  void validate(double max_depth) const;
};

/// Narrow-beam optical transmitter and lens receiver. Angles in radians.
struct OpticalLinkBudget
{
  double tx_power{0.1};                       // W
  double divergence_half_angle{0.017453292519943295}; // 1 degree
  double rx_aperture_area{7.854e-3};          // m^2 (10 cm lens)
  double rx_sensitivity{5e-11};               // W
  double rx_fov_half_angle{0.5235987755982988}; // 30 degrees

  void validate() const;
};

double acoustic_delay(double distance_m, const WaterProfile& profile);

/// exp(-∫ c(z) ds) along the straight segment a→b.
double path_transmittance(const Position& a, const Position& b, const WaterProfile& profile);

/// Beer-Lambert loss times conical spreading over the receiver aperture,
/// with the geometric capture fraction capped at 1.
double optical_received_power(const Position& tx, const Position& rx, const OpticalLinkBudget& budget,
                              const WaterProfile& profile);

/// Largest horizontal range at `depth` whose received power still meets the
/// sensitivity, to within kRangeTolerance. Zero when nothing is feasible.
double max_optical_range(const OpticalLinkBudget& budget, const WaterProfile& profile, double depth);

inline constexpr double kRangeTolerance = 0.01;

/// Full optical delivery check for a beam from `tx` emitted along
/// `emission_dir` to a receiver at `rx` looking along `boresight` with the
/// given field-of-view half angle (radians).
struct OpticalCheck
{
  double received_power{0.0};
  double pointing_error_deg{0.0};
  double incidence_deg{0.0};
  bool power_ok{false};
  bool pointing_ok{false};
  bool fov_ok{false};

  bool delivered() const { return power_ok && pointing_ok && fov_ok; }
};

OpticalCheck check_optical_link(const Position& tx, const Vec3& emission_dir, const Position& rx,
                                const Vec3& boresight, double rx_fov_half_angle,
                                const OpticalLinkBudget& budget, const WaterProfile& profile);

} // namespace uwoan
