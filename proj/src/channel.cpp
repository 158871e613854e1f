#include "uwoan/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwoan {

void WaterProfile::validate(double max_depth) const
{
  if (!(c0 > 0.0))
    throw std::invalid_argument("c0 must be positive");
  if (!(sound_speed > 0.0))
    throw std::invalid_argument("sound_speed must be positive");
  if (!(attenuation_at(max_depth) > 0.0))
    throw std::invalid_argument("attenuation must stay positive over the region depth");
}

void OpticalLinkBudget::validate() const
{
  if (!(tx_power > 0.0) || !(rx_aperture_area > 0.0) || !(rx_sensitivity > 0.0))
    throw std::invalid_argument("optical budget powers and aperture must be positive");
  if (!(divergence_half_angle > 0.0) || !(divergence_half_angle < kPi / 2))
    throw std::invalid_argument("divergence half angle must be in (0, pi/2)");
  if (!(rx_fov_half_angle > 0.0) || rx_fov_half_angle > kPi / 2)
    throw std::invalid_argument("receiver fov half angle must be in (0, pi/2]");
}

double acoustic_delay(double distance_m, const WaterProfile& profile)
{
  return distance_m / profile.sound_speed;
}

double path_transmittance(const Position& a, const Position& b, const WaterProfile& profile)
{
  const double length = distance(a, b);
  if (length == 0.0)
    return 1.0;
  // c is linear in depth and depth is linear along the segment, so the
  // path integral is the length times c at the mean depth.
  const double mean_c = profile.c0 + profile.gamma * 0.5 * (a.depth + b.depth);
  return std::exp(-length * mean_c);
}

namespace {

double geometric_capture(double length, const OpticalLinkBudget& budget)
{
  if (length == 0.0)
    return 1.0;
  const double spot_radius = length * std::tan(budget.divergence_half_angle);
  const double spot_area = kPi * spot_radius * spot_radius;
  return std::min(1.0, budget.rx_aperture_area / spot_area);
}

double horizontal_power(double length, double depth, const OpticalLinkBudget& budget, const WaterProfile& profile)
{
  const double transmittance = std::exp(-length * profile.attenuation_at(depth));
  return budget.tx_power * transmittance * geometric_capture(length, budget);
}

} // namespace

double optical_received_power(const Position& tx, const Position& rx, const OpticalLinkBudget& budget,
                              const WaterProfile& profile)
{
  const double length = distance(tx, rx);
  if (!(length > 0.0))
    throw GeometryError("optical link between coincident points");
  return budget.tx_power * path_transmittance(tx, rx, profile) * geometric_capture(length, budget);
}

double max_optical_range(const OpticalLinkBudget& budget, const WaterProfile& profile, double depth)
{
  auto feasible = [&](double length) {
    return horizontal_power(length, depth, budget, profile) >= budget.rx_sensitivity;
  };
  if (!feasible(0.0))
    return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9)
      return lo;
  }
  while (hi - lo > kRangeTolerance) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

OpticalCheck check_optical_link(const Position& tx, const Vec3& emission_dir, const Position& rx,
                                const Vec3& boresight, double rx_fov_half_angle,
                                const OpticalLinkBudget& budget, const WaterProfile& profile)
{
  OpticalCheck check;
  const Vec3 to_rx = displacement(tx, rx);
  if (!(norm(to_rx) > 0.0))
    return check;
  const Vec3 to_tx{-to_rx[0], -to_rx[1], -to_rx[2]};

  check.received_power = optical_received_power(tx, rx, budget, profile);
  check.pointing_error_deg = angle_between_deg(emission_dir, to_rx);
  check.incidence_deg = angle_between_deg(boresight, to_tx);
  check.power_ok = check.received_power >= budget.rx_sensitivity;
  check.pointing_ok = check.pointing_error_deg <= rad_to_deg(budget.divergence_half_angle);
  check.fov_ok = check.incidence_deg <= rad_to_deg(rx_fov_half_angle) + 1e-9;
  return check;
}

} // namespace uwoan
