#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "uwoan/bs_protocol.hpp"
#include "uwoan/channel.hpp"
#include "uwoan/uwn_protocol.hpp"
#include "uwoan/world.hpp"

namespace uwoan {

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Every knob of a run. Defaults reproduce the 50-node, 200 m cube,
/// 50 s scenario. Angles are degrees here; the channel structs take radians.
struct SimConfig
{
  std::size_t n_uwn{50};
  Region region{};
  std::optional<double> bs_east;  // default: middle of the surface face
  std::optional<double> bs_north;
  double bs_depth{0.0};

  WaterProfile water{};

  double tx_power{0.1};
  double divergence_half_angle_deg{1.0};
  double rx_aperture_area{7.854e-3};
  double rx_sensitivity{2e-12}; // W
  double bs_rx_fov_deg{90.0};
  double uwn_rx_fov_deg{30.0};

  double acoustic_radius{1000.0};
  DepthModel depth_model{};
  double sonar_depth_noise{0.0};
  double p_misdetect{0.0};
  int retries_direct{5};
  int retries_relay{5};
  double reset_round{5.0};

  MovementConfig movement{};
  bool marker_matching{true};

  double superframe_period{1.0};
  double first_ping{0.0};
  double first_superframe{0.1};
  double t_max{50.0};
  double p_frame_loss{0.0};
  double relay_delay{0.0};
  double current_east{0.0};
  double current_north{0.0};

  std::uint64_t seed{1};

  Position bs_position() const;
  OpticalLinkBudget uwn_budget() const;
  BsConfig bs_config() const;
  UwnConfig uwn_config() const;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

/// Flat `key = value` text, `#` starts a comment. Unknown keys, duplicate
/// keys, and malformed values are ConfigErrors. The result is validated.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// Canonical text for a config: every key, fixed order, round-trip precision.
std::string to_text(const SimConfig& cfg);

/// Canonical text without the seed; runs sharing it are comparable.
std::string fingerprint(const SimConfig& cfg);

} // namespace uwoan
