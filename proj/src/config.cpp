#include "uwoan/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace uwoan {

Position SimConfig::bs_position() const
{
  return {bs_east.value_or(region.east / 2.0), bs_north.value_or(region.north / 2.0), bs_depth};
}

OpticalLinkBudget SimConfig::uwn_budget() const
{
  OpticalLinkBudget b;
  b.tx_power = tx_power;
  b.divergence_half_angle = deg_to_rad(divergence_half_angle_deg);
  b.rx_aperture_area = rx_aperture_area;
  b.rx_sensitivity = rx_sensitivity;
  b.rx_fov_half_angle = deg_to_rad(uwn_rx_fov_deg);
  return b;
}

BsConfig SimConfig::bs_config() const
{
  BsConfig c;
  c.depth_model = depth_model;
  c.sonar_radius = acoustic_radius;
  c.p_misdetect = p_misdetect;
  c.sonar_depth_noise = sonar_depth_noise;
  c.retries_direct = retries_direct;
  c.retries_relay = retries_relay;
  c.reset_round = reset_round;
  return c;
}

UwnConfig SimConfig::uwn_config() const
{
  UwnConfig c;
  c.depth_model = depth_model;
  c.movement = movement;
  c.marker_matching = marker_matching;
  c.region_depth = region.depth;
  c.rx_fov_half_angle_deg = uwn_rx_fov_deg;
  return c;
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why)
{
  throw ConfigError("config key '" + key + "': " + why);
}

void require(bool ok, const char* key, const char* why)
{
  if (!ok)
    bad(key, why);
}

std::string format_double(double v)
{
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, std::string_view s)
{
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    bad(key, "expected a number, got '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, std::string_view s)
{
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    bad(key, "expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

bool parse_bool(const std::string& key, std::string_view s)
{
  if (s == "true" || s == "1")
    return true;
  if (s == "false" || s == "0")
    return false;
  bad(key, "expected true or false, got '" + std::string(s) + "'");
}

struct Key
{
  std::string name;
  std::function<void(SimConfig&, const std::string&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

Key real(std::string name, double SimConfig::*field)
{
  return {std::move(name), [field](SimConfig& c, const std::string& k, std::string_view v) { c.*field = parse_double(k, v); },
          [field](const SimConfig& c) { return format_double(c.*field); }};
}

template <typename Get>
Key real_at(std::string name, Get access)
{
  return {std::move(name),
          [access](SimConfig& c, const std::string& k, std::string_view v) { access(c) = parse_double(k, v); },
          [access](const SimConfig& c) { return format_double(access(c)); }};
}

const std::vector<Key>& keys()
{
  static const std::vector<Key> table = {
    {"n_uwn", [](SimConfig& c, const std::string& k, std::string_view v) { c.n_uwn = parse_uint(k, v); },
     [](const SimConfig& c) { return std::to_string(c.n_uwn); }},
    real_at("region_east", [](auto& c) -> auto& { return c.region.east; }),
    real_at("region_north", [](auto& c) -> auto& { return c.region.north; }),
    real_at("region_depth", [](auto& c) -> auto& { return c.region.depth; }),
    {"bs_east", [](SimConfig& c, const std::string& k, std::string_view v) { c.bs_east = parse_double(k, v); },
     [](const SimConfig& c) { return format_double(c.bs_position().east); }},
    {"bs_north", [](SimConfig& c, const std::string& k, std::string_view v) { c.bs_north = parse_double(k, v); },
     [](const SimConfig& c) { return format_double(c.bs_position().north); }},
    real("bs_depth", &SimConfig::bs_depth),
    real_at("c0", [](auto& c) -> auto& { return c.water.c0; }),
    real_at("gamma", [](auto& c) -> auto& { return c.water.gamma; }),
    real_at("sound_speed", [](auto& c) -> auto& { return c.water.sound_speed; }),
    real("tx_power", &SimConfig::tx_power),
    real("divergence_half_angle_deg", &SimConfig::divergence_half_angle_deg),
    real("rx_aperture_area", &SimConfig::rx_aperture_area),
    real("rx_sensitivity", &SimConfig::rx_sensitivity),
    real("bs_rx_fov_deg", &SimConfig::bs_rx_fov_deg),
    real("uwn_rx_fov_deg", &SimConfig::uwn_rx_fov_deg),
    real("acoustic_radius", &SimConfig::acoustic_radius),
    real_at("depth_resolution_surface", [](auto& c) -> auto& { return c.depth_model.resolution_at_surface; }),
    real_at("depth_resolution_slope", [](auto& c) -> auto& { return c.depth_model.slope; }),
    real("sonar_depth_noise", &SimConfig::sonar_depth_noise),
    real("p_misdetect", &SimConfig::p_misdetect),
    {"retries_direct",
     [](SimConfig& c, const std::string& k, std::string_view v) { c.retries_direct = static_cast<int>(parse_uint(k, v)); },
     [](const SimConfig& c) { return std::to_string(c.retries_direct); }},
    {"retries_relay",
     [](SimConfig& c, const std::string& k, std::string_view v) { c.retries_relay = static_cast<int>(parse_uint(k, v)); },
     [](const SimConfig& c) { return std::to_string(c.retries_relay); }},
    real("reset_round", &SimConfig::reset_round),
    real_at("v_min", [](auto& c) -> auto& { return c.movement.v_min; }),
    real_at("v_max", [](auto& c) -> auto& { return c.movement.v_max; }),
    real_at("move_t_min", [](auto& c) -> auto& { return c.movement.t_min; }),
    real_at("move_t_max", [](auto& c) -> auto& { return c.movement.t_max; }),
    real_at("v_return", [](auto& c) -> auto& { return c.movement.v_return; }),
    real_at("return_tolerance", [](auto& c) -> auto& { return c.movement.return_tolerance; }),
    {"marker_matching",
     [](SimConfig& c, const std::string& k, std::string_view v) { c.marker_matching = parse_bool(k, v); },
     [](const SimConfig& c) { return std::string(c.marker_matching ? "true" : "false"); }},
    real("superframe_period", &SimConfig::superframe_period),
    real("first_ping", &SimConfig::first_ping),
    real("first_superframe", &SimConfig::first_superframe),
    real("t_max", &SimConfig::t_max),
    real("p_frame_loss", &SimConfig::p_frame_loss),
    real("relay_delay", &SimConfig::relay_delay),
    real("current_east", &SimConfig::current_east),
    real("current_north", &SimConfig::current_north),
    {"seed", [](SimConfig& c, const std::string& k, std::string_view v) { c.seed = parse_uint(k, v); },
     [](const SimConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

std::string_view trim(std::string_view s)
{
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

} // namespace

void SimConfig::validate() const
{
  require(region.east > 0 && region.north > 0 && region.depth > 0, "region", "extents must be positive");
  const Position bs = bs_position();
  require(is_finite(bs) && bs.depth >= 0.0, "bs_depth", "BS position must be finite with non-negative depth");
  try {
    water.validate(region.depth);
    uwn_budget().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("channel parameters: ") + e.what());
  }
  require(bs_rx_fov_deg > 0 && bs_rx_fov_deg <= 90, "bs_rx_fov_deg", "must be in (0, 90]");
  require(acoustic_radius > 0, "acoustic_radius", "must be positive");
  require(depth_model.resolution_at_surface > 0, "depth_resolution_surface", "must be positive");
  require(depth_model.slope >= 0, "depth_resolution_slope", "must be non-negative");
  require(sonar_depth_noise >= 0, "sonar_depth_noise", "must be non-negative");
  require(p_misdetect >= 0 && p_misdetect <= 1, "p_misdetect", "must be a probability");
  require(p_frame_loss >= 0 && p_frame_loss <= 1, "p_frame_loss", "must be a probability");
  require(retries_direct >= 1, "retries_direct", "must be at least 1");
  require(retries_relay >= 1, "retries_relay", "must be at least 1");
  require(reset_round > 0, "reset_round", "must be positive");
  require(movement.v_min > 0 && movement.v_max >= movement.v_min, "v_min", "need 0 < v_min <= v_max");
  require(movement.t_min > 0 && movement.t_max >= movement.t_min, "move_t_min", "need 0 < move_t_min <= move_t_max");
  require(movement.v_return > 0, "v_return", "must be positive");
  require(movement.return_tolerance > 0, "return_tolerance", "must be positive");
  require(superframe_period > 0, "superframe_period", "must be positive");
  require(first_ping >= 0 && first_superframe >= 0, "first_ping", "schedule offsets must be non-negative");
  require(t_max > 0, "t_max", "must be positive");
  require(relay_delay >= 0, "relay_delay", "must be non-negative");
  require(n_uwn <= kMaxNetworkId, "n_uwn", "must fit the 10-bit network ID space (at most 1023)");
}

SimConfig parse_config(std::string_view text)
{
  SimConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    const auto& table = keys();
    auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    it->set(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const SimConfig& cfg)
{
  std::string out;
  for (const auto& k : keys())
    out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::string fingerprint(const SimConfig& cfg)
{
  std::string out;
  for (const auto& k : keys())
    if (k.name != "seed")
      out += k.name + "=" + k.get(cfg) + ";";
  return out;
}

} // namespace uwoan
