#include "doorstep/config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace doorstep {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
}

std::vector<DeliveryTarget> parse_targets(std::string_view v) {
  std::vector<DeliveryTarget> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(delivery_target_from_string(item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  need(corpus_size >= 1, "corpus_size must be at least 1");
  need(threads >= 1, "threads must be at least 1");
  need(gps_offset_sigma >= 0.0, "gps_offset_sigma must be non-negative");
  need(obstacle_density >= 0.0 && obstacle_density <= 1.0, "obstacle_density must lie in [0, 1]");
  need(weight_open >= 0.0 && weight_recessed >= 0.0 && weight_enclosed >= 0.0, "door-mode weights must be non-negative");
  need(weight_open + weight_recessed + weight_enclosed > 0.0, "door-mode weights must not all be zero");
  need(clearance > 0.0, "clearance must be positive");
  need(hover_height > 0.0, "hover_height must be positive");
  need(max_speed > 0.0, "max_speed must be positive");
  need(proposed_time_cap > 0.0 && frontier_time_cap > 0.0, "time caps must be positive");
  need(radius_cap >= 0.0, "radius_cap must be non-negative");
  need(spot_radius > 0.0, "spot_radius must be positive");
  need(detector_range > 0.0, "detector_range must be positive");
  need(label_flip_probability >= 0.0 && label_flip_probability <= 1.0, "label_flip_probability must lie in [0, 1]");
  need(detector_miss_probability >= 0.0 && detector_miss_probability < 1.0,
       "detector_miss_probability must lie in [0, 1)");
  for (DeliveryTarget t : extra_targets) {
    need(t != DeliveryTarget::FrontDoor, "extra_targets must not list front_door");
  }
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  if (key == "corpus_size") corpus_size = parse_number<int>(key, v);
  else if (key == "master_seed") master_seed = parse_number<std::uint64_t>(key, v);
  else if (key == "threads") threads = parse_number<int>(key, v);
  else if (key == "gps_offset_sigma") gps_offset_sigma = parse_number<double>(key, v);
  else if (key == "obstacle_density") obstacle_density = parse_number<double>(key, v);
  else if (key == "weight_open") weight_open = parse_number<double>(key, v);
  else if (key == "weight_recessed") weight_recessed = parse_number<double>(key, v);
  else if (key == "weight_enclosed") weight_enclosed = parse_number<double>(key, v);
  else if (key == "clearance") clearance = parse_number<double>(key, v);
  else if (key == "hover_height") hover_height = parse_number<double>(key, v);
  else if (key == "max_speed") max_speed = parse_number<double>(key, v);
  else if (key == "proposed_time_cap") proposed_time_cap = parse_number<double>(key, v);
  else if (key == "frontier_time_cap") frontier_time_cap = parse_number<double>(key, v);
  else if (key == "radius_cap") radius_cap = parse_number<double>(key, v);
  else if (key == "spot_radius") spot_radius = parse_number<double>(key, v);
  else if (key == "detector_range") detector_range = parse_number<double>(key, v);
  else if (key == "label_noise") label_noise = parse_bool(key, v);
  else if (key == "label_flip_probability") label_flip_probability = parse_number<double>(key, v);
  else if (key == "detector_miss_probability") detector_miss_probability = parse_number<double>(key, v);
  else if (key == "extra_targets") extra_targets = parse_targets(v);
  else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    try {
      if (eq == std::string_view::npos) throw std::invalid_argument("expected key = value");
      cfg.set(trim(s.substr(0, eq)), s.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(in, path);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "corpus_size = " << c.corpus_size << '\n'
    << "master_seed = " << c.master_seed << '\n'
    << "threads = " << c.threads << '\n'
    << "gps_offset_sigma = " << c.gps_offset_sigma << '\n'
    << "obstacle_density = " << c.obstacle_density << '\n'
    << "weight_open = " << c.weight_open << '\n'
    << "weight_recessed = " << c.weight_recessed << '\n'
    << "weight_enclosed = " << c.weight_enclosed << '\n'
    << "clearance = " << c.clearance << '\n'
    << "hover_height = " << c.hover_height << '\n'
    << "max_speed = " << c.max_speed << '\n'
    << "proposed_time_cap = " << c.proposed_time_cap << '\n'
    << "frontier_time_cap = " << c.frontier_time_cap << '\n'
    << "radius_cap = " << c.radius_cap << '\n'
    << "spot_radius = " << c.spot_radius << '\n'
    << "detector_range = " << c.detector_range << '\n'
    << "label_noise = " << (c.label_noise ? "true" : "false") << '\n'
    << "label_flip_probability = " << c.label_flip_probability << '\n'
    << "detector_miss_probability = " << c.detector_miss_probability << '\n'
    << "extra_targets = ";
  for (std::size_t i = 0; i < c.extra_targets.size(); ++i) s << (i ? "," : "") << to_string(c.extra_targets[i]);
  s << '\n';
  out << s.str();
}

}  // namespace doorstep
