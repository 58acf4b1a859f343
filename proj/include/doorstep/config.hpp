#pragma once

#include "doorstep/descent.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace doorstep {

/// Everything a batch run depends on. Text form is one `key = value` per line,
/// `#` starts a comment, unknown keys are errors. Keys match the field names.
struct ExperimentConfig {
  int corpus_size = 20;
  std::uint64_t master_seed = 1;
  int threads = 1;

  // Scene generation.
  double gps_offset_sigma = 1.0;  // m
  double obstacle_density = 0.5;
  double weight_open = 0.7;       // door-mode draw weights, normalized on use
  double weight_recessed = 0.3;
  double weight_enclosed = 0.0;

  // Flight and pipeline.
  double clearance = 2.5;      // m
  double hover_height = 2.0;   // m
  double max_speed = 0.5;      // m/s
  double proposed_time_cap = 300.0;  // s
  double frontier_time_cap = 180.0;  // s
  double radius_cap = 25.0;          // m, frontier goals around the baseline's landing spot
  double spot_radius = 15.0;         // m, baseline landing spot around the house center
  double detector_range = 8.0;       // m

  // Noise toggles.
  bool label_noise = false;
  double label_flip_probability = 0.05;  // grass <-> paved and obstacle -> grass blobs
  double detector_miss_probability = 0.0;

  // Proposed-only extra targets run on every seed.
  std::vector<DeliveryTarget> extra_targets{DeliveryTarget::FrontPavedArea, DeliveryTarget::BackYard,
                                            DeliveryTarget::FrontYard};

  void validate() const;  // throws std::invalid_argument

  /// Applies one key; throws std::invalid_argument naming the key.
  void set(std::string_view key, std::string_view value);
};

/// `source` names the input in error messages.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);  // throws std::runtime_error
void write_config(std::ostream& out, const ExperimentConfig& config);

}  // namespace doorstep
