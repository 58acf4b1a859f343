#pragma once

#include "doorstep/config.hpp"
#include "doorstep/descent.hpp"
#include "doorstep/flight.hpp"
#include "doorstep/world.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace doorstep {

enum class Method : std::uint8_t { Proposed, Frontier };

/// Union of descent and delivery outcomes, plus Error for anything that threw.
enum class TrialStatus : std::uint8_t {
  Delivered,
  DoorNotFound,
  Timeout,
  Stuck,
  NoRoofVisible,
  NoFrontPavedArea,
  NoSafeSpot,
  WrongRoof,
  Error,
};

std::string_view to_string(Method m);
std::string_view to_string(TrialStatus s);
Method method_from_string(std::string_view s);            // throws std::invalid_argument
TrialStatus trial_status_from_string(std::string_view s);  // throws std::invalid_argument

struct TrialResult {
  std::uint64_t seed = 0;
  Method method = Method::Proposed;
  DeliveryTarget target = DeliveryTarget::FrontDoor;
  DoorVisibility door_mode = DoorVisibility::Open;
  TrialStatus status = TrialStatus::Error;
  double elapsed = 0.0;      // s, simulated, from the GPS arrival pose
  double path_length = 0.0;  // m, 3D
  bool has_descent_point = false;
  Vec2 descent_point = Vec2::Zero();
  Vec2 final_point = Vec2::Zero();  // where the drone ended up
  bool in_target_region = false;    // ground-truth scoring of the delivery spot
  std::string message;              // error text, if any
  std::vector<TimedPose> trajectory;
};

/// Stable 64-bit mix used to derive per-trial seeds from the master seed.
std::uint64_t splitmix64(std::uint64_t x);

/// World seed of corpus entry `index`.
std::uint64_t corpus_seed(std::uint64_t master_seed, int index);

GeneratorParams world_params(std::uint64_t seed, const ExperimentConfig& config);
WorldModel make_world(std::uint64_t seed, const ExperimentConfig& config);

/// Never throws for pipeline failures: they come back as statuses.
TrialResult run_trial(std::uint64_t seed, Method method, DeliveryTarget target, const ExperimentConfig& config);

/// All trials of the corpus in a fixed order: per seed, Proposed and Frontier
/// to the front door, then Proposed to each extra target. Runs on
/// `config.threads` workers; the order of results does not depend on them.
std::vector<TrialResult> run_trials(const ExperimentConfig& config,
                                    const std::function<void(const TrialResult&)>& on_done = nullptr);

struct MethodStats {
  Method method = Method::Proposed;
  DeliveryTarget target = DeliveryTarget::FrontDoor;
  int trials = 0;
  int delivered = 0;
  int timeouts = 0;
  double mean_elapsed = 0.0;  // over all trials, failures at their elapsed time
  double stddev_elapsed = 0.0;  // sample, 0 for a single trial
  double success_rate = 0.0;
};

struct Report {
  static constexpr std::string_view kSchema = "doorstep.report/1";

  std::vector<MethodStats> stats;  // front-door Proposed, front-door Frontier, then extra targets
  double speedup = 0.0;            // Frontier mean / Proposed mean at the front door, 0 if either is missing
  std::vector<TrialResult> rows;   // trajectories dropped

  const MethodStats* find(Method m, DeliveryTarget t) const;
};

Report summarize(const std::vector<TrialResult>& trials);

void write_trials_jsonl(std::ostream& out, const std::vector<TrialResult>& trials);
std::vector<TrialResult> read_trials_jsonl(std::istream& in);  // throws std::runtime_error with the line number
void write_report_csv(std::ostream& out, const Report& report);
void write_report_json(std::ostream& out, const Report& report);

/// Runs the corpus and writes trials.jsonl, report.csv and report.json into
/// `out_dir` (created if missing). I/O errors name the file.
Report run_corpus(const ExperimentConfig& config, const std::string& out_dir,
                  const std::function<void(const TrialResult&)>& on_done = nullptr);

/// Trajectory over the color-coded scene: regions, houses, door, descent
/// point and the delivery spot. Throws std::invalid_argument for an empty
/// trajectory (nothing is written) and std::runtime_error on I/O failure.
void emit_trajectory_svg(const TrialResult& trial, const WorldModel& world, const std::string& path);
void write_trajectory_svg(std::ostream& out, const TrialResult& trial, const WorldModel& world);

}  // namespace doorstep
