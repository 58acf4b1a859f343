#include "doorstep/harness.hpp"

#include "doorstep/baseline.hpp"
#include "doorstep/navigation.hpp"
#include "doorstep/occupancy.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace doorstep {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 2> kMethodNames{"proposed", "frontier"};
constexpr std::array<std::string_view, 9> kStatusNames{"delivered",       "door_not_found", "timeout",
                                                       "stuck",           "no_roof_visible", "no_front_paved_area",
                                                       "no_safe_spot",    "wrong_roof",      "error"};

TrialStatus from_descent(DescentStatus s) {
  switch (s) {
    case DescentStatus::Success: return TrialStatus::Delivered;
    case DescentStatus::NoRoofVisible: return TrialStatus::NoRoofVisible;
    case DescentStatus::NoFrontPavedArea: return TrialStatus::NoFrontPavedArea;
    case DescentStatus::NoSafeSpot: return TrialStatus::NoSafeSpot;
    case DescentStatus::WrongRoof: return TrialStatus::WrongRoof;
  }
  return TrialStatus::Error;
}

TrialStatus from_delivery(DeliveryStatus s) {
  switch (s) {
    case DeliveryStatus::Delivered: return TrialStatus::Delivered;
    case DeliveryStatus::DoorNotFound: return TrialStatus::DoorNotFound;
    case DeliveryStatus::Timeout: return TrialStatus::Timeout;
    case DeliveryStatus::Stuck: return TrialStatus::Stuck;
  }
  return TrialStatus::Error;
}

double trajectory_length(const std::vector<TimedPose>& traj) {
  double len = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) len += (traj[i].pose.xyz() - traj[i - 1].pose.xyz()).norm();
  return len;
}

NavigationConfig navigation_config(std::uint64_t seed, const ExperimentConfig& cfg) {
  NavigationConfig nav;
  nav.detector.max_range = cfg.detector_range;
  nav.detector.miss_probability = cfg.detector_miss_probability;
  nav.time_cap = cfg.proposed_time_cap;
  nav.seed = splitmix64(seed ^ 0x6e6176ULL);
  return nav;
}

// Landed within reach of the door, on its outside.
bool at_door(const WorldModel& w, const Vec2& p, double offset) {
  const Vec2 d = p - w.door.center;
  return d.dot(w.door.normal) > 0.0 && d.norm() <= offset + 0.5;
}

bool in_region(const WorldModel& w, const Vec2& p, DeliveryTarget t) {
  switch (t) {
    case DeliveryTarget::FrontDoor: return false;
    case DeliveryTarget::FrontPavedArea: return w.in_front_paved(p);
    case DeliveryTarget::BackYard: return w.class_at(p) == ClassLabel::Grass && w.yard_side(p) == Side::Back;
    case DeliveryTarget::FrontYard: return w.class_at(p) == ClassLabel::Grass && w.yard_side(p) == Side::Front;
  }
  return false;
}

void run_proposed(TrialResult& r, Flight& flight, const WorldModel& w, const ExperimentConfig& cfg) {
  DescentConfig dc;
  dc.clearance = cfg.clearance;
  dc.hover_height = cfg.hover_height;
  dc.dt = flight.dt();
  dc.max_speed = cfg.max_speed;
  if (cfg.label_noise) {
    dc.noise.set(ClassLabel::Grass, ClassLabel::PavedArea, cfg.label_flip_probability);
    dc.noise.set(ClassLabel::PavedArea, ClassLabel::Grass, cfg.label_flip_probability);
    dc.noise.seed = splitmix64(r.seed ^ 0x6e6f697365ULL);
  }
  const CameraModel cam;
  const DescentOutcome d = run_descent(flight, w, r.target, cam, dc);
  r.status = from_descent(d.status);
  r.elapsed = flight.time();
  r.trajectory = flight.trajectory();
  r.final_point = flight.pose().xy();
  if (d.status != DescentStatus::Success) return;
  r.has_descent_point = true;
  r.descent_point = d.descent_point;

  if (r.target == DeliveryTarget::FrontDoor) {
    const OccupancyGrid occ = build_occupancy(d.capture_grid, cam, d.capture_pose.altitude, d.capture_pose.xy());
    const NavigationConfig nav = navigation_config(r.seed, cfg);
    const DeliveryOutcome o = deliver_to_front_door(flight, w, occ, d.capture_roof, nav);
    r.status = from_delivery(o.status);
    r.elapsed = o.elapsed;
    r.trajectory = o.trajectory;
    r.final_point = r.trajectory.back().pose.xy();
    r.in_target_region = o.status == DeliveryStatus::Delivered && at_door(w, r.final_point, nav.approach_offset);
    return;
  }
  // Yard and paved targets: straight down from hover.
  const Vec3 ground(d.descent_point.x(), d.descent_point.y(), 0.0);
  while (!flight.step_toward(ground)) {
  }
  r.trajectory = flight.trajectory();
  r.final_point = flight.pose().xy();
  if (flight.time() > cfg.proposed_time_cap) {
    r.status = TrialStatus::Timeout;
    r.elapsed = cfg.proposed_time_cap;
  } else {
    r.status = TrialStatus::Delivered;
    r.elapsed = flight.time();
  }
  r.in_target_region = in_region(w, r.descent_point, r.target);
}

void run_frontier(TrialResult& r, Flight& flight, const WorldModel& w, const ExperimentConfig& cfg) {
  std::mt19937_64 rng(splitmix64(r.seed ^ 0x73706f74ULL));
  const Vec2 spot = random_front_spot(w, cfg.clearance, cfg.spot_radius, rng);
  r.has_descent_point = true;
  r.descent_point = spot;
  descend_at(flight, spot, cfg.hover_height);
  FrontierConfig fc;
  fc.nav = navigation_config(r.seed, cfg);
  fc.radius_cap = cfg.radius_cap;
  fc.time_cap = cfg.frontier_time_cap;
  fc.spot_radius = cfg.spot_radius;
  fc.clearance = cfg.clearance;
  fc.hover_height = cfg.hover_height;
  const DeliveryOutcome o = frontier_explore_to_door(flight, w, fc);
  r.status = from_delivery(o.status);
  r.elapsed = o.elapsed;
  r.trajectory = o.trajectory;
  r.final_point = r.trajectory.back().pose.xy();
  r.in_target_region = o.status == DeliveryStatus::Delivered && at_door(w, r.final_point, fc.nav.approach_offset);
}

std::string fmt(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

json trial_json(const TrialResult& t, bool with_trajectory) {
  json j;
  j["schema"] = "doorstep.trial/1";
  j["seed"] = t.seed;
  j["method"] = to_string(t.method);
  j["target"] = to_string(t.target);
  j["door_mode"] = to_string(t.door_mode);
  j["status"] = to_string(t.status);
  j["elapsed"] = t.elapsed;
  j["path_length"] = t.path_length;
  j["descent_point"] = t.has_descent_point ? json::array({t.descent_point.x(), t.descent_point.y()}) : json(nullptr);
  j["final_point"] = json::array({t.final_point.x(), t.final_point.y()});
  j["in_target_region"] = t.in_target_region;
  if (!t.message.empty()) j["message"] = t.message;
  if (with_trajectory) {
    json traj = json::array();
    for (const TimedPose& p : t.trajectory) {
      traj.push_back(json::array({p.t, p.pose.x, p.pose.y, p.pose.altitude, p.pose.yaw}));
    }
    j["trajectory"] = std::move(traj);
  }
  return j;
}

TrialResult trial_from_json(const json& j) {
  if (j.value("schema", "") != "doorstep.trial/1") throw std::runtime_error("expected schema doorstep.trial/1");
  TrialResult t;
  t.seed = j.at("seed").get<std::uint64_t>();
  t.method = method_from_string(j.at("method").get<std::string>());
  t.target = delivery_target_from_string(j.at("target").get<std::string>());
  t.door_mode = door_visibility_from_string(j.at("door_mode").get<std::string>());
  t.status = trial_status_from_string(j.at("status").get<std::string>());
  t.elapsed = j.at("elapsed").get<double>();
  t.path_length = j.at("path_length").get<double>();
  const json& dp = j.at("descent_point");
  t.has_descent_point = !dp.is_null();
  if (t.has_descent_point) t.descent_point = Vec2(dp.at(0).get<double>(), dp.at(1).get<double>());
  const json& fp = j.at("final_point");
  t.final_point = Vec2(fp.at(0).get<double>(), fp.at(1).get<double>());
  t.in_target_region = j.at("in_target_region").get<bool>();
  t.message = j.value("message", "");
  if (j.contains("trajectory")) {
    for (const json& p : j.at("trajectory")) {
      t.trajectory.push_back({p.at(0).get<double>(), DronePose{p.at(1).get<double>(), p.at(2).get<double>(),
                                                               p.at(3).get<double>(), p.at(4).get<double>()}});
    }
  }
  return t;
}

MethodStats stats_for(Method m, DeliveryTarget target, const std::vector<TrialResult>& trials) {
  MethodStats s;
  s.method = m;
  s.target = target;
  double sum = 0.0;
  for (const TrialResult& t : trials) {
    if (t.method != m || t.target != target) continue;
    ++s.trials;
    if (t.status == TrialStatus::Delivered) ++s.delivered;
    if (t.status == TrialStatus::Timeout) ++s.timeouts;
    sum += t.elapsed;
  }
  if (s.trials == 0) return s;
  s.mean_elapsed = sum / s.trials;
  if (s.trials > 1) {
    double ss = 0.0;
    for (const TrialResult& t : trials) {
      if (t.method == m && t.target == target) ss += (t.elapsed - s.mean_elapsed) * (t.elapsed - s.mean_elapsed);
    }
    s.stddev_elapsed = std::sqrt(ss / (s.trials - 1));
  }
  s.success_rate = static_cast<double>(s.delivered) / s.trials;
  return s;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

std::string_view to_string(Method m) { return kMethodNames.at(static_cast<std::size_t>(m)); }
std::string_view to_string(TrialStatus s) { return kStatusNames.at(static_cast<std::size_t>(s)); }

Method method_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == s) return static_cast<Method>(i);
  }
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

TrialStatus trial_status_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
    if (kStatusNames[i] == s) return static_cast<TrialStatus>(i);
  }
  throw std::invalid_argument("unknown trial status '" + std::string(s) + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t corpus_seed(std::uint64_t master_seed, int index) {
  return splitmix64(master_seed + static_cast<std::uint64_t>(index) * 0x9e3779b97f4a7c15ULL);
}

GeneratorParams world_params(std::uint64_t seed, const ExperimentConfig& config) {
  GeneratorParams p;
  p.seed = seed;
  p.gps_offset_sigma = config.gps_offset_sigma;
  p.obstacle_density = config.obstacle_density;
  // Door mode from its own stream so the weights do not shift the layout draw.
  const double total = config.weight_open + config.weight_recessed + config.weight_enclosed;
  const double u = static_cast<double>(splitmix64(seed ^ 0x646f6f72ULL) >> 11) * 0x1.0p-53 * total;
  if (u < config.weight_open) {
    p.door_mode = DoorVisibility::Open;
  } else if (u < config.weight_open + config.weight_recessed) {
    p.door_mode = DoorVisibility::Recessed;
  } else {
    p.door_mode = DoorVisibility::Enclosed;
  }
  return p;
}

WorldModel make_world(std::uint64_t seed, const ExperimentConfig& config) {
  return generate_world(world_params(seed, config));
}

TrialResult run_trial(std::uint64_t seed, Method method, DeliveryTarget target, const ExperimentConfig& config) {
  TrialResult r;
  r.seed = seed;
  r.method = method;
  r.target = target;
  std::optional<Flight> flight;
  try {
    config.validate();
    if (method == Method::Frontier && target != DeliveryTarget::FrontDoor) {
      throw std::invalid_argument("the frontier baseline only delivers to the front door");
    }
    const WorldModel w = make_world(seed, config);
    r.door_mode = w.door.visibility;
    flight.emplace(w.start, 0.1, config.max_speed);
    if (method == Method::Proposed) {
      run_proposed(r, *flight, w, config);
    } else {
      run_frontier(r, *flight, w, config);
    }
  } catch (const std::exception& e) {
    r.status = TrialStatus::Error;
    r.message = e.what();
    if (flight) {
      r.elapsed = flight->time();
      r.trajectory = flight->trajectory();
      r.final_point = flight->pose().xy();
    }
  }
  r.path_length = trajectory_length(r.trajectory);
  return r;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config,
                                    const std::function<void(const TrialResult&)>& on_done) {
  config.validate();
  struct Job {
    std::uint64_t seed;
    Method method;
    DeliveryTarget target;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < config.corpus_size; ++i) {
    const std::uint64_t seed = corpus_seed(config.master_seed, i);
    jobs.push_back({seed, Method::Proposed, DeliveryTarget::FrontDoor});
    jobs.push_back({seed, Method::Frontier, DeliveryTarget::FrontDoor});
    for (DeliveryTarget t : config.extra_targets) jobs.push_back({seed, Method::Proposed, t});
  }

  std::vector<TrialResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      results[i] = run_trial(jobs[i].seed, jobs[i].method, jobs[i].target, config);
      if (on_done) {
        std::lock_guard<std::mutex> lock(report_mutex);
        on_done(results[i]);
      }
    }
  };
  const int n = std::min<int>(config.threads, static_cast<int>(jobs.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

const MethodStats* Report::find(Method m, DeliveryTarget t) const {
  for (const MethodStats& s : stats) {
    if (s.method == m && s.target == t) return &s;
  }
  return nullptr;
}

Report summarize(const std::vector<TrialResult>& trials) {
  Report rep;
  std::vector<std::pair<Method, DeliveryTarget>> keys{{Method::Proposed, DeliveryTarget::FrontDoor},
                                                      {Method::Frontier, DeliveryTarget::FrontDoor}};
  for (const TrialResult& t : trials) {
    const std::pair<Method, DeliveryTarget> k{t.method, t.target};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  for (const auto& [m, t] : keys) {
    MethodStats s = stats_for(m, t, trials);
    if (s.trials > 0) rep.stats.push_back(s);
  }
  const MethodStats* p = rep.find(Method::Proposed, DeliveryTarget::FrontDoor);
  const MethodStats* f = rep.find(Method::Frontier, DeliveryTarget::FrontDoor);
  if (p && f && p->mean_elapsed > 0.0) rep.speedup = f->mean_elapsed / p->mean_elapsed;
  rep.rows = trials;
  for (TrialResult& r : rep.rows) r.trajectory.clear();
  return rep;
}

void write_trials_jsonl(std::ostream& out, const std::vector<TrialResult>& trials) {
  for (const TrialResult& t : trials) out << trial_json(t, true).dump() << '\n';
}

std::vector<TrialResult> read_trials_jsonl(std::istream& in) {
  std::vector<TrialResult> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trial_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("trials line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_report_csv(std::ostream& out, const Report& report) {
  out << "seed,method,target,door_mode,status,elapsed_s,path_length_m,descent_x,descent_y,final_x,final_y,"
         "in_target_region\n";
  for (const TrialResult& t : report.rows) {
    out << t.seed << ',' << to_string(t.method) << ',' << to_string(t.target) << ',' << to_string(t.door_mode) << ','
        << to_string(t.status) << ',' << fmt(t.elapsed) << ',' << fmt(t.path_length) << ','
        << (t.has_descent_point ? fmt(t.descent_point.x()) : "") << ','
        << (t.has_descent_point ? fmt(t.descent_point.y()) : "") << ',' << fmt(t.final_point.x()) << ','
        << fmt(t.final_point.y()) << ',' << (t.in_target_region ? 1 : 0) << '\n';
  }
}

void write_report_json(std::ostream& out, const Report& report) {
  json j;
  j["schema"] = Report::kSchema;
  json stats = json::array();
  for (const MethodStats& s : report.stats) {
    stats.push_back({{"method", to_string(s.method)},
                     {"target", to_string(s.target)},
                     {"trials", s.trials},
                     {"delivered", s.delivered},
                     {"timeouts", s.timeouts},
                     {"mean_elapsed", s.mean_elapsed},
                     {"stddev_elapsed", s.stddev_elapsed},
                     {"success_rate", s.success_rate}});
  }
  j["stats"] = stats;
  j["speedup"] = report.speedup;
  // Both readings of the ratio: "x times as fast" and "percent faster".
  j["percent_faster"] = report.speedup > 0.0 ? (report.speedup - 1.0) * 100.0 : 0.0;
  json rows = json::array();
  for (const TrialResult& t : report.rows) rows.push_back(trial_json(t, false));
  j["rows"] = rows;
  out << j.dump(1) << '\n';
}

Report run_corpus(const ExperimentConfig& config, const std::string& out_dir,
                  const std::function<void(const TrialResult&)>& on_done) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  const std::vector<TrialResult> trials = run_trials(config, on_done);
  const Report report = summarize(trials);
  const auto write = [&](const char* name, const auto& fn) {
    const fs::path p = dir / name;
    std::ofstream out = open_out(p);
    fn(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + p.string());
  };
  write("trials.jsonl", [&](std::ostream& o) { write_trials_jsonl(o, trials); });
  write("report.csv", [&](std::ostream& o) { write_report_csv(o, report); });
  write("report.json", [&](std::ostream& o) { write_report_json(o, report); });
  return report;
}

}  // namespace doorstep
