#pragma once

#include "doorstep/world.hpp"

#include <iosfwd>
#include <string>

namespace doorstep {

/// World JSON, schema "doorstep.world/1": points are [x, y] pairs in meters,
/// labels use label_name(), door modes use to_string(DoorVisibility).
void write_world_json(std::ostream& out, const WorldModel& world);
WorldModel read_world_json(std::istream& in);  // throws std::runtime_error

void save_world(const std::string& path, const WorldModel& world);  // throws std::runtime_error
WorldModel load_world(const std::string& path);                      // throws std::runtime_error

}  // namespace doorstep
