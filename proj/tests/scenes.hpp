#pragma once

// Small hand-built worlds for sensor and navigation tests.

#include "doorstep/world.hpp"

namespace scenes {

using namespace doorstep;

/// 40 x 40 m plot: road along y in [0, 3], house (15,12)-(25,20) with the door
/// in the middle of its front wall (y = 12) facing -y, a walkway to the road.
inline WorldModel plain_house() {
  WorldModel w;
  w.seed = 0;
  w.size = Vec2(40.0, 40.0);
  w.houses.push_back({rectangle(15.0, 12.0, 25.0, 20.0), true});
  w.regions.push_back({ClassLabel::PavedArea, rectangle(0.0, 0.0, 40.0, 3.0)});
  w.regions.push_back({ClassLabel::PavedArea, rectangle(19.0, 3.0, 21.0, 12.0)});
  w.door = Door{Vec2(20.0, 12.0), 1.0, Vec2(0.0, -1.0), DoorVisibility::Open};
  w.front_direction = Vec2(0.0, -1.0);
  w.front_yard = rectangle(0.0, 0.0, 40.0, 16.0);
  w.back_yard = rectangle(0.0, 16.0, 40.0, 40.0);
  w.front_paved = {rectangle(0.0, 0.0, 40.0, 3.0), rectangle(19.0, 3.0, 21.0, 12.0)};
  w.start = DronePose{20.0, 16.0, 25.0, 0.0};
  return w;
}

}  // namespace scenes
