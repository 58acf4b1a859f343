#include "doorstep/io.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace doorstep {

using nlohmann::json;

namespace {

json point(const Vec2& p) { return json::array({p.x(), p.y()}); }

Vec2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("expected an [x, y] pair");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

json polygon(const Polygon& poly) {
  json out = json::array();
  for (const Vec2& p : poly) out.push_back(point(p));
  return out;
}

Polygon polygon_from(const json& j) {
  Polygon out;
  for (const json& p : j) out.push_back(point_from(p));
  return out;
}

ClassLabel label_from_name(const std::string& name) {
  for (int i = 0; i < kClassCount; ++i) {
    if (label_name(static_cast<ClassLabel>(i)) == name) return static_cast<ClassLabel>(i);
  }
  throw std::runtime_error("unknown class label '" + name + "'");
}

}  // namespace

void write_world_json(std::ostream& out, const WorldModel& w) {
  json j;
  j["schema"] = WorldModel::kSchema;
  j["seed"] = w.seed;
  j["size"] = point(w.size);
  json houses = json::array();
  for (const House& h : w.houses) houses.push_back({{"footprint", polygon(h.footprint)}, {"recipient", h.recipient}});
  j["houses"] = houses;
  json regions = json::array();
  for (const Region& r : w.regions) regions.push_back({{"label", label_name(r.label)}, {"polygon", polygon(r.polygon)}});
  j["regions"] = regions;
  j["door"] = {{"center", point(w.door.center)},
               {"width", w.door.width},
               {"normal", point(w.door.normal)},
               {"visibility", to_string(w.door.visibility)}};
  j["front_direction"] = point(w.front_direction);
  j["front_yard"] = polygon(w.front_yard);
  j["back_yard"] = polygon(w.back_yard);
  json paved = json::array();
  for (const Polygon& p : w.front_paved) paved.push_back(polygon(p));
  j["front_paved"] = paved;
  j["start"] = {{"x", w.start.x}, {"y", w.start.y}, {"altitude", w.start.altitude}, {"yaw", w.start.yaw}};
  out << j.dump(1) << '\n';
}

WorldModel read_world_json(std::istream& in) {
  WorldModel w;
  try {
    const json j = json::parse(in);
    if (j.value("schema", "") != WorldModel::kSchema) {
      throw std::runtime_error("expected schema " + std::string(WorldModel::kSchema));
    }
    w.seed = j.at("seed").get<std::uint64_t>();
    w.size = point_from(j.at("size"));
    for (const json& h : j.at("houses")) w.houses.push_back({polygon_from(h.at("footprint")), h.at("recipient").get<bool>()});
    for (const json& r : j.at("regions")) {
      w.regions.push_back({label_from_name(r.at("label").get<std::string>()), polygon_from(r.at("polygon"))});
    }
    const json& d = j.at("door");
    w.door.center = point_from(d.at("center"));
    w.door.width = d.at("width").get<double>();
    w.door.normal = point_from(d.at("normal"));
    w.door.visibility = door_visibility_from_string(d.at("visibility").get<std::string>());
    w.front_direction = point_from(j.at("front_direction"));
    w.front_yard = polygon_from(j.at("front_yard"));
    w.back_yard = polygon_from(j.at("back_yard"));
    for (const json& p : j.at("front_paved")) w.front_paved.push_back(polygon_from(p));
    const json& s = j.at("start");
    w.start = DronePose{s.at("x").get<double>(), s.at("y").get<double>(), s.at("altitude").get<double>(),
                        s.at("yaw").get<double>()};
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("world json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("world json: ") + e.what());
  }
  return w;
}

void save_world(const std::string& path, const WorldModel& world) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_world_json(out, world);
  if (!out) throw std::runtime_error("write failed: " + path);
}

WorldModel load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_world_json(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace doorstep
