#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "idio/geometry.hpp"

namespace idio {

struct Rect {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;

  std::vector<Segment> edges() const {
    return {{{x, y}, {x + w, y}},
            {{x + w, y}, {x + w, y + h}},
            {{x + w, y + h}, {x, y + h}},
            {{x, y + h}, {x, y}}};
  }
};

struct Marker {
  int id = 0;
  Vec2 pos;
  Segment doorway;        // crossing line; unused when has_doorway is false
  bool has_doorway = false;
  std::string room;
  bool active = true;
};

struct BlockingLine {
  Segment seg;
  int trigger = 0;  // marker id that activates this line
  bool active = false;
};

struct Pose {
  Vec2 pos;
  double theta = 0.0;
};

struct World {
  std::vector<Segment> walls;
  std::vector<Rect> obstacles;
  std::vector<Marker> markers;
  std::vector<BlockingLine> blocking;
  Pose start;
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  int goal_marker = -1;

  // All currently solid geometry: walls, obstacle edges, active blocking lines.
  std::vector<Segment> solid() const {
    std::vector<Segment> out = walls;
    for (const auto& r : obstacles)
      for (const auto& e : r.edges()) out.push_back(e);
    for (const auto& b : blocking)
      if (b.active) out.push_back(b.seg);
    return out;
  }

  const Marker* find_marker(int id) const {
    for (const auto& m : markers)
      if (m.id == id) return &m;
    return nullptr;
  }

  void deactivate_marker(int id) {
    for (auto& m : markers)
      if (m.id == id) m.active = false;
  }

  void activate_block(int id) {
    for (auto& b : blocking)
      if (b.trigger == id) b.active = true;
  }

  // Crossing a doorway closes the door behind the robot and retires the marker.
  void on_marker_passed(int id) {
    deactivate_marker(id);
    activate_block(id);
  }
};

// --- JSON (schema: walls, obstacles, markers, blocking_lines, start, bounds, goal) ---

inline nlohmann::json to_json(const Segment& s) {
  return {{"x1", s.a.x}, {"y1", s.a.y}, {"x2", s.b.x}, {"y2", s.b.y}};
}

inline Segment segment_from_json(const nlohmann::json& j) {
  return {{j.at("x1").get<double>(), j.at("y1").get<double>()},
          {j.at("x2").get<double>(), j.at("y2").get<double>()}};
}

inline nlohmann::json world_to_json(const World& w) {
  nlohmann::json j;
  for (const auto& s : w.walls) j["walls"].push_back(to_json(s));
  j["obstacles"] = nlohmann::json::array();
  for (const auto& r : w.obstacles)
    j["obstacles"].push_back({{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}});
  j["markers"] = nlohmann::json::array();
  for (const auto& m : w.markers) {
    nlohmann::json mj = {{"id", m.id}, {"x", m.pos.x}, {"y", m.pos.y}, {"room", m.room}};
    if (m.has_doorway) mj["doorway"] = to_json(m.doorway);
    j["markers"].push_back(mj);
  }
  j["blocking_lines"] = nlohmann::json::array();
  for (const auto& b : w.blocking)
    j["blocking_lines"].push_back({{"segment", to_json(b.seg)}, {"trigger", b.trigger}});
  j["start"] = {{"x", w.start.pos.x}, {"y", w.start.pos.y}, {"theta", w.start.theta}};
  j["bounds"] = {{"xmin", w.xmin}, {"xmax", w.xmax}, {"ymin", w.ymin}, {"ymax", w.ymax}};
  j["goal"] = w.goal_marker;
  return j;
}

inline World world_from_json(const nlohmann::json& j) {
  World w;
  for (const auto& s : j.at("walls")) w.walls.push_back(segment_from_json(s));
  if (j.contains("obstacles"))
    for (const auto& r : j["obstacles"])
      w.obstacles.push_back({r.at("x").get<double>(), r.at("y").get<double>(),
                             r.at("w").get<double>(), r.at("h").get<double>()});
  if (j.contains("markers"))
    for (const auto& mj : j["markers"]) {
      Marker m;
      m.id = mj.at("id").get<int>();
      m.pos = {mj.at("x").get<double>(), mj.at("y").get<double>()};
      if (mj.contains("room")) m.room = mj["room"].get<std::string>();
      if (mj.contains("doorway")) {
        m.doorway = segment_from_json(mj["doorway"]);
        m.has_doorway = true;
      }
      w.markers.push_back(m);
    }
  if (j.contains("blocking_lines"))
    for (const auto& bj : j["blocking_lines"])
      w.blocking.push_back({segment_from_json(bj.at("segment")), bj.at("trigger").get<int>(), false});
  const auto& st = j.at("start");
  w.start = {{st.at("x").get<double>(), st.at("y").get<double>()}, st.at("theta").get<double>()};
  const auto& b = j.at("bounds");
  w.xmin = b.at("xmin").get<double>();
  w.xmax = b.at("xmax").get<double>();
  w.ymin = b.at("ymin").get<double>();
  w.ymax = b.at("ymax").get<double>();
  if (j.contains("goal")) w.goal_marker = j["goal"].get<int>();
  return w;
}

inline World load_world_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file: " + path);
  nlohmann::json j;
  in >> j;
  return world_from_json(j);
}

inline void save_world_file(const std::string& path, const World& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file: " + path);
  out << world_to_json(w).dump(2) << "\n";
}

// Reflection about the vertical mid-axis x -> xmin + xmax - x.
inline World mirror_world(const World& w) {
  World m = w;
  const double X = w.xmin + w.xmax;
  auto mx = [X](Vec2 p) { return Vec2{X - p.x, p.y}; };
  auto ms = [&](const Segment& s) { return Segment{mx(s.a), mx(s.b)}; };
  for (auto& s : m.walls) s = ms(s);
  for (auto& r : m.obstacles) r.x = X - (r.x + r.w);
  for (auto& mk : m.markers) {
    mk.pos = mx(mk.pos);
    if (mk.has_doorway) mk.doorway = ms(mk.doorway);
  }
  for (auto& b : m.blocking) b.seg = ms(b.seg);
  m.start.pos = mx(m.start.pos);
  m.start.theta = wrap_angle(M_PI - m.start.theta);
  return m;
}

// The in-repo six-room maze: rooms A-C across the top, F-D across the
// bottom, doorways A->B->C->D->E->F with a marker in each and the goal
// marker mid-way through room F. All coordinates sit on a 0.25 m grid.
inline World make_maze_world() {
  World w;
  w.xmin = 0.0; w.xmax = 24.0; w.ymin = 0.0; w.ymax = 14.0;

  auto wall = [&](double x1, double y1, double x2, double y2) {
    w.walls.push_back({{x1, y1}, {x2, y2}});
  };
  // outer boundary
  wall(0, 0, 24, 0);
  wall(24, 0, 24, 14);
  wall(24, 14, 0, 14);
  wall(0, 14, 0, 0);
  // A|B divider, door at y in [9.5,11.5]
  wall(8, 7, 8, 9.5);
  wall(8, 11.5, 8, 14);
  // B|C divider, door at y in [9.5,11.5]
  wall(16, 7, 16, 9.5);
  wall(16, 11.5, 16, 14);
  // horizontal divider y=7; door C|D at x in [19,21]
  wall(0, 7, 19, 7);
  wall(21, 7, 24, 7);
  // D|E divider, door at y in [2.5,4.5]
  wall(16, 0, 16, 2.5);
  wall(16, 4.5, 16, 7);
  // E|F divider, door at y in [2.5,4.5]
  wall(8, 0, 8, 2.5);
  wall(8, 4.5, 8, 7);

  w.obstacles = {
      {3.5, 9.5, 0.75, 0.75},    // room A
      {5.0, 12.0, 0.5, 0.5},     // room A
      {11.5, 10.5, 0.75, 0.75},  // room B
      {10.0, 8.0, 0.5, 0.5},     // room B
      {18.0, 11.0, 0.5, 0.5},    // room C
      {21.0, 9.5, 0.75, 0.5},    // room C
      {19.5, 3.5, 0.5, 0.75},    // room D
      {11.5, 3.0, 0.75, 0.5},    // room E
      {13.5, 5.0, 0.5, 0.5},     // room E
  };

  auto door_marker = [&](int id, Vec2 pos, Segment doorway, const std::string& room) {
    Marker m;
    m.id = id;
    m.pos = pos;
    m.doorway = doorway;
    m.has_doorway = true;
    m.room = room;
    w.markers.push_back(m);
    w.blocking.push_back({doorway, id, false});
  };
  door_marker(0, {8.0, 10.5}, {{8, 9.5}, {8, 11.5}}, "A");
  door_marker(1, {16.0, 10.5}, {{16, 9.5}, {16, 11.5}}, "B");
  door_marker(2, {20.0, 7.0}, {{19, 7}, {21, 7}}, "C");
  door_marker(3, {16.0, 3.5}, {{16, 2.5}, {16, 4.5}}, "D");
  door_marker(4, {8.0, 3.5}, {{8, 2.5}, {8, 4.5}}, "E");

  Marker goal;
  goal.id = 5;
  goal.pos = {4.0, 3.5};
  goal.room = "F";
  w.markers.push_back(goal);
  w.goal_marker = 5;

  w.start = {{2.0, 11.5}, 0.0};
  return w;
}

}  // namespace idio
