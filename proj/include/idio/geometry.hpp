#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace idio {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

struct Segment {
  Vec2 a, b;
};

// Distance from ray origin along direction dir (unit) to the segment, or
// nullopt if the ray misses.
inline std::optional<double> ray_segment(Vec2 origin, Vec2 dir, const Segment& s) {
  Vec2 v = s.b - s.a;
  double denom = dir.cross(v);
  if (std::abs(denom) < 1e-12) return std::nullopt;  // parallel
  Vec2 w = s.a - origin;
  double t = w.cross(v) / denom;        // along the ray
  double u = w.cross(dir) / denom;      // along the segment
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

inline double point_segment_distance(Vec2 p, const Segment& s) {
  Vec2 v = s.b - s.a;
  double len2 = v.dot(v);
  if (len2 <= 0.0) return (p - s.a).norm();
  double t = std::clamp((p - s.a).dot(v) / len2, 0.0, 1.0);
  return (p - (s.a + v * t)).norm();
}

inline bool segments_intersect(const Segment& s1, const Segment& s2) {
  Vec2 r = s1.b - s1.a;
  Vec2 s = s2.b - s2.a;
  double denom = r.cross(s);
  Vec2 w = s2.a - s1.a;
  if (std::abs(denom) < 1e-12) return false;  // parallel treated as non-crossing
  double t = w.cross(s) / denom;
  double u = w.cross(r) / denom;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

// Shortest ray hit over a segment set, clipped to max_range.
inline double cast_ray(Vec2 origin, double angle, const std::vector<Segment>& segs,
                       double max_range) {
  Vec2 dir{std::cos(angle), std::sin(angle)};
  double best = max_range;
  for (const auto& s : segs) {
    auto t = ray_segment(origin, dir, s);
    if (t && *t < best) best = *t;
  }
  return best;
}

// Line of sight between two points against a segment set.
inline bool visible(Vec2 from, Vec2 to, const std::vector<Segment>& segs) {
  Segment line{from, to};
  for (const auto& s : segs)
    if (segments_intersect(line, s)) return false;
  return true;
}

inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace idio
