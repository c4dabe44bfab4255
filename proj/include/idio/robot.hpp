#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "idio/geometry.hpp"
#include "idio/world.hpp"

namespace idio {

inline constexpr double kMaxSpeed = 1.0;      // m/s
inline constexpr double kRobotRadius = 0.22;  // m
inline constexpr int kLaserRays = 361;

struct SensorConfig {
  double laser_max = 8.0;          // m
  double sonar_max = 5.0;          // m
  double blob_fov = M_PI / 3.0;    // 60 degrees total
  double blob_constant = 640.0;    // area px = blob_constant / d^2
  double goal_area = 1000.0;       // px
  // antigen thresholds
  double obstacle_dist = 0.6;      // m, per-side obstacle antigen
  double low_average = 2.0;        // m, antigen 4 vs antigen 3
  double rear_blocked = 0.4;       // m, antigen 6
};

struct SectorSummary {
  std::array<double, 8> sector_min{};
  double min_reading = 0.0;
  int min_sector = 0;
  int max_sector = 0;
  double average = 0.0;
};

struct BlobReading {
  bool visible = false;
  double bearing = 0.0;  // rad relative to heading
  double area = 0.0;     // px
  int marker_id = -1;
};

struct RobotState {
  Pose pose;
  double linear = 0.0;   // commanded m/s
  double angular = 0.0;  // commanded rad/s
  double odometer = 0.0; // cumulative m
  bool stalled = false;
};

// 361 equiangular rays over the front 180 degrees; sector 0 is leftmost,
// sectors 3/4 face front.
inline SectorSummary cast_laser(const std::vector<Segment>& solid, const Pose& pose,
                                const SensorConfig& cfg) {
  SectorSummary s;
  s.sector_min.fill(cfg.laser_max);
  std::array<double, 8> sector_max{};
  sector_max.fill(0.0);
  double total = 0.0;
  for (int i = 0; i < kLaserRays; ++i) {
    double bearing = M_PI / 2.0 - i * (M_PI / 360.0);
    double r = cast_ray(pose.pos, pose.theta + bearing, solid, cfg.laser_max);
    int sec = std::min(7, i / 45);
    s.sector_min[sec] = std::min(s.sector_min[sec], r);
    sector_max[sec] = std::max(sector_max[sec], r);
    total += r;
  }
  s.average = total / kLaserRays;
  s.min_reading = s.sector_min[0];
  s.min_sector = 0;
  double best_max = sector_max[0];
  for (int k = 1; k < 8; ++k) {
    if (s.sector_min[k] < s.min_reading) {
      s.min_reading = s.sector_min[k];
      s.min_sector = k;
    }
    if (sector_max[k] > best_max) {
      best_max = sector_max[k];
      s.max_sector = k;
    }
  }
  return s;
}

// Eight rays spanning the rear 180 degrees; returns the average range.
inline double rear_sonar_average(const std::vector<Segment>& solid, const Pose& pose,
                                 const SensorConfig& cfg) {
  double total = 0.0;
  for (int i = 0; i < 8; ++i) {
    double bearing = M_PI / 2.0 + (i + 0.5) * (M_PI / 8.0);
    total += cast_ray(pose.pos, pose.theta + bearing, solid, cfg.sonar_max);
  }
  return total / 8.0;
}

// Nearest active, unoccluded marker within the camera field of view.
inline BlobReading detect_blob(const World& world, const std::vector<Segment>& solid,
                               const Pose& pose, const SensorConfig& cfg) {
  BlobReading best;
  double best_dist = 1e30;
  for (const auto& m : world.markers) {
    if (!m.active) continue;
    Vec2 d = m.pos - pose.pos;
    double dist = d.norm();
    if (dist < 1e-6) continue;
    double bearing = wrap_angle(std::atan2(d.y, d.x) - pose.theta);
    if (std::abs(bearing) > cfg.blob_fov / 2.0) continue;
    if (!visible(pose.pos, m.pos, solid)) continue;
    if (dist < best_dist) {
      best_dist = dist;
      best.visible = true;
      best.bearing = bearing;
      best.area = cfg.blob_constant / (dist * dist);
      best.marker_id = m.id;
    }
  }
  return best;
}

struct SensorBundle {
  SectorSummary laser;
  double rear_average = 0.0;
  BlobReading blob;
  bool stalled = false;
};

// Antigen ids: 0 obstacle front, 1 obstacle left, 2 obstacle right,
// 3 open space, 4 low average, 5 stalled, 6 blocked behind, 7 marker seen.
inline const std::vector<std::size_t>& default_antigen_priority() {
  static const std::vector<std::size_t> p = {5, 6, 0, 1, 2, 4, 7, 3};
  return p;
}

struct AntigenReading {
  std::vector<std::size_t> presenting;
  std::size_t dominant = 0;
};

inline AntigenReading detect_antigens(const SensorBundle& s, const SensorConfig& cfg,
                                      const std::vector<std::size_t>& priority) {
  AntigenReading out;
  auto& pr = out.presenting;
  double front = std::min(s.laser.sector_min[3], s.laser.sector_min[4]);
  double left = std::min({s.laser.sector_min[0], s.laser.sector_min[1], s.laser.sector_min[2]});
  double right = std::min({s.laser.sector_min[5], s.laser.sector_min[6], s.laser.sector_min[7]});
  if (front < cfg.obstacle_dist) pr.push_back(0);
  if (left < cfg.obstacle_dist) pr.push_back(1);
  if (right < cfg.obstacle_dist) pr.push_back(2);
  // antigens 3 and 4 partition on the average threshold, so the set is never empty
  if (s.laser.average >= cfg.low_average) pr.push_back(3);
  else pr.push_back(4);
  if (s.stalled) pr.push_back(5);
  if (s.rear_average < cfg.rear_blocked) pr.push_back(6);
  if (s.blob.visible) pr.push_back(7);

  std::size_t best_rank = priority.size();
  for (std::size_t a : pr)
    for (std::size_t k = 0; k < priority.size(); ++k)
      if (priority[k] == a && k < best_rank) {
        best_rank = k;
        out.dominant = a;
      }
  return out;
}

enum class BehaviorKind { Fixed, WanderMaxGap, TrackMarker };

struct Antibody {
  std::size_t id = 0;
  BehaviorKind kind = BehaviorKind::Fixed;
  double linear = 0.0;   // m/s
  double angular = 0.0;  // rad/s, Fixed only
  const char* name = "";

  bool is_reverse() const { return linear < 0.0; }
};

inline constexpr double deg(double d) { return d * M_PI / 180.0; }

// The 16-behavior repertoire. Ids are fixed; 10/11/13/14 are the reverse
// family, 12 wanders toward the widest laser gap, 15 tracks door markers.
inline const std::array<Antibody, 16>& antibody_repertoire() {
  static const std::array<Antibody, 16> reps = {{
      {0, BehaviorKind::Fixed, 1.0, 0.0, "forward_fast"},
      {1, BehaviorKind::Fixed, 0.5, deg(30), "forward_left30"},
      {2, BehaviorKind::Fixed, 0.5, -deg(30), "forward_right30"},
      {3, BehaviorKind::Fixed, 0.5, 0.0, "forward_medium"},
      {4, BehaviorKind::Fixed, 0.5, deg(60), "forward_left60"},
      {5, BehaviorKind::Fixed, 0.5, -deg(60), "forward_right60"},
      {6, BehaviorKind::Fixed, 0.2, deg(30), "slow_left30"},
      {7, BehaviorKind::Fixed, 0.2, -deg(30), "slow_right30"},
      {8, BehaviorKind::Fixed, 0.2, deg(60), "slow_left60"},
      {9, BehaviorKind::Fixed, 0.2, -deg(60), "slow_right60"},
      {10, BehaviorKind::Fixed, -0.2, 0.0, "reverse_slow"},
      {11, BehaviorKind::Fixed, -0.2, deg(30), "reverse_left30"},
      {12, BehaviorKind::WanderMaxGap, 0.5, 0.0, "wander_max_gap"},
      {13, BehaviorKind::Fixed, -0.2, -deg(30), "reverse_right30"},
      {14, BehaviorKind::Fixed, -0.5, 0.0, "reverse_fast"},
      {15, BehaviorKind::TrackMarker, 0.5, 0.0, "track_marker"},
  }};
  return reps;
}

struct StepResult {
  bool collided = false;
  std::vector<int> markers_crossed;
};

// One kinematic sub-step with disc-vs-segment collision handling. Heading
// always advances; a blocked translation stalls the robot in place, so only
// a motion away from the contact can free it.
inline StepResult step_robot(const World& world, const std::vector<Segment>& solid,
                             RobotState& st, double v, double w, double dt) {
  StepResult res;
  st.pose.theta = wrap_angle(st.pose.theta + w * dt);
  Vec2 delta{v * std::cos(st.pose.theta) * dt, v * std::sin(st.pose.theta) * dt};
  Vec2 from = st.pose.pos;

  auto blocked = [&](Vec2 p) -> bool {
    for (const auto& s : solid)
      if (point_segment_distance(p, s) < kRobotRadius) return true;
    return false;
  };

  Vec2 target = from + delta;
  if (blocked(target)) {
    res.collided = true;
    target = from;
  }
  st.pose.pos = target;
  st.odometer += (target - from).norm();

  // doorway crossings along the path
  Segment path{from, target};
  for (const auto& m : world.markers) {
    if (!m.active || !m.has_doorway) continue;
    if (segments_intersect(path, m.doorway)) res.markers_crossed.push_back(m.id);
  }
  return res;
}

}  // namespace idio
