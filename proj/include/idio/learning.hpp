#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "idio/immune.hpp"

namespace idio {

// Deterministic uniform double in [0,1) from the top 53 bits of the
// generator output; avoids the implementation-defined behaviour of
// std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Random paratope with entries in [0.50, 0.75], each row shifted so its
// mean is exactly 0.625.
inline ParatopeMatrix init_paratope(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix m(kNumAntibodies, kNumAntigens);
  const double mu_d = 0.625;
  for (std::size_t i = 0; i < kNumAntibodies; ++i) {
    for (std::size_t j = 0; j < kNumAntigens; ++j)
      m(i, j) = 0.50 + 0.25 * uniform01(rng);
    double delta = mu_d - m.row_mean(i);
    for (std::size_t j = 0; j < kNumAntigens; ++j) m(i, j) += delta;
  }
  return ParatopeMatrix(m);
}

enum class Strategy { Strong, Weak };

inline const char* to_string(Strategy s) { return s == Strategy::Strong ? "strong" : "weak"; }

struct ReinforcementConfig {
  Strategy strategy = Strategy::Strong;
  double obstacle_gain = 0.05;        // per m of obstacle-distance change
  double open_space_gain = 0.025;     // per m of average-reading change
  double movement_gain = 0.125;       // per m traveled during a stall
  double speed_gain = 0.01;           // per m/s of commanded speed
  double tracking_bonus = 0.015;
  double lost_marker_penalty = 0.025;
  double reverse_penalty = 0.01;
  double no_move_penalty = 0.004;
  double sector_change_attenuation = 4.0;
  double slow_threshold = 0.5;        // m/s
  double close_marker_area = 400.0;   // px
  double movement_epsilon = 0.01;     // m
  double centered_bearing = 5.0 * M_PI / 180.0;
};

// Antibodies that the weak strategy over-penalizes by scoring them with
// the tracking algorithm for every dominant antigen.
inline bool weakly_scored_antibody(std::size_t id) {
  switch (id) {
    case 1: case 2: case 4: case 5: case 6: case 7: case 8: case 9: case 12:
      return true;
    default:
      return false;
  }
}

// Sensor state captured at selection time and again ~0.5 s later.
struct AssessmentSnapshot {
  double min_dist_before = 0.0, min_dist_after = 0.0;
  int min_sector_before = 0, min_sector_after = 0;
  double avg_before = 0.0, avg_after = 0.0;
  double distance_traveled = 0.0;  // odometry delta over the half second
  bool marker_before = false, marker_after = false;
  double blob_bearing_after = 0.0;
  double blob_area_before = 0.0;
  double commanded_speed = 0.0;  // m/s, signed
  std::size_t dominant = 0;
  std::size_t winner = 0;
  bool winner_is_reverse = false;
};

// Change in average laser reading, applied to every score.
inline double global_term(const AssessmentSnapshot& s, const ReinforcementConfig& cfg) {
  return cfg.open_space_gain * (s.avg_after - s.avg_before);
}

inline double score_obstacle(const AssessmentSnapshot& s, const ReinforcementConfig& cfg) {
  double rf = cfg.obstacle_gain * (s.min_dist_after - s.min_dist_before);
  if (s.min_sector_after != s.min_sector_before) rf /= cfg.sector_change_attenuation;
  if (s.winner_is_reverse) rf -= cfg.reverse_penalty;
  return rf + global_term(s, cfg);
}

inline double score_open_space(const AssessmentSnapshot& s, const ReinforcementConfig& cfg) {
  double rf = global_term(s, cfg);
  if (s.winner_is_reverse && s.avg_after < s.avg_before) rf -= cfg.reverse_penalty;
  return rf;
}

// Movement only: while the robot is pinned its view can still swing as the
// heading turns, so the global term would inject sign noise here and mask
// the no-move penalty.
inline double score_stall(const AssessmentSnapshot& s, const ReinforcementConfig& cfg) {
  if (s.distance_traveled >= cfg.movement_epsilon)
    return cfg.movement_gain * s.distance_traveled;
  return -cfg.no_move_penalty;
}

inline double score_track(const AssessmentSnapshot& s, const ReinforcementConfig& cfg) {
  double rf;
  if (s.commanded_speed >= 0.0) {
    rf = cfg.speed_gain * (s.commanded_speed - cfg.slow_threshold);
  } else {
    rf = -cfg.reverse_penalty;
  }
  if (s.marker_after && s.commanded_speed >= 0.0) {
    // retreating from a marker is not tracking it, so no retention credit
    double bonus = cfg.tracking_bonus;
    if (std::abs(s.blob_bearing_after) <= cfg.centered_bearing) bonus *= 2.0;
    rf += bonus;
  } else if (s.marker_before && s.blob_area_before > cfg.close_marker_area) {
    rf -= cfg.lost_marker_penalty;
  }
  return rf + global_term(s, cfg);
}

inline double strong_rf(const AssessmentSnapshot& s, const ReinforcementConfig& cfg) {
  switch (s.dominant) {
    case 0: case 1: case 2: return score_obstacle(s, cfg);
    case 3: case 7: return score_track(s, cfg);
    case 4: return score_open_space(s, cfg);
    case 5: case 6: return score_stall(s, cfg);
    default: throw std::logic_error("unknown dominant antigen");
  }
}

inline double compute_rf(const AssessmentSnapshot& s, const ReinforcementConfig& cfg) {
  if (cfg.strategy == Strategy::Weak && weakly_scored_antibody(s.winner))
    return score_track(s, cfg);
  return strong_rf(s, cfg);
}

// Single-cell update on the winner/dominant entry; clamping lives in
// ParatopeMatrix.
inline void apply_reinforcement(ParatopeMatrix& p, std::size_t winner, std::size_t dominant,
                                double rf) {
  p.reinforce(winner, dominant, rf);
}

}  // namespace idio
