#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "idio/immune.hpp"
#include "idio/learning.hpp"
#include "idio/robot.hpp"
#include "idio/world.hpp"

namespace idio {

struct StallSequence {
  long start_tick = 0;
  int length = 0;
  std::vector<std::size_t> antibodies;
  bool escape_by_difference = false;
};

struct RateSet {
  double reinforcement_success = 0.0;  // % of scored ticks with rf > 0
  double antibody_change = 0.0;        // % of decisions differing from the previous
  double idiotypic_difference = 0.0;   // % of scored ticks with stage1 != final
  double idiotypic_success = 0.0;      // % of difference ticks with rf > 0
};

struct RunRecord {
  std::string system;
  ImmuneParams params;
  Strategy strategy = Strategy::Strong;
  std::string world_id;
  std::string paratope_id;
  std::uint64_t seed = 0;
  double t = 0.0;
  int n_s = 0;
  double score = 0.0;
  bool completed = false;
  RateSet overall;
  RateSet in_stall;
  std::vector<StallSequence> sequences;
  int long_stall_count = 0;
  double long_stall_mean_length = 0.0;
  double long_stall_change_rate = 0.0;  // % antibody changes within long sequences
  int decision_ticks = 0;
  int scored_ticks = 0;
  int positive_rf = 0, negative_rf = 0, zero_rf = 0;
};

struct RunSetup {
  World world;
  ParatopeMatrix paratope;
  IdiotopeMatrix idiotope;
  ImmuneParams params;
  ReinforcementConfig reinforcement;
  SensorConfig sensors;
  std::vector<std::size_t> priority = default_antigen_priority();
  std::uint64_t seed = 0;
  double timeout = 1200.0;     // simulated seconds
  double dt = 0.1;             // control loop period
  double start_jitter_pos = 0.02;              // m
  double start_jitter_theta = deg(3.0);        // rad
  double actuation_noise_linear = 0.05;        // fractional speed jitter
  double actuation_noise_angular = deg(4.0);   // rad/s jitter
  double phi = 9.08;           // score coefficient
  std::string world_id = "maze";
  std::string paratope_id;
  std::ostream* trace_out = nullptr;       // JSON-lines SelectionTrace stream
  std::ostream* trajectory_out = nullptr;  // CSV trajectory log
};

struct RunResult {
  RunRecord record;
  ParatopeMatrix trained;  // paratope at end of the run
};

inline double score(double t, int n_s, double phi) { return (phi * n_s + t) / 2.0; }

namespace detail {

inline void write_trace_line(std::ostream& os, const SelectionTrace& tr, long tick) {
  nlohmann::json j;
  j["tick"] = tick;
  j["presenting"] = tr.presenting;
  j["dominant"] = tr.dominant;
  j["t1"] = tr.t1;
  j["t2"] = tr.t2;
  j["t3"] = tr.t3;
  j["tg"] = tr.tg;
  if (!tr.act.empty()) j["activation"] = tr.act;
  j["stage1_winner"] = tr.stage1_winner;
  j["final_winner"] = tr.final_winner;
  j["idiotypic_difference"] = tr.idiotypic_difference;
  os << j.dump() << "\n";
}

}  // namespace detail

// Full control loop: sense/select once per second, score half a second
// later, kinematics at 10 Hz. Deterministic for a fixed setup and seed.
inline RunResult simulate(const RunSetup& setup) {
  World world = setup.world;
  ParatopeMatrix paratope = setup.paratope;
  ConcentrationVector conc = ConcentrationVector::uniform(paratope.antibodies());
  std::mt19937_64 rng(setup.seed);

  RobotState st;
  st.pose = world.start;
  st.pose.pos.x += (2.0 * uniform01(rng) - 1.0) * setup.start_jitter_pos;
  st.pose.pos.y += (2.0 * uniform01(rng) - 1.0) * setup.start_jitter_pos;
  st.pose.theta = wrap_angle(st.pose.theta + (2.0 * uniform01(rng) - 1.0) * setup.start_jitter_theta);

  RunRecord rec;
  rec.system = to_string(setup.params.mode);
  rec.params = setup.params;
  rec.strategy = setup.reinforcement.strategy;
  rec.world_id = setup.world_id;
  rec.paratope_id = setup.paratope_id;
  rec.seed = setup.seed;

  const auto& reps = antibody_repertoire();
  const Antibody* active = nullptr;
  double wander_target = 0.0;
  std::size_t prev_winner = 0;
  bool have_prev_winner = false;
  int changes = 0;

  bool collided_since_check = false;
  std::vector<int> pending_blocks;

  // deferred scoring state
  struct Pending {
    std::size_t winner = 0, dominant = 0;
    bool difference = false;
    bool stall_tick = false;
    AssessmentSnapshot snap;
    ConcentrationVector conc_before;
  };
  std::optional<Pending> pending;

  // stall bookkeeping
  StallSequence current_seq;
  bool in_seq = false;
  bool last_decision_difference = false;
  auto close_seq = [&]() {
    if (!in_seq) return;
    current_seq.escape_by_difference = last_decision_difference;
    rec.sequences.push_back(current_seq);
    in_seq = false;
  };

  int scored = 0, scored_stall = 0;
  int pos = 0, neg = 0, zer = 0, pos_stall = 0;
  int diff_scored = 0, diff_scored_stall = 0;
  int diff_success = 0, diff_success_stall = 0;
  int changes_stall = 0, change_denom_stall = 0;

  const long max_iters = static_cast<long>(setup.timeout / setup.dt);
  double elapsed = 0.0;

  for (long iter = 0; iter < max_iters; ++iter) {
    std::vector<Segment> solid = world.solid();

    if (iter % 10 == 0) {
      // ---- decision tick ----
      SensorBundle bundle;
      bundle.laser = cast_laser(solid, st.pose, setup.sensors);
      bundle.rear_average = rear_sonar_average(solid, st.pose, setup.sensors);
      bundle.blob = detect_blob(world, solid, st.pose, setup.sensors);
      bundle.stalled = collided_since_check;
      collided_since_check = false;

      AntigenReading ag = detect_antigens(bundle, setup.sensors, setup.priority);
      bool stall_tick = ag.dominant == 5 || ag.dominant == 6;
      if (stall_tick) ++rec.n_s;

      AntigenArray g = build_antigen_array(ag.presenting, setup.priority,
                                           setup.reinforcement.strategy == Strategy::Weak,
                                           paratope.antigens());
      ConcentrationVector conc_before = conc;
      std::size_t winner;
      bool difference = false;
      bool traced = false;
      SelectionTrace tr;
      try {
        tr = select_winner(paratope, setup.idiotope, g, conc, setup.params);
        winner = tr.final_winner;
        difference = tr.idiotypic_difference;
        traced = true;
      } catch (const NoMatchingAntibodyError&) {
        // degenerate paratope: keep the previous behavior going
        winner = have_prev_winner ? prev_winner : 0;
      }
      if (traced && setup.trace_out) detail::write_trace_line(*setup.trace_out, tr, iter / 10);

      ++rec.decision_ticks;
      bool changed = have_prev_winner && winner != prev_winner;
      if (have_prev_winner) {
        changes += changed ? 1 : 0;
        if (stall_tick) {
          ++change_denom_stall;
          changes_stall += changed ? 1 : 0;
        }
      }
      prev_winner = winner;
      have_prev_winner = true;
      last_decision_difference = difference;

      if (stall_tick) {
        if (!in_seq) {
          current_seq = StallSequence{};
          current_seq.start_tick = iter / 10;
          in_seq = true;
        }
        ++current_seq.length;
        current_seq.antibodies.push_back(winner);
      } else {
        close_seq();
      }

      active = &reps[winner];
      if (active->kind == BehaviorKind::WanderMaxGap) {
        double bearing = M_PI / 2.0 - (bundle.laser.max_sector + 0.5) * (M_PI / 8.0);
        wander_target = wrap_angle(st.pose.theta + bearing);
      }

      Pending p;
      p.winner = winner;
      p.dominant = ag.dominant;
      p.difference = difference;
      p.stall_tick = stall_tick;
      p.conc_before = conc_before;
      p.snap.min_dist_before = bundle.laser.min_reading;
      p.snap.min_sector_before = bundle.laser.min_sector;
      p.snap.avg_before = bundle.laser.average;
      p.snap.distance_traveled = st.odometer;  // completed at scoring time
      p.snap.marker_before = bundle.blob.visible;
      p.snap.blob_area_before = bundle.blob.area;
      p.snap.dominant = ag.dominant;
      p.snap.winner = winner;
      p.snap.winner_is_reverse = active->is_reverse();
      p.snap.commanded_speed = active->linear;
      pending = p;
    } else if (iter % 10 == 5 && pending) {
      // ---- scoring tick, half a second after acting ----
      SectorSummary laser = cast_laser(solid, st.pose, setup.sensors);
      BlobReading blob = detect_blob(world, solid, st.pose, setup.sensors);
      AssessmentSnapshot snap = pending->snap;
      snap.min_dist_after = laser.min_reading;
      snap.min_sector_after = laser.min_sector;
      snap.avg_after = laser.average;
      snap.distance_traveled = st.odometer - snap.distance_traveled;
      snap.marker_after = blob.visible;
      snap.blob_bearing_after = blob.bearing;

      double rf = compute_rf(snap, setup.reinforcement);
      apply_reinforcement(paratope, pending->winner, pending->dominant, rf);
      if (rf < 0.0 && setup.params.mode == SelectionMode::S3)
        conc = rollback_concentration(pending->conc_before, conc, pending->winner);

      ++scored;
      if (rf > 0.0) ++pos;
      else if (rf < 0.0) ++neg;
      else ++zer;
      if (pending->difference) {
        ++diff_scored;
        if (rf > 0.0) ++diff_success;
      }
      if (pending->stall_tick) {
        ++scored_stall;
        if (rf > 0.0) ++pos_stall;
        if (pending->difference) {
          ++diff_scored_stall;
          if (rf > 0.0) ++diff_success_stall;
        }
      }
      pending.reset();
    }

    // ---- motion ----
    double v = 0.0, w = 0.0;
    if (active) {
      switch (active->kind) {
        case BehaviorKind::Fixed:
          v = active->linear;
          w = active->angular;
          break;
        case BehaviorKind::WanderMaxGap:
          v = active->linear;
          w = std::clamp(1.5 * wrap_angle(wander_target - st.pose.theta), -deg(60), deg(60));
          break;
        case BehaviorKind::TrackMarker: {
          BlobReading blob = detect_blob(world, solid, st.pose, setup.sensors);
          v = active->linear;
          w = blob.visible ? std::clamp(2.0 * blob.bearing, -deg(60), deg(60)) : 0.0;
          break;
        }
      }
    }
    st.linear = v;
    st.angular = w;
    // imperfect actuation, drawn from the run stream so replays stay exact
    double v_eff = v * (1.0 + setup.actuation_noise_linear * (2.0 * uniform01(rng) - 1.0));
    double w_eff = w + setup.actuation_noise_angular * (2.0 * uniform01(rng) - 1.0);
    StepResult step = step_robot(world, solid, st, v_eff, w_eff, setup.dt);
    if (step.collided) {
      collided_since_check = true;
      st.stalled = true;
    } else {
      st.stalled = false;
    }
    for (int id : step.markers_crossed) {
      world.deactivate_marker(id);
      pending_blocks.push_back(id);
    }
    for (auto it = pending_blocks.begin(); it != pending_blocks.end();) {
      const Marker* m = world.find_marker(*it);
      if (m && point_segment_distance(st.pose.pos, m->doorway) > kRobotRadius + 0.05) {
        world.activate_block(*it);
        it = pending_blocks.erase(it);
      } else {
        ++it;
      }
    }

    elapsed = (iter + 1) * setup.dt;

    if (setup.trajectory_out) {
      std::size_t dom = pending ? pending->dominant : 0;
      *setup.trajectory_out << iter << "," << st.pose.pos.x << "," << st.pose.pos.y << ","
                            << st.pose.theta << "," << dom << ","
                            << (active ? active->id : 0) << "," << (st.stalled ? 1 : 0) << "\n";
    }

    // goal test: final marker blob bigger than the goal area
    const Marker* gm = world.find_marker(world.goal_marker);
    if (gm && gm->active) {
      Vec2 d = gm->pos - st.pose.pos;
      double dist = d.norm();
      if (dist > 1e-6 && dist * dist < setup.sensors.blob_constant / setup.sensors.goal_area) {
        double bearing = wrap_angle(std::atan2(d.y, d.x) - st.pose.theta);
        if (std::abs(bearing) <= setup.sensors.blob_fov / 2.0 &&
            visible(st.pose.pos, gm->pos, solid)) {
          rec.completed = true;
          break;
        }
      }
    }
  }

  close_seq();
  rec.t = rec.completed ? elapsed : setup.timeout;
  rec.score = score(rec.t, rec.n_s, setup.phi);
  rec.scored_ticks = scored;
  rec.positive_rf = pos;
  rec.negative_rf = neg;
  rec.zero_rf = zer;

  auto pct = [](int num, int den) { return den > 0 ? 100.0 * num / den : 0.0; };
  rec.overall.reinforcement_success = pct(pos, scored);
  rec.overall.antibody_change = pct(changes, rec.decision_ticks - 1);
  rec.overall.idiotypic_difference = pct(diff_scored, scored);
  rec.overall.idiotypic_success = pct(diff_success, diff_scored);
  rec.in_stall.reinforcement_success = pct(pos_stall, scored_stall);
  rec.in_stall.antibody_change = pct(changes_stall, change_denom_stall);
  rec.in_stall.idiotypic_difference = pct(diff_scored_stall, scored_stall);
  rec.in_stall.idiotypic_success = pct(diff_success_stall, diff_scored_stall);

  int long_len = 0, long_changes = 0, long_pairs = 0;
  for (const auto& s : rec.sequences) {
    if (s.length <= 1) continue;
    ++rec.long_stall_count;
    long_len += s.length;
    for (std::size_t i = 1; i < s.antibodies.size(); ++i) {
      ++long_pairs;
      if (s.antibodies[i] != s.antibodies[i - 1]) ++long_changes;
    }
  }
  rec.long_stall_mean_length =
      rec.long_stall_count > 0 ? static_cast<double>(long_len) / rec.long_stall_count : 0.0;
  rec.long_stall_change_rate = pct(long_changes, long_pairs);

  return RunResult{rec, paratope};
}

}  // namespace idio
