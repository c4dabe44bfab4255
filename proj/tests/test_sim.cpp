#include <doctest.h>

#include <cmath>
#include <sstream>

#include "idio/idiotope.hpp"
#include "idio/sim.hpp"

using namespace idio;

namespace {

// Paratope rigged so one antibody dominates every antigen.
ParatopeMatrix forced_paratope(std::size_t winner) {
  Matrix m(kNumAntibodies, kNumAntigens, 0.1);
  for (std::size_t j = 0; j < kNumAntigens; ++j) m(winner, j) = 0.9;
  return ParatopeMatrix(m);
}

// Rectangular room with an outer wall and a single goal marker.
World room_world(double wdt, double hgt, Pose start, Vec2 goal) {
  World w;
  w.xmin = 0; w.xmax = wdt; w.ymin = 0; w.ymax = hgt;
  w.walls = {{{0, 0}, {wdt, 0}},
             {{wdt, 0}, {wdt, hgt}},
             {{wdt, hgt}, {0, hgt}},
             {{0, hgt}, {0, 0}}};
  Marker g;
  g.id = 0;
  g.pos = goal;
  w.markers.push_back(g);
  w.goal_marker = 0;
  w.start = start;
  return w;
}

RunSetup base_setup(World w, ParatopeMatrix p) {
  RunSetup s;
  s.world = std::move(w);
  s.paratope = std::move(p);
  s.idiotope = default_idiotope();
  s.params.mode = SelectionMode::S1;
  s.seed = 11;
  s.start_jitter_pos = 0.0;
  s.start_jitter_theta = 0.0;
  return s;
}

}  // namespace

TEST_CASE("score function") {
  CHECK(score(300.0, 10, 9.08) == doctest::Approx((9.08 * 10 + 300.0) / 2.0).epsilon(1e-12));
  CHECK(score(100.0, 0, 9.08) == 50.0);
}

TEST_CASE("straight run reaches a goal marker ahead") {
  // forward_medium drives 0.5 m/s; goal triggers at sqrt(640/1000) = 0.8 m
  World w = room_world(12, 4, {{1.0, 2.0}, 0.0}, {9.0, 2.0});
  RunSetup s = base_setup(w, forced_paratope(3));
  s.timeout = 60.0;
  RunResult r = simulate(s);
  CHECK(r.record.completed);
  CHECK(r.record.t == doctest::Approx(14.4).epsilon(0.02));
  CHECK(r.record.n_s == 0);
  CHECK(r.record.score == doctest::Approx(r.record.t / 2.0).epsilon(1e-9));
  CHECK(r.record.sequences.empty());
}

TEST_CASE("ramming a wall raises the stall antigen") {
  // goal placed behind the robot so the run cannot complete
  World w = room_world(6, 4, {{4.8, 2.0}, 0.0}, {1.0, 2.0});
  w.markers[0].pos = {0.5, 2.0};
  RunSetup s = base_setup(w, forced_paratope(0));  // forward_fast, no escape
  s.timeout = 30.0;
  RunResult r = simulate(s);
  CHECK_FALSE(r.record.completed);
  CHECK(r.record.t == 30.0);
  CHECK(r.record.n_s > 10);  // pinned for most of the run
  REQUIRE_FALSE(r.record.sequences.empty());
  // one long pinned sequence of the forced winner
  const StallSequence& seq = r.record.sequences.back();
  CHECK(seq.length > 10);
  for (std::size_t a : seq.antibodies) CHECK(a == 0);
  CHECK(r.record.long_stall_count >= 1);
  CHECK(r.record.long_stall_change_rate == 0.0);
  // stalling forward into a wall scores negative, driving the cell to 0
  CHECK(r.trained.at(0, 5) < s.paratope.at(0, 5));
}

TEST_CASE("stall scoring rewards movement during escape") {
  // reverse_slow backs away from the wall it hit
  World w = room_world(6, 4, {{4.8, 2.0}, 0.0}, {1.0, 2.0});
  w.markers[0].active = false;
  RunSetup s = base_setup(w, forced_paratope(10));
  s.timeout = 20.0;
  RunResult r = simulate(s);
  // reversing keeps it moving, so stall scoring stays positive when it happens
  CHECK(r.record.negative_rf + r.record.positive_rf + r.record.zero_rf == r.record.scored_ticks);
}

TEST_CASE("tick accounting") {
  World w = room_world(6, 4, {{3.0, 2.0}, 0.0}, {1.0, 2.0});
  w.markers[0].active = false;  // no goal; run to timeout
  RunSetup s = base_setup(w, forced_paratope(3));
  s.timeout = 30.0;
  RunResult r = simulate(s);
  CHECK(r.record.decision_ticks == 30);
  CHECK(r.record.scored_ticks == 30);
  for (const RateSet* rs : {&r.record.overall, &r.record.in_stall}) {
    CHECK(rs->reinforcement_success >= 0.0);
    CHECK(rs->reinforcement_success <= 100.0);
    CHECK(rs->antibody_change >= 0.0);
    CHECK(rs->antibody_change <= 100.0);
    CHECK(rs->idiotypic_difference >= 0.0);
    CHECK(rs->idiotypic_difference <= 100.0);
    CHECK(rs->idiotypic_success >= 0.0);
    CHECK(rs->idiotypic_success <= 100.0);
  }
  // S1 never takes the idiotypic branch
  CHECK(r.record.overall.idiotypic_difference == 0.0);
}

TEST_CASE("determinism: identical setup and seed replays exactly") {
  World w = make_maze_world();
  for (SelectionMode mode : {SelectionMode::S1, SelectionMode::S2, SelectionMode::S3}) {
    RunSetup s;
    s.world = w;
    s.paratope = init_paratope(1000);
    s.idiotope = default_idiotope();
    s.params.mode = mode;
    s.seed = 77;
    s.timeout = 40.0;

    std::ostringstream tr1, tr2;
    RunSetup s1 = s;
    s1.trace_out = &tr1;
    RunSetup s2 = s;
    s2.trace_out = &tr2;
    RunResult a = simulate(s1);
    RunResult b = simulate(s2);
    CHECK(a.record.t == b.record.t);
    CHECK(a.record.n_s == b.record.n_s);
    CHECK(a.record.score == b.record.score);
    CHECK(a.record.decision_ticks == b.record.decision_ticks);
    CHECK(a.record.positive_rf == b.record.positive_rf);
    CHECK(a.trained.raw() == b.trained.raw());
    CHECK(tr1.str() == tr2.str());
    CHECK_FALSE(tr1.str().empty());
  }
}

TEST_CASE("seed changes the start pose jitter") {
  World w = make_maze_world();
  RunSetup s;
  s.world = w;
  s.paratope = init_paratope(1000);
  s.idiotope = default_idiotope();
  s.params.mode = SelectionMode::S1;
  s.timeout = 20.0;

  s.seed = 1;
  RunResult a = simulate(s);
  s.seed = 2;
  RunResult b = simulate(s);
  // different jitter leads to different learning trajectories
  CHECK_FALSE(a.trained.raw() == b.trained.raw());
}

TEST_CASE("trajectory logging") {
  World w = room_world(12, 4, {{1.0, 2.0}, 0.0}, {9.0, 2.0});
  RunSetup s = base_setup(w, forced_paratope(3));
  s.timeout = 10.0;
  std::ostringstream traj;
  s.trajectory_out = &traj;
  RunResult r = simulate(s);
  std::istringstream in(traj.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  // one line per completed iteration
  CHECK(lines == static_cast<int>(std::lround(r.record.t / s.dt)));
  CHECK(lines > 0);
}

TEST_CASE("maze run under S3 stays numerically sane") {
  RunSetup s;
  s.world = make_maze_world();
  s.paratope = init_paratope(1234);
  s.idiotope = default_idiotope();
  s.params.mode = SelectionMode::S3;
  s.seed = 5;
  s.timeout = 60.0;
  RunResult r = simulate(s);
  CHECK(r.record.decision_ticks > 0);
  for (std::size_t i = 0; i < r.trained.antibodies(); ++i)
    for (std::size_t j = 0; j < r.trained.antigens(); ++j) {
      CHECK(r.trained.at(i, j) >= 0.0);
      CHECK(r.trained.at(i, j) <= 1.0);
    }
  CHECK(r.record.score == doctest::Approx(score(r.record.t, r.record.n_s, s.phi)).epsilon(1e-12));
}
