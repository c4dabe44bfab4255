#include <doctest.h>

#include <cmath>
#include <random>

#include "idio/learning.hpp"

using namespace idio;

TEST_CASE("paratope initialization") {
  for (std::uint64_t seed : {1ULL, 42ULL, 1000ULL, 9999ULL}) {
    ParatopeMatrix p = init_paratope(seed);
    REQUIRE(p.antibodies() == kNumAntibodies);
    REQUIRE(p.antigens() == kNumAntigens);
    for (std::size_t i = 0; i < p.antibodies(); ++i) {
      CHECK(p.raw().row_mean(i) == doctest::Approx(0.625).epsilon(1e-12));
      for (std::size_t j = 0; j < p.antigens(); ++j) {
        // the mean shift can push entries slightly past the sampling band
        CHECK(p.at(i, j) > 0.35);
        CHECK(p.at(i, j) < 0.90);
      }
    }
  }
  // same seed, same matrix; different seed, different matrix
  CHECK(init_paratope(7).raw() == init_paratope(7).raw());
  CHECK_FALSE(init_paratope(7).raw() == init_paratope(8).raw());
}

TEST_CASE("uniform01 stays in [0,1) and is deterministic") {
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 10000; ++i) {
    double x = uniform01(a);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(x == uniform01(b));
  }
}

TEST_CASE("obstacle scoring") {
  ReinforcementConfig cfg;
  AssessmentSnapshot s;
  s.dominant = 0;
  s.min_dist_before = 0.5;
  s.min_dist_after = 0.8;
  s.min_sector_before = s.min_sector_after = 3;
  s.avg_before = s.avg_after = 3.0;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.015).epsilon(1e-12));

  // sector change attenuates by 4
  s.min_sector_after = 5;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.00375).epsilon(1e-12));

  // reverse penalty applies on top
  s.winner_is_reverse = true;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.00375 - 0.01).epsilon(1e-12));

  // global term adds open_space_gain * average delta
  s.winner_is_reverse = false;
  s.avg_after = 4.0;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.00375 + 0.025).epsilon(1e-12));

  // closing in on the obstacle scores negative
  AssessmentSnapshot worse;
  worse.dominant = 1;
  worse.min_dist_before = 0.6;
  worse.min_dist_after = 0.4;
  worse.min_sector_before = worse.min_sector_after = 1;
  CHECK(compute_rf(worse, cfg) == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("open-space scoring") {
  ReinforcementConfig cfg;
  AssessmentSnapshot s;
  s.dominant = 4;
  s.avg_before = 1.5;
  s.avg_after = 2.5;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.025).epsilon(1e-12));

  s.avg_after = 1.0;
  CHECK(compute_rf(s, cfg) == doctest::Approx(-0.0125).epsilon(1e-12));

  // reversing while the view shrinks is further penalized
  s.winner_is_reverse = true;
  CHECK(compute_rf(s, cfg) == doctest::Approx(-0.0225).epsilon(1e-12));
}

TEST_CASE("stall scoring") {
  ReinforcementConfig cfg;
  AssessmentSnapshot s;
  s.dominant = 5;
  s.avg_before = s.avg_after = 2.0;
  s.distance_traveled = 0.12;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.015).epsilon(1e-12));

  s.distance_traveled = 0.004;  // below movement_epsilon
  CHECK(compute_rf(s, cfg) == doctest::Approx(-0.004).epsilon(1e-12));

  // a pinned robot's rotating view must not leak reward into the stall score
  s.avg_after = 3.5;
  CHECK(compute_rf(s, cfg) == doctest::Approx(-0.004).epsilon(1e-12));
  s.avg_after = 2.0;

  s.dominant = 6;  // blocked-behind uses the same scorer
  s.distance_traveled = 0.2;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.025).epsilon(1e-12));
}

TEST_CASE("tracking scoring") {
  ReinforcementConfig cfg;
  AssessmentSnapshot s;
  s.dominant = 7;
  s.avg_before = s.avg_after = 3.0;
  s.commanded_speed = 1.0;
  s.marker_after = true;
  s.blob_bearing_after = 20.0 * M_PI / 180.0;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.01 * 0.5 + 0.015).epsilon(1e-12));

  // centered marker doubles the bonus
  s.blob_bearing_after = 2.0 * M_PI / 180.0;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.005 + 0.03).epsilon(1e-12));

  // losing a close marker is penalized
  s.marker_after = false;
  s.marker_before = true;
  s.blob_area_before = 900.0;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.005 - 0.025).epsilon(1e-12));

  // losing a distant marker is not
  s.blob_area_before = 100.0;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.005).epsilon(1e-12));

  // reversing during tracking
  s.commanded_speed = -0.4;
  CHECK(compute_rf(s, cfg) == doctest::Approx(-0.01).epsilon(1e-12));

  // slow forward motion scores below zero without a marker
  s.commanded_speed = 0.2;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.01 * (0.2 - 0.5)).epsilon(1e-12));

  // the open-space dominant antigen shares this scorer
  s.dominant = 3;
  s.commanded_speed = 1.5;
  CHECK(compute_rf(s, cfg) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("weak strategy reroutes listed antibodies to the track scorer") {
  ReinforcementConfig strong;
  ReinforcementConfig weak;
  weak.strategy = Strategy::Weak;

  AssessmentSnapshot s;
  s.dominant = 5;  // stall
  s.distance_traveled = 0.3;
  s.avg_before = s.avg_after = 2.0;
  s.commanded_speed = 0.4;

  s.winner = 4;  // listed
  CHECK(compute_rf(s, strong) == doctest::Approx(0.0375).epsilon(1e-12));
  CHECK(compute_rf(s, weak) == doctest::Approx(0.01 * (0.4 - 0.5)).epsilon(1e-12));

  s.winner = 10;  // not listed: weak falls back to the dominant-antigen scorer
  CHECK(compute_rf(s, weak) == compute_rf(s, strong));

  for (std::size_t id = 0; id < kNumAntibodies; ++id) {
    bool listed = id == 1 || id == 2 || (id >= 4 && id <= 9) || id == 12;
    CHECK(weakly_scored_antibody(id) == listed);
  }
}

TEST_CASE("single-cell reinforcement with clamping") {
  Matrix m(2, 2, 0.5);
  ParatopeMatrix p(m);
  apply_reinforcement(p, 0, 1, 0.1);
  CHECK(p.at(0, 1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(p.at(0, 0) == 0.5);
  CHECK(p.at(1, 1) == 0.5);

  apply_reinforcement(p, 0, 1, 0.9);
  CHECK(p.at(0, 1) == 1.0);
  apply_reinforcement(p, 1, 0, -2.0);
  CHECK(p.at(1, 0) == 0.0);
}

TEST_CASE("sign contract: improvement scores positive, regression negative") {
  std::mt19937_64 rng(31);
  ReinforcementConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    AssessmentSnapshot s;
    s.dominant = rng() % 3;  // obstacle family
    s.min_dist_before = 0.2 + 2.0 * uniform01(rng);
    double delta = 0.05 + uniform01(rng);
    s.min_dist_after = s.min_dist_before + delta;
    s.min_sector_before = s.min_sector_after = static_cast<int>(rng() % 8);
    s.avg_before = s.avg_after = 1.0 + 3.0 * uniform01(rng);
    CHECK(compute_rf(s, cfg) > 0.0);

    s.min_dist_after = s.min_dist_before - delta;
    CHECK(compute_rf(s, cfg) < 0.0);
  }
}
