#pragma once

#include "idio/immune.hpp"

namespace idio {

// Hand-coded disallowance table. Every family carries most of its mass on
// the stall column: a winner that holds the floor while the robot is stuck
// stimulates exactly the competitors with the least stall credit, and the
// suppression and stimulation terms nearly cancel the incumbent's stall
// advantage, so selection churns through alternatives instead of repeating
// one failing antibody. The smaller entries (frontal obstacle, open space,
// cramped space, blocked behind) differentiate the families enough that a
// reverse winner hands over to movers rather than to its own kin. Each row
// sums to 1.
//
// Antigen columns: 0 obstacle front, 1 obstacle left, 2 obstacle right,
// 3 open, 4 low average, 5 stalled, 6 blocked behind, 7 marker seen.
inline IdiotopeMatrix default_idiotope() {
  const double cruise[8] = {0.10, 0, 0, 0.20, 0, 0.70, 0, 0};
  const double turn[8] = {0.25, 0, 0, 0, 0.15, 0.60, 0, 0};
  const double rev[8] = {0.20, 0, 0, 0, 0, 0.60, 0.20, 0};
  const double* rows[16] = {
      cruise,  // 0 forward_fast
      turn,    // 1 forward_left30
      turn,    // 2 forward_right30
      cruise,  // 3 forward_medium
      turn,    // 4 forward_left60
      turn,    // 5 forward_right60
      turn,    // 6 slow_left30
      turn,    // 7 slow_right30
      turn,    // 8 slow_left60
      turn,    // 9 slow_right60
      rev,     // 10 reverse_slow
      rev,     // 11 reverse_left30
      cruise,  // 12 wander_max_gap
      rev,     // 13 reverse_right30
      rev,     // 14 reverse_fast
      cruise,  // 15 track_marker
  };
  Matrix m(kNumAntibodies, kNumAntigens);
  for (std::size_t i = 0; i < kNumAntibodies; ++i)
    for (std::size_t j = 0; j < kNumAntigens; ++j) m(i, j) = rows[i][j];
  return IdiotopeMatrix(m);
}

}  // namespace idio
