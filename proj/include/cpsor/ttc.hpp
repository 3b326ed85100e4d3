#pragma once

#include "cpsor/trajectory_data.hpp"

namespace cpsor::sim {

struct TtcParams {
  double in_path_half_width = 2.0;   // m, lateral offset still counted as same path
  double parallel_tolerance_deg = 30.0;
  double crossing_horizon = 10.0;    // s, arrivals later than this are ignored
};

// Time to collision between two road users at the same instant, or +inf.
// Near-parallel headings use gap / closing speed along the ego heading;
// crossing headings use the arrival-time difference at the intersection of
// the two straight-line paths. Coincident positions give 0.
double compute_ttc(const data::VehicleState& ego, const data::VehicleState& other,
                   const TtcParams& params = {});

}  // namespace cpsor::sim
