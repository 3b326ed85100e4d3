#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cpsor/trajectory_data.hpp"

namespace cpsor::test {

// Ego driving straight at constant speed with one NPC `gap` metres ahead.
inline data::Episode straight_episode(std::size_t steps, double speed = 10.0, double gap = 30.0) {
  data::Episode ep;
  ep.scenario_id = 1;
  ep.ego_id = "ego";
  ep.npc_ids = {"npc1"};
  ep.tracks.assign(2, {});
  ep.sub_style_score = 3.0;
  ep.seed = 1;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * data::kTimeStep;
    data::VehicleState ego{t, "ego", speed * t, 0.0, speed, 0.0, 0.0, 0.2, 0.0, 0.0};
    data::VehicleState npc{t, "npc1", gap + speed * t, 0.0, speed, 0.0, 0.0, 0.2, 0.0, 0.0};
    ep.tracks[0].push_back(ego);
    ep.tracks[1].push_back(npc);
    ep.ego_pad.push_back({0.5, 0.0, 0.2});
  }
  return ep;
}

inline std::string temp_dir(const std::string& name) {
  return std::string(CPSOR_TEST_TMP) + "/" + name;
}

}  // namespace cpsor::test
