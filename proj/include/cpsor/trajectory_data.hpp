#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpsor/cognitive_frame.hpp"

namespace cpsor::data {

// Canonical sampling interval (25 Hz). Other rates are rejected on load.
inline constexpr double kTimeStep = 0.04;
// Significant digits used for every numeric field in episode files.
inline constexpr int kTextDigits = 9;
inline constexpr int kSchemaVersion = 1;

struct VehicleState {
  double t = 0.0;
  std::string vehicle_id;
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double a = 0.0;
  double steer_deg = 0.0;  // steering-wheel angle, negative = left
  double throttle = 0.0;
  double brake = 0.0;
  double heading_rad = 0.0;

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct PadSample {
  double pleased = 0.0;
  double aroused = 0.0;
  double dominant = 0.0;

  friend bool operator==(const PadSample&, const PadSample&) = default;
};

struct Episode {
  int scenario_id = 1;
  std::string ego_id;
  std::vector<std::string> npc_ids;
  // tracks[v][k]: vehicle v (ego first, then npc_ids order) at step k.
  std::vector<std::vector<VehicleState>> tracks;
  std::vector<PadSample> ego_pad;
  double sub_style_score = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;

  std::size_t steps() const { return tracks.empty() ? 0 : tracks.front().size(); }
  const std::vector<VehicleState>& ego() const { return tracks.front(); }
  std::vector<std::string> vehicle_ids() const;

  friend bool operator==(const Episode&, const Episode&) = default;
};

struct FuturePoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct Sample {
  int scenario_id = 1;
  std::size_t episode_index = 0;
  std::size_t start_step = 0;
  std::vector<std::string> vehicle_ids;  // ego first
  std::vector<std::vector<VehicleState>> history;  // [vehicle][step]
  std::vector<CognitiveFrame> cognition;           // per history step, may be empty
  std::vector<FuturePoint> future;                 // ego positions

  std::size_t history_steps() const { return history.empty() ? 0 : history.front().size(); }
  const VehicleState& last_ego() const { return history.front().back(); }
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of 0.04 s steps covering `seconds`.
std::size_t steps_for(double seconds);

// Throws DatasetError (prefixed with `source`) on any invariant violation.
void validate_episode(const Episode& episode, const std::string& source = "episode");

std::string episode_to_csv(const Episode& episode);
std::string episode_sidecar_json(const Episode& episode);
Episode episode_from_text(const std::string& csv, const std::string& sidecar_json,
                          const std::string& source = "episode");

// Writes <dir>/<stem>.csv and <dir>/<stem>.json.
void write_episode(const Episode& episode, const std::string& dir, const std::string& stem);
Episode load_episode(const std::string& csv_path, const std::string& json_path);

// Loads every <stem>.json with a sibling <stem>.csv, ordered by stem.
std::vector<Episode> load_dataset(const std::string& dir);

std::vector<Sample> window_samples(const Episode& episode, double t_p, double t_f,
                                   std::size_t stride,
                                   const std::vector<CognitiveFrame>* frames = nullptr,
                                   std::size_t episode_index = 0);

}  // namespace cpsor::data
