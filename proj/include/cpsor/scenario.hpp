#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cpsor/cognitive_dbn.hpp"
#include "cpsor/dbn.hpp"
#include "cpsor/trajectory_data.hpp"

namespace cpsor::sim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

// Cubic Bezier point; throws std::domain_error for u outside [0, 1].
Point2 bezier3(Point2 p0, Point2 p1, Point2 p2, Point2 p3, double u);
Point2 bezier3_derivative(Point2 p0, Point2 p1, Point2 p2, Point2 p3, double u);

inline constexpr double kLaneWidth = 3.5;
inline constexpr double kWheelbase = 2.8;
inline constexpr double kSteerRatio = 15.0;
inline constexpr double kMaxThrottleAccel = 3.0;  // m/s^2 at full throttle
inline constexpr double kMaxBrakeDecel = 8.0;     // m/s^2 at full brake

std::optional<Emotion> emotion_from_string(std::string_view text);

// Emotion modulation of the driver. Defaults are tuning choices, not measurements.
struct DriverGains {
  double anger_speed = 1.3;           // desired speed and speed-gain multiplier
  double anger_gap = 0.6;             // desired-gap multiplier
  double anger_lateral_noise = 2.0;   // steering-noise multiplier
  double fright_brake = 1.5;          // brake-command multiplier
  double fright_speed = 0.85;         // desired-speed multiplier
  double fright_steer_noise = 1.5;    // steering-noise multiplier
};

struct DriverParams {
  double desired_speed = 18.0;  // m/s
  double speed_gain = 0.5;      // 1/s
  double min_gap = 5.0;         // m
  double time_headway = 1.5;    // s
  double gap_gain = 0.25;       // 1/s^2
  double closing_gain = 0.7;    // 1/s
  double emergency_ttc = 2.0;   // s
  double caution_ttc = 3.0;     // s
  double emergency_decel = 4.8; // m/s^2
  double caution_decel = 2.4;   // m/s^2
  double lookahead_min = 6.0;   // m
  double lookahead_time = 0.8;  // s
};

// What the driver perceives at one step.
struct SceneContext {
  std::optional<double> lead_gap;    // bumper gap to the in-path leader, m
  std::optional<double> lead_speed;  // leader speed along the ego heading, m/s
  double min_ttc = std::numeric_limits<double>::infinity();
  Point2 lookahead;                  // path point the driver steers toward
};

// Ornstein-Uhlenbeck steering disturbance in steering-wheel degrees.
struct SteeringNoise {
  double sigma_deg = 3.0;
  double reversion = 1.5;  // 1/s
  double state = 0.0;
  std::mt19937_64 rng;

  explicit SteeringNoise(std::uint64_t seed, double sigma = 3.0) : sigma_deg(sigma), rng(seed) {}
  double step(double scale, double dt);
};

struct DriverCommand {
  double throttle = 0.0;
  double brake = 0.0;
  double steer_deg = 0.0;
};

// Car-following plus pure-pursuit driver with emotion-scaled gains.
DriverCommand driver_step(const data::VehicleState& ego, const SceneContext& context, Emotion emotion,
                          const DriverGains& gains, const DriverParams& params, SteeringNoise* noise);

// Per-step PAD annotation with a single regime switch.
struct EmotionProcess {
  data::PadSample pre_mean;
  data::PadSample post_mean;
  Emotion pre_emotion = Emotion::Neutral;
  Emotion post_emotion = Emotion::Neutral;
  double switch_time = 0.0;
  double noise = 0.05;

  static EmotionProcess for_profile(Emotion profile, double switch_time);
  Emotion emotion_at(double t) const { return t < switch_time ? pre_emotion : post_emotion; }
  data::PadSample sample(double t, std::mt19937_64& rng) const;
};

struct ScenarioConfig {
  int scenario_id = 1;
  Emotion emotion_profile = Emotion::Neutral;
  double trigger_time = 4.0;  // s
  double duration = 10.0;     // s
  std::uint64_t seed = 1;
  DriverGains driver_gains;
  double reaction_delay = 0.5;      // s, lag of perceived NPC states
  double emotion_switch_delay = 1.5;  // s after the scenario event
  std::optional<double> sub_style_score;  // drawn from U[1, 5] when absent

  void validate() const;
};

data::Episode generate_episode(const ScenarioConfig& config);

// Manifest of a generated dataset: one entry per episode stem.
std::string manifest_json(const std::vector<std::pair<std::string, ScenarioConfig>>& entries);

// Ground-truth SOR DBN used as the oracle channel for structure recovery.
// Transition rows mix a self-persistence mass into a uniform row; with
// persistence 0 the model has no inter-slice edges.
dbn::DbnModel reference_sor_dbn(const CognitiveEncoding& encoding = {}, double persistence = 0.6);

// S-layer states from kinematics, the rest sampled from `true_dbn` given
// the S layer and the previous slice.
std::vector<CognitiveFrame> annotate_ground_truth(const data::Episode& episode, const dbn::DbnModel& true_dbn,
                                                  std::uint64_t seed, const CognitiveEncoding& encoding = {});

}  // namespace cpsor::sim
