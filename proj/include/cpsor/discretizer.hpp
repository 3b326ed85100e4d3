#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cpsor/cognitive_frame.hpp"
#include "cpsor/kmeans.hpp"
#include "cpsor/trajectory_data.hpp"

namespace cpsor::disc {

inline constexpr double kAccelBinWidth = 0.2;     // m/s^2
inline constexpr double kSteerThresholdDeg = 4.0;
inline constexpr std::size_t kControlWindow = 20;  // steps (0.8 s)

// PAD exemplars used to name emotion clusters.
inline constexpr double kAngerExemplar[3] = {-0.848, 0.462, 0.382};
inline constexpr double kFrightExemplar[3] = {-0.257, -0.985, -0.322};

// Safe above 2 s, Moderate in (1.5, 2], Danger at or below 1.5 s.
// Throws std::domain_error for ttc <= 0 or NaN.
RiskGrade ttc_risk_grade(double ttc);

// floor(a / width); bin b covers [b*width, (b+1)*width).
int bin_acceleration(double a, double width = kAccelBinWidth);
std::pair<double, double> bin_interval(int bin, double width = kAccelBinWidth);

// LeftTurn below -4 deg, RightTurn above +4 deg, Straight otherwise.
ManLateral lateral_maneuver(double steer_deg);

// Correlation between b_t and b_{t-k} over their overlapping range. Throws
// std::domain_error when either overlapping segment has zero variance.
double autocorrelation(std::span<const double> series, std::size_t k);

struct WindowSelection {
  std::size_t steps = 1;
  bool capped = false;      // threshold never reached below the cap
  bool degenerate = false;  // constant (sub)series met before the threshold
};

// Smallest downsampling spacing whose lag-1 autocorrelation drops below
// `threshold`, capped at `cap`.
WindowSelection select_window(std::span<const double> series, double threshold = 0.2,
                              std::size_t cap = kControlWindow);

struct EmotionClustering {
  ClusterModel model;  // label_map: cluster -> Emotion
  std::vector<Emotion> labels;
};

EmotionClustering emotion_states(std::span<const data::PadSample> pad_series, std::uint64_t seed);
Emotion classify_emotion(const ClusterModel& model, const data::PadSample& pad);

// Per-window control statistics:
// (mean throttle, mean brake, mean steer, std throttle, std brake, std steer).
Eigen::VectorXd control_features(std::span<const data::VehicleState> window);
// Non-overlapping windows of exactly `window` steps; a trailing partial window is dropped.
std::vector<Eigen::VectorXd> control_windows(const std::vector<data::VehicleState>& ego,
                                             std::size_t window = kControlWindow);

struct ManeuverModel {
  ClusterModel model;  // on standardized features
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;
  std::vector<ManLongi> longi_of_cluster;
  std::vector<ObjStyle> style_of_cluster;

  std::pair<ManLongi, ObjStyle> classify(const Eigen::VectorXd& features) const;
};

struct ManeuverClustering {
  ManeuverModel model;
  std::vector<std::pair<ManLongi, ObjStyle>> labels;  // per input window
};

// k = 3 on the standardized 6-vector. Clusters are ordered by mean
// (throttle - brake) for the longitudinal maneuver and by summed standardized
// std for the objective style.
ManeuverClustering maneuver_and_style(const std::vector<Eigen::VectorXd>& windows,
                                      std::uint64_t seed);

// Tertile split of the population (linear-interpolated quantiles): strictly
// above the upper tertile is Aggressive, strictly below the lower is
// Conservative.
SubStyle sub_style(double score, std::span<const double> population);

struct DiscretizerConfig {
  double accel_bin_width = kAccelBinWidth;
  std::uint64_t seed = 7;
};

// Dataset-level fitted discretizer: cluster models and the style population.
struct Discretizer {
  DiscretizerConfig config;
  ClusterModel emotion;
  ManeuverModel maneuver;
  std::vector<double> style_population;

  static Discretizer fit(const std::vector<data::Episode>& episodes,
                         const DiscretizerConfig& config = {});

  // One frame per step. Control statistics use the trailing 20-step window
  // (the first full window for the opening steps).
  std::vector<CognitiveFrame> frames(const data::Episode& episode) const;

  std::string to_json() const;
  static Discretizer from_json(const std::string& text);
};

// Risk grade from the minimum TTC to any NPC; TTC of 0 maps to Danger.
RiskGrade step_risk_grade(const data::Episode& episode, std::size_t step);

// CSV export, one column per node with state names.
std::string frames_to_csv(const std::vector<std::vector<CognitiveFrame>>& sequences);

}  // namespace cpsor::disc
