#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpsor/scenario.hpp"

namespace cpsor::sim {

Point2 bezier3(Point2 p0, Point2 p1, Point2 p2, Point2 p3, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("bezier parameter outside [0, 1]");
  const double w = 1.0 - u;
  const double b0 = w * w * w, b1 = 3.0 * w * w * u, b2 = 3.0 * w * u * u, b3 = u * u * u;
  return {b0 * p0.x + b1 * p1.x + b2 * p2.x + b3 * p3.x, b0 * p0.y + b1 * p1.y + b2 * p2.y + b3 * p3.y};
}

Point2 bezier3_derivative(Point2 p0, Point2 p1, Point2 p2, Point2 p3, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("bezier parameter outside [0, 1]");
  const double w = 1.0 - u;
  const double d0 = 3.0 * w * w, d1 = 6.0 * w * u, d2 = 3.0 * u * u;
  return {d0 * (p1.x - p0.x) + d1 * (p2.x - p1.x) + d2 * (p3.x - p2.x),
          d0 * (p1.y - p0.y) + d1 * (p2.y - p1.y) + d2 * (p3.y - p2.y)};
}

std::optional<Emotion> emotion_from_string(std::string_view text) {
  if (text == "anger" || text == "Anger") return Emotion::Anger;
  if (text == "neutral" || text == "Neutral") return Emotion::Neutral;
  if (text == "fright" || text == "Fright") return Emotion::Fright;
  return std::nullopt;
}

double SteeringNoise::step(double scale, double dt) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double xi = gauss(rng);
  // Stationary standard deviation of the process is sigma_deg.
  state += -reversion * state * dt + sigma_deg * std::sqrt(2.0 * reversion * dt) * xi;
  return scale * state;
}

DriverCommand driver_step(const data::VehicleState& ego, const SceneContext& ctx, Emotion emotion,
                          const DriverGains& gains, const DriverParams& params, SteeringNoise* noise) {
  double speed_mult = 1.0, gain_mult = 1.0, gap_mult = 1.0, brake_mult = 1.0, noise_mult = 1.0;
  if (emotion == Emotion::Anger) {
    speed_mult = gain_mult = gains.anger_speed;
    gap_mult = gains.anger_gap;
    noise_mult = gains.anger_lateral_noise;
  } else if (emotion == Emotion::Fright) {
    speed_mult = gains.fright_speed;
    brake_mult = gains.fright_brake;
    noise_mult = gains.fright_steer_noise;
  }

  double a = params.speed_gain * gain_mult * (params.desired_speed * speed_mult - ego.v);
  if (ctx.lead_gap && ctx.lead_speed) {
    const double desired_gap = (params.min_gap + ego.v * params.time_headway) * gap_mult;
    const double follow = params.gap_gain * gain_mult * (*ctx.lead_gap - desired_gap) +
                          params.closing_gain * (*ctx.lead_speed - ego.v);
    a = std::min(a, follow);
  }
  if (ctx.min_ttc < params.emergency_ttc) {
    a = std::min(a, -params.emergency_decel);
  } else if (ctx.min_ttc < params.caution_ttc) {
    a = std::min(a, -params.caution_decel);
  }
  a = std::clamp(a, -kMaxBrakeDecel, kMaxThrottleAccel);

  DriverCommand cmd;
  if (a > 0.0) {
    cmd.throttle = std::min(1.0, a / kMaxThrottleAccel);
  } else if (a < 0.0) {
    cmd.brake = std::min(1.0, -a / kMaxBrakeDecel * brake_mult);
  }

  const double dx = ctx.lookahead.x - ego.x, dy = ctx.lookahead.y - ego.y;
  const double c = std::cos(ego.heading_rad), s = std::sin(ego.heading_rad);
  const double local_x = dx * c + dy * s;
  const double local_y = -dx * s + dy * c;
  const double dist2 = local_x * local_x + local_y * local_y;
  double wheel = 0.0;  // road-wheel angle, positive = left
  if (dist2 > 1e-9) wheel = std::atan(2.0 * kWheelbase * local_y / dist2);
  cmd.steer_deg = -wheel * kSteerRatio * 180.0 / std::numbers::pi;
  if (noise != nullptr) cmd.steer_deg += noise->step(noise_mult, data::kTimeStep);
  cmd.steer_deg = std::clamp(cmd.steer_deg, -540.0, 540.0);
  return cmd;
}

}  // namespace cpsor::sim
