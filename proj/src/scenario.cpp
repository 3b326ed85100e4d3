#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cpsor/scenario.hpp"
#include "cpsor/text_format.hpp"
#include "cpsor/ttc.hpp"
#include "json.hpp"

namespace cpsor::sim {
namespace {

constexpr double kVehicleLength = 4.5;
constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr data::PadSample kAngerPad{-0.848, 0.462, 0.382};
constexpr data::PadSample kSlightFrightPad{-0.257, -0.985, -0.322};
constexpr data::PadSample kFrightPad{-0.168, -0.988, -0.301};
constexpr data::PadSample kSlightAngerPad{-0.714, -0.273, 0.338};
constexpr data::PadSample kNeutralPad{0.5, 0.0, 0.2};

// Ego reference path: straight along y = 0, optionally turning left onto x = turn_x + radius.
struct Path {
  double turn_x = kInf;
  double radius = 10.0;

  Point2 at(double s) const {
    if (s <= turn_x) return {s, 0.0};
    const double arc = radius * std::numbers::pi / 2.0;
    if (s <= turn_x + arc) {
      const double phi = (s - turn_x) / radius;
      return {turn_x + radius * std::sin(phi), radius - radius * std::cos(phi)};
    }
    return {turn_x + radius, radius + (s - turn_x - arc)};
  }

  double project(Point2 p) const {
    if (!std::isfinite(turn_x)) return p.x;
    const double arc = radius * std::numbers::pi / 2.0;
    double best_s = std::min(p.x, turn_x);
    double best_d = std::hypot(p.x - best_s, p.y);
    const double phi = std::clamp(std::atan2(p.x - turn_x, radius - p.y), 0.0, std::numbers::pi / 2.0);
    const Point2 q = at(turn_x + radius * phi);
    if (const double d = std::hypot(p.x - q.x, p.y - q.y); d < best_d) {
      best_d = d;
      best_s = turn_x + radius * phi;
    }
    const double along = std::max(0.0, p.y - radius);
    if (const double d = std::hypot(p.x - turn_x - radius, p.y - radius - along); d < best_d) {
      best_s = turn_x + arc + along;
    }
    return best_s;
  }
};

data::VehicleState quantized(data::VehicleState s) {
  auto q = [](double v) { return quantize(v, data::kTextDigits); };
  s.t = q(s.t);
  s.x = q(s.x);
  s.y = q(s.y);
  s.v = q(s.v);
  s.a = q(s.a);
  s.steer_deg = q(s.steer_deg);
  s.throttle = q(s.throttle);
  s.brake = q(s.brake);
  s.heading_rad = q(s.heading_rad);
  return s;
}

void set_pedals(data::VehicleState& s) {
  s.throttle = s.a > 0.0 ? std::min(1.0, s.a / kMaxThrottleAccel) : 0.0;
  s.brake = s.a < 0.0 ? std::min(1.0, -s.a / kMaxBrakeDecel) : 0.0;
}

double emotion_speed(Emotion e, const DriverGains& g) {
  if (e == Emotion::Anger) return g.anger_speed;
  if (e == Emotion::Fright) return g.fright_speed;
  return 1.0;
}

// Nearest in-path leader among perceived road users.
void find_leader(const data::VehicleState& ego, const std::vector<data::VehicleState>& others, SceneContext& ctx) {
  const double c = std::cos(ego.heading_rad), s = std::sin(ego.heading_rad);
  for (const auto& o : others) {
    const double dx = o.x - ego.x, dy = o.y - ego.y;
    const double lon = dx * c + dy * s;
    const double lat = -dx * s + dy * c;
    const double cos_rel = std::cos(o.heading_rad - ego.heading_rad);
    if (lon <= 0.0 || std::abs(lat) >= 2.0 || cos_rel < std::cos(std::numbers::pi / 6.0)) continue;
    const double gap = lon - kVehicleLength;
    if (!ctx.lead_gap || gap < *ctx.lead_gap) {
      ctx.lead_gap = gap;
      ctx.lead_speed = o.v * cos_rel;
    }
  }
}

}  // namespace

EmotionProcess EmotionProcess::for_profile(Emotion profile, double switch_time) {
  EmotionProcess p;
  p.switch_time = switch_time;
  switch (profile) {
    case Emotion::Anger:
      p.pre_mean = kAngerPad;
      p.post_mean = kSlightFrightPad;
      p.pre_emotion = Emotion::Anger;
      p.post_emotion = Emotion::Fright;
      break;
    case Emotion::Fright:
      p.pre_mean = kFrightPad;
      p.post_mean = kSlightAngerPad;
      p.pre_emotion = Emotion::Fright;
      p.post_emotion = Emotion::Anger;
      break;
    case Emotion::Neutral:
      p.pre_mean = p.post_mean = kNeutralPad;
      break;
  }
  return p;
}

data::PadSample EmotionProcess::sample(double t, std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, noise);
  const auto& m = t < switch_time ? pre_mean : post_mean;
  auto draw = [&](double mean) { return std::clamp(mean + gauss(rng), -1.0, 1.0); };
  const double p = draw(m.pleased);
  const double a = draw(m.aroused);
  const double d = draw(m.dominant);
  return {p, a, d};
}

void ScenarioConfig::validate() const {
  if (scenario_id < 1 || scenario_id > 4) throw std::invalid_argument("scenario_id must be 1..4");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(trigger_time >= 0.0 && trigger_time < duration)) throw std::invalid_argument("trigger_time must lie in [0, duration)");
  if (reaction_delay < 0.0 || emotion_switch_delay < 0.0) throw std::invalid_argument("delays must be non-negative");
  if (sub_style_score && !(*sub_style_score >= 1.0 && *sub_style_score <= 5.0)) {
    throw std::invalid_argument("sub_style_score must lie in [1, 5]");
  }
}

data::Episode generate_episode(const ScenarioConfig& config) {
  config.validate();
  const double dt = data::kTimeStep;
  const std::size_t n = data::steps_for(config.duration);
  const auto trigger_step = static_cast<std::size_t>(std::llround(config.trigger_time / dt));
  const auto delay_steps = static_cast<std::size_t>(std::llround(config.reaction_delay / dt));

  std::mt19937_64 master(config.seed);
  const double score =
      config.sub_style_score.value_or(1.0 + 4.0 * static_cast<double>(master() >> 11) * 0x1.0p-53);
  SteeringNoise noise(master());
  std::mt19937_64 pad_rng(master());

  data::Episode ep;
  ep.scenario_id = config.scenario_id;
  ep.ego_id = "ego";
  ep.npc_ids = {config.scenario_id == 3 ? "cyclist" : "npc1"};
  ep.sub_style_score = quantize(score, data::kTextDigits);
  ep.seed = config.seed;
  ep.tracks.assign(2, {});

  DriverParams params;
  Path path;
  const double base_speed[] = {18.0, 18.0, 14.0, 10.0};
  params.desired_speed = base_speed[config.scenario_id - 1] * (0.94 + 0.03 * score);
  if (config.scenario_id == 4) path.turn_x = 45.0;

  auto process = EmotionProcess::for_profile(config.emotion_profile, kInf);
  const Emotion start_emotion = process.pre_emotion;
  const auto& gains = config.driver_gains;

  data::VehicleState ego;
  ego.vehicle_id = ep.ego_id;
  ego.v = params.desired_speed * emotion_speed(start_emotion, gains);
  data::VehicleState npc;
  npc.vehicle_id = ep.npc_ids.front();

  double event_time = config.trigger_time;
  bool event_started = false;
  double cut_in_length = 0.0, cut_in_x0 = 0.0;
  const double cut_in_duration = 2.5;

  switch (config.scenario_id) {
    case 1: {
      ego.v = 18.0;
      const double gap_mult = start_emotion == Emotion::Anger ? gains.anger_gap : 1.0;
      npc.x = (params.min_gap + ego.v * params.time_headway) * gap_mult + kVehicleLength;
      npc.v = 18.0;
      break;
    }
    case 2:
      npc.x = 30.0;
      npc.y = kLaneWidth;
      npc.v = 0.85 * ego.v;
      break;
    case 3:
      npc.x = 80.0;
      npc.y = -5.0;
      npc.heading_rad = std::numbers::pi / 2.0;
      break;
    case 4: {
      npc.y = kLaneWidth;
      npc.heading_rad = std::numbers::pi;
      npc.v = 12.0;
      const double conflict_x = path.turn_x + path.radius * std::sqrt(1.0 - std::pow(1.0 - kLaneWidth / path.radius, 2));
      npc.x = conflict_x + npc.v * (config.trigger_time + 2.0);
      break;
    }
    default:
      break;
  }
  if (config.scenario_id != 3) process.switch_time = event_time + config.emotion_switch_delay;

  std::vector<data::VehicleState> npc_track;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    ego.t = npc.t = t;

    // Scripted road user at step k.
    double npc_next_v = npc.v;
    switch (config.scenario_id) {
      case 1:
        npc.a = k >= trigger_step && npc.v > 0.0 ? -6.0 : 0.0;
        npc_next_v = std::max(0.0, npc.v + npc.a * dt);
        npc.a = (npc_next_v - npc.v) / dt;
        break;
      case 2:
        if (k == trigger_step) {
          cut_in_x0 = npc.x;
          cut_in_length = npc.v * cut_in_duration;
        }
        break;
      case 3:
        if (!event_started && k >= trigger_step && ego.x >= npc.x - 40.0) {
          event_started = true;
          event_time = t;
          process.switch_time = event_time + config.emotion_switch_delay;
        }
        npc.a = event_started && npc.v < 4.0 ? std::min(2.0, (4.0 - npc.v) / dt) : 0.0;
        npc_next_v = npc.v + npc.a * dt;
        break;
      default:
        break;
    }
    set_pedals(npc);
    npc_track.push_back(npc);

    // Driver perceives road users with a reaction lag.
    std::vector<data::VehicleState> perceived{npc_track[k >= delay_steps ? k - delay_steps : 0]};
    SceneContext ctx;
    find_leader(ego, perceived, ctx);
    for (const auto& o : perceived) ctx.min_ttc = std::min(ctx.min_ttc, compute_ttc(ego, o));
    const double lookahead = std::max(params.lookahead_min, params.lookahead_time * ego.v);
    ctx.lookahead = path.at(path.project({ego.x, ego.y}) + lookahead);
    const Emotion emotion = process.emotion_at(t);
    const auto cmd = driver_step(ego, ctx, emotion, gains, params, &noise);

    ego.throttle = cmd.throttle;
    ego.brake = cmd.brake;
    ego.steer_deg = cmd.steer_deg;
    const double a_cmd = kMaxThrottleAccel * cmd.throttle - kMaxBrakeDecel * cmd.brake;
    const double v_next = std::max(0.0, ego.v + a_cmd * dt);
    ego.a = (v_next - ego.v) / dt;
    ep.tracks[0].push_back(quantized(ego));
    ep.tracks[1].push_back(quantized(npc));
    ep.ego_pad.push_back(process.sample(t, pad_rng));
    auto& pad = ep.ego_pad.back();
    pad = {quantize(pad.pleased, data::kTextDigits), quantize(pad.aroused, data::kTextDigits),
           quantize(pad.dominant, data::kTextDigits)};

    // Integrate ego.
    const double wheel = -ego.steer_deg / kSteerRatio * std::numbers::pi / 180.0;
    ego.heading_rad += ego.v * std::tan(wheel) / kWheelbase * dt;
    ego.v = v_next;
    ego.x += ego.v * std::cos(ego.heading_rad) * dt;
    ego.y += ego.v * std::sin(ego.heading_rad) * dt;

    // Integrate the scripted road user.
    switch (config.scenario_id) {
      case 2: {
        const double t_next = t + dt;
        if (t_next >= config.trigger_time && cut_in_length > 0.0) {
          const double u = std::min(1.0, (t_next - static_cast<double>(trigger_step) * dt) / cut_in_duration);
          const Point2 p0{cut_in_x0, kLaneWidth}, p1{cut_in_x0 + cut_in_length / 3.0, kLaneWidth};
          const Point2 p2{cut_in_x0 + 2.0 * cut_in_length / 3.0, 0.0}, p3{cut_in_x0 + cut_in_length, 0.0};
          if (u < 1.0) {
            const Point2 p = bezier3(p0, p1, p2, p3, u);
            const Point2 d = bezier3_derivative(p0, p1, p2, p3, u);
            npc.x = p.x;
            npc.y = p.y;
            npc.heading_rad = std::atan2(d.y, d.x);
          } else {
            npc.x = cut_in_x0 + cut_in_length + npc.v * (t_next - static_cast<double>(trigger_step) * dt - cut_in_duration);
            npc.y = 0.0;
            npc.heading_rad = 0.0;
          }
        } else {
          npc.x += npc.v * dt;
        }
        break;
      }
      default:
        npc.v = npc_next_v;
        npc.x += npc.v * std::cos(npc.heading_rad) * dt;
        npc.y += npc.v * std::sin(npc.heading_rad) * dt;
        break;
    }
  }

  ep.meta["emotion"] = std::string(to_string(config.emotion_profile));
  ep.meta["trigger_time"] = format_number(config.trigger_time, data::kTextDigits);
  ep.meta["event_time"] = format_number(event_time, data::kTextDigits);
  ep.meta["emotion_switch_time"] =
      std::isfinite(process.switch_time) ? format_number(process.switch_time, data::kTextDigits) : "none";
  return ep;
}

std::string manifest_json(const std::vector<std::pair<std::string, ScenarioConfig>>& entries) {
  nlohmann::ordered_json j;
  j["schema_version"] = data::kSchemaVersion;
  j["episodes"] = nlohmann::ordered_json::array();
  for (const auto& [stem, c] : entries) {
    nlohmann::ordered_json e;
    e["stem"] = stem;
    e["scenario_id"] = c.scenario_id;
    e["emotion_profile"] = std::string(to_string(c.emotion_profile));
    e["seed"] = c.seed;
    e["trigger_time"] = c.trigger_time;
    e["duration"] = c.duration;
    e["reaction_delay"] = c.reaction_delay;
    e["emotion_switch_delay"] = c.emotion_switch_delay;
    nlohmann::ordered_json g;
    g["anger_speed"] = c.driver_gains.anger_speed;
    g["anger_gap"] = c.driver_gains.anger_gap;
    g["anger_lateral_noise"] = c.driver_gains.anger_lateral_noise;
    g["fright_brake"] = c.driver_gains.fright_brake;
    g["fright_speed"] = c.driver_gains.fright_speed;
    g["fright_steer_noise"] = c.driver_gains.fright_steer_noise;
    e["driver_gains"] = g;
    j["episodes"].push_back(e);
  }
  return j.dump(2) + "\n";
}

}  // namespace cpsor::sim
