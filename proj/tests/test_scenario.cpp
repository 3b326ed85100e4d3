#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "cpsor/discretizer.hpp"
#include "cpsor/scenario.hpp"
#include "cpsor/ttc.hpp"

using namespace cpsor;
using namespace cpsor::sim;

namespace {

Point2 de_casteljau(std::vector<Point2> pts, double u) {
  while (pts.size() > 1) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      pts[i] = {(1 - u) * pts[i].x + u * pts[i + 1].x, (1 - u) * pts[i].y + u * pts[i + 1].y};
    }
    pts.pop_back();
  }
  return pts.front();
}

data::Episode run(int scenario, Emotion e, std::uint64_t seed) {
  ScenarioConfig c;
  c.scenario_id = scenario;
  c.emotion_profile = e;
  c.seed = seed;
  return generate_episode(c);
}

}  // namespace

TEST(Bezier, EndpointsAndMidpoint) {
  const Point2 p0{0, 0}, p1{1, 0}, p2{2, 1}, p3{3, 1};
  EXPECT_EQ(bezier3(p0, p1, p2, p3, 0.0), p0);
  EXPECT_EQ(bezier3(p0, p1, p2, p3, 1.0), p3);
  const auto mid = bezier3(p0, p1, p2, p3, 0.5);
  EXPECT_NEAR(mid.x, 1.5, 1e-15);
  EXPECT_NEAR(mid.y, 0.5, 1e-15);
  EXPECT_THROW(bezier3(p0, p1, p2, p3, 1.1), std::domain_error);
  EXPECT_THROW(bezier3(p0, p1, p2, p3, -0.1), std::domain_error);
}

TEST(Bezier, MatchesDeCasteljau) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> c(-10, 10), u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Point2 p0{c(rng), c(rng)}, p1{c(rng), c(rng)}, p2{c(rng), c(rng)}, p3{c(rng), c(rng)};
    const double s = u(rng);
    const auto got = bezier3(p0, p1, p2, p3, s);
    const auto want = de_casteljau({p0, p1, p2, p3}, s);
    EXPECT_NEAR(got.x, want.x, 1e-12);
    EXPECT_NEAR(got.y, want.y, 1e-12);
    // Derivative against a central difference.
    if (s > 1e-4 && s < 1 - 1e-4) {
      const auto d = bezier3_derivative(p0, p1, p2, p3, s);
      const auto up = bezier3(p0, p1, p2, p3, s + 1e-6), down = bezier3(p0, p1, p2, p3, s - 1e-6);
      EXPECT_NEAR(d.x, (up.x - down.x) / 2e-6, 1e-5);
      EXPECT_NEAR(d.y, (up.y - down.y) / 2e-6, 1e-5);
    }
  }
}

TEST(Ttc, Examples) {
  data::VehicleState ego{0, "ego", 0, 0, 20, 0, 0, 0, 0, 0};
  data::VehicleState lead{0, "npc1", 30, 0, 10, 0, 0, 0, 0, 0};
  EXPECT_NEAR(compute_ttc(ego, lead), 3.0, 1e-12);
  lead.v = 30;
  EXPECT_TRUE(std::isinf(compute_ttc(ego, lead)));
  // Ego reaches (40, 0) after 4.0 s, the crosser after 4.8 s.
  data::VehicleState e2{0, "ego", 0, 0, 10, 0, 0, 0, 0, 0};
  data::VehicleState crosser{0, "npc1", 40, -48, 10, 0, 0, 0, 0, std::numbers::pi / 2};
  EXPECT_NEAR(compute_ttc(e2, crosser), 0.8, 1e-9);
  data::VehicleState same = e2;
  same.vehicle_id = "npc1";
  EXPECT_EQ(compute_ttc(e2, same), 0.0);
}

TEST(Driver, EquilibriumAndAngerOrdering) {
  DriverParams params;
  DriverGains gains;
  data::VehicleState ego{0, "ego", 0, 0, params.desired_speed, 0, 0, 0, 0, 0};
  SceneContext ctx;
  ctx.lookahead = {20.0, 0.0};
  const auto cmd = driver_step(ego, ctx, Emotion::Neutral, gains, params, nullptr);
  EXPECT_NEAR(cmd.throttle, 0.0, 1e-9);
  EXPECT_NEAR(cmd.brake, 0.0, 1e-9);
  EXPECT_NEAR(cmd.steer_deg, 0.0, 1e-9);

  ctx.lead_gap = params.min_gap + params.time_headway * ego.v;
  ctx.lead_speed = ego.v;
  const auto follow = driver_step(ego, ctx, Emotion::Neutral, gains, params, nullptr);
  EXPECT_NEAR(follow.throttle, 0.0, 1e-9);
  EXPECT_NEAR(follow.brake, 0.0, 1e-9);

  for (double v : {5.0, 12.0, 18.0, 22.0}) {
    ego.v = v;
    SceneContext free;
    free.lookahead = {20.0, 0.0};
    const auto n = driver_step(ego, free, Emotion::Neutral, gains, params, nullptr);
    const auto a = driver_step(ego, free, Emotion::Anger, gains, params, nullptr);
    EXPECT_GE(a.throttle, n.throttle) << v;
  }
}

TEST(Generator, ValidDeterministicAndManifest) {
  for (int s = 1; s <= 4; ++s) {
    for (Emotion e : {Emotion::Anger, Emotion::Neutral, Emotion::Fright}) {
      const auto ep = run(s, e, 3);
      EXPECT_NO_THROW(data::validate_episode(ep));
      EXPECT_EQ(ep.steps(), 250u);
      EXPECT_EQ(data::episode_to_csv(run(s, e, 3)), data::episode_to_csv(ep));
      EXPECT_EQ(ep.tracks.size(), 2u);
    }
  }
  ScenarioConfig bad;
  bad.trigger_time = 12.0;
  EXPECT_THROW(generate_episode(bad), std::invalid_argument);
  bad = {};
  bad.scenario_id = 5;
  EXPECT_THROW(generate_episode(bad), std::invalid_argument);
  const auto manifest = manifest_json({{"a", ScenarioConfig{}}});
  EXPECT_NE(manifest.find("\"stem\": \"a\""), std::string::npos);
}

TEST(Generator, LeadBrakesAtTrigger) {
  const auto ep = run(1, Emotion::Neutral, 4);
  const auto& lead = ep.tracks[1];
  const std::size_t k = data::steps_for(4.0);
  for (std::size_t i = 1; i < k; ++i) EXPECT_EQ(lead[i].v, lead[0].v);
  EXPECT_LT(lead[k].a, 0.0);
  EXPECT_LT(lead[k + 1].v, lead[k].v);
}

TEST(Generator, TtcDropsAfterTrigger) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto ep = run(1, Emotion::Neutral, seed);
    const std::size_t k = data::steps_for(4.0);
    double before = INFINITY, after = INFINITY;
    for (std::size_t i = 0; i < ep.steps(); ++i) {
      (i < k ? before : after) = std::min(i < k ? before : after, compute_ttc(ep.ego()[i], ep.tracks[1][i]));
    }
    EXPECT_LT(after, before) << seed;
  }
}

TEST(Generator, CutInFollowsBezier) {
  const auto ep = run(2, Emotion::Neutral, 5);
  const auto& npc = ep.tracks[1];
  const std::size_t k0 = data::steps_for(4.0), k1 = data::steps_for(6.5);
  EXPECT_DOUBLE_EQ(npc[k0].y, kLaneWidth);
  EXPECT_DOUBLE_EQ(npc[k1].y, 0.0);
  for (std::size_t k = k0 + 1; k <= k1; ++k) {
    EXPECT_LE(npc[k].y, npc[k - 1].y);
    EXPECT_LT(std::hypot(npc[k].x - npc[k - 1].x, npc[k].y - npc[k - 1].y), 1.0);  // no jumps
  }
}

TEST(Generator, EmotionEffects) {
  double lat_anger = 0, lat_neutral = 0, brake_fright = 0, brake_neutral = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (int s : {1, 2, 3}) {
      auto mean_abs_y = [](const data::Episode& ep) {
        double sum = 0;
        for (const auto& st : ep.ego()) sum += std::abs(st.y);
        return sum / static_cast<double>(ep.steps());
      };
      auto max_brake = [](const data::Episode& ep) {
        double m = 0;
        for (const auto& st : ep.ego()) m = std::max(m, st.brake);
        return m;
      };
      lat_anger += mean_abs_y(run(s, Emotion::Anger, seed));
      const auto neutral = run(s, Emotion::Neutral, seed);
      lat_neutral += mean_abs_y(neutral);
      brake_neutral += max_brake(neutral);
      brake_fright += max_brake(run(s, Emotion::Fright, seed));
    }
  }
  EXPECT_GT(lat_anger, lat_neutral);
  EXPECT_GT(brake_fright, brake_neutral);
}

TEST(Generator, EmotionSwitchFollowsEvent) {
  const auto ep = run(1, Emotion::Anger, 2);
  EXPECT_EQ(ep.meta.at("emotion"), "Anger");
  const double switch_time = std::stod(ep.meta.at("emotion_switch_time"));
  EXPECT_NEAR(switch_time, 5.5, 1e-9);
  for (const auto& p : ep.ego_pad) {
    EXPECT_LE(std::abs(p.pleased), 1.0);
    EXPECT_LE(std::abs(p.aroused), 1.0);
    EXPECT_LE(std::abs(p.dominant), 1.0);
  }
}

TEST(GroundTruth, SLayerMatchesDiscretizer) {
  const CognitiveEncoding enc;
  const auto model = reference_sor_dbn(enc);
  const auto ep = run(2, Emotion::Fright, 6);
  const auto frames = annotate_ground_truth(ep, model, 1, enc);
  ASSERT_EQ(frames.size(), ep.steps());
  EXPECT_EQ(annotate_ground_truth(ep, model, 1, enc), frames);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    EXPECT_EQ(frames[k].risk_grade, disc::step_risk_grade(ep, k));
    EXPECT_EQ(enc.accel_state(frames[k].npc_a_bin), enc.accel_state(disc::bin_acceleration(ep.tracks[1][k].a)));
  }
}

TEST(GroundTruth, EmotionGivenRiskMatchesModel) {
  const CognitiveEncoding enc;
  const auto model = reference_sor_dbn(enc, 0.0);
  ASSERT_TRUE(model.structure.inter_edges.empty());
  const int risk = model.structure.index_of("Risk_grade");
  const int emo = model.structure.index_of("Emo_cluster");
  std::map<int, std::vector<double>> counts;
  std::size_t frames = 0;
  for (std::uint64_t seed = 1; frames < 100000; ++seed) {
    const auto ep = run(static_cast<int>(seed % 4) + 1, Emotion::Neutral, seed);
    for (const auto& f : annotate_ground_truth(ep, model, seed, enc)) {
      auto& c = counts[static_cast<int>(f.risk_grade)];
      c.resize(3, 0.0);
      c[static_cast<std::size_t>(f.emo_cluster)] += 1.0;
      ++frames;
    }
  }
  int checked = 0;
  for (const auto& [r, c] : counts) {
    const double n = c[0] + c[1] + c[2];
    if (n < 20000) continue;  // sampling error must stay well below the tolerance
    const auto p = dbn::infer_conditional(model, emo, {{risk, r}});
    for (int e = 0; e < 3; ++e) EXPECT_NEAR(c[static_cast<std::size_t>(e)] / n, p[static_cast<std::size_t>(e)], 0.01);
    ++checked;
  }
  EXPECT_GE(checked, 1);
}
