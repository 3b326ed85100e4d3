#pragma once

// Encoded CPSOR samples from generated episodes and a central-difference
// gradient oracle.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "cpsor/discretizer.hpp"
#include "cpsor/graph_builder.hpp"
#include "cpsor/neural.hpp"
#include "cpsor/pipeline.hpp"
#include "cpsor/scenario.hpp"

namespace cpsor::test {

struct TinyProblem {
  std::vector<nn::EncodedSample> samples;
  nn::ModelDims dims;
};

// Short windows from one generated episode per scenario, encoded for `variant`
// with the reference SOR DBN as the cognitive model.
inline TinyProblem tiny_problem(nn::Variant variant, double t_p = 0.4, double t_f = 0.12, std::size_t stride = 60) {
  std::vector<data::Episode> eps;
  for (int s = 1; s <= 4; ++s) {
    for (Emotion e : {Emotion::Anger, Emotion::Fright, Emotion::Neutral}) {
      sim::ScenarioConfig cfg;
      cfg.scenario_id = s;
      cfg.emotion_profile = e;
      cfg.seed = 5;
      eps.push_back(sim::generate_episode(cfg));
    }
  }
  const auto d = disc::Discretizer::fit(eps);
  const auto frames = pipeline::discretize(d, eps);
  std::vector<std::size_t> idx{1, 4, 7, 10};
  const auto samples = pipeline::windows(eps, frames, idx, t_p, t_f, stride);
  const CognitiveEncoding enc;
  nn::Encoder encoder;
  encoder.variant = variant;
  encoder.normalizer = graph::FeatureNormalizer::fit(samples);
  if (variant != nn::Variant::P) {
    encoder.cognitive = std::make_shared<graph::CognitiveWeights>(sim::reference_sor_dbn(enc), enc);
  }
  TinyProblem p;
  p.samples = encoder.encode_all(samples);
  p.dims.cog_in = enc.accel_states();
  p.dims.gcn = 4;
  p.dims.lstm = 5;
  p.dims.attn = 3;
  p.dims.future_steps = static_cast<int>(data::steps_for(t_f));
  return p;
}

// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, floor).
inline double max_gradient_error(const std::vector<nn::EncodedSample>& batch, const nn::PredictorParams& params,
                                 double eps = 1e-4, double floor = 1e-6) {
  const auto analytic = nn::loss_and_gradients(batch, params).gradient;
  double worst = 0.0;
  nn::PredictorParams probe = params;
  Eigen::VectorXd x = params.flat();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + eps;
    probe.set_flat(x);
    const double up = nn::loss_only(batch, probe);
    x[i] = keep - eps;
    probe.set_flat(x);
    const double down = nn::loss_only(batch, probe);
    x[i] = keep;
    const double numeric = (up - down) / (2 * eps);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace cpsor::test
