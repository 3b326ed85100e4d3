#include "cpsor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include "cpsor/text_format.hpp"

namespace cpsor::pipeline {

std::vector<DatasetEntry> dataset_plan(const std::vector<int>& scenarios, const std::vector<Emotion>& emotions,
                                       int episodes, std::uint64_t seed, const sim::ScenarioConfig& base) {
  if (episodes < 0) throw std::invalid_argument("episode count must be non-negative");
  std::vector<DatasetEntry> plan;
  for (int scenario : scenarios) {
    for (Emotion e : emotions) {
      for (int i = 0; i < episodes; ++i) {
        sim::ScenarioConfig c = base;
        c.scenario_id = scenario;
        c.emotion_profile = e;
        c.seed = seed + static_cast<std::uint64_t>(i);
        c.validate();
        std::string emo(to_string(e));
        std::transform(emo.begin(), emo.end(), emo.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        char stem[96];
        std::snprintf(stem, sizeof stem, "s%d_%s_%06llu", scenario, emo.c_str(), static_cast<unsigned long long>(c.seed));
        plan.push_back({stem, c});
      }
    }
  }
  return plan;
}

void sort_canonical(std::vector<data::Episode>& episodes) {
  auto key = [](const data::Episode& e) {
    auto it = e.meta.find("emotion");
    return std::make_tuple(e.scenario_id, it == e.meta.end() ? std::string() : it->second, e.seed, e.sub_style_score);
  };
  std::stable_sort(episodes.begin(), episodes.end(),
                   [&](const data::Episode& a, const data::Episode& b) { return key(a) < key(b); });
}

Split split_episodes(const std::vector<data::Episode>& episodes, std::uint64_t seed, double train_fraction,
                     double valid_fraction) {
  if (train_fraction <= 0.0 || valid_fraction < 0.0 || train_fraction + valid_fraction > 1.0) {
    throw std::invalid_argument("invalid split fractions");
  }
  std::map<int, std::vector<std::size_t>> by_scenario;
  for (std::size_t i = 0; i < episodes.size(); ++i) by_scenario[episodes[i].scenario_id].push_back(i);
  Split split;
  std::mt19937_64 rng(seed);
  for (auto& [scenario, idx] : by_scenario) {
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
    const auto n = static_cast<double>(idx.size());
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * n));
    auto n_valid = static_cast<std::size_t>(std::llround(valid_fraction * n));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size());
    n_valid = std::min(n_valid, idx.size() - n_train);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& dst = k < n_train ? split.train : (k < n_train + n_valid ? split.valid : split.test);
      dst.push_back(idx[k]);
    }
  }
  for (auto* v : {&split.train, &split.valid, &split.test}) std::sort(v->begin(), v->end());
  return split;
}

std::vector<data::Episode> subset(const std::vector<data::Episode>& episodes, const std::vector<std::size_t>& idx) {
  std::vector<data::Episode> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(episodes.at(i));
  return out;
}

std::vector<std::vector<CognitiveFrame>> discretize(const disc::Discretizer& discretizer,
                                                    const std::vector<data::Episode>& episodes) {
  std::vector<std::vector<CognitiveFrame>> out;
  out.reserve(episodes.size());
  for (const auto& e : episodes) out.push_back(discretizer.frames(e));
  return out;
}

dbn::DiscreteData dbn_data(const std::vector<std::vector<CognitiveFrame>>& frames, const std::vector<std::size_t>& idx,
                           const CognitiveEncoding& encoding) {
  std::vector<std::vector<CognitiveFrame>> chosen;
  chosen.reserve(idx.size());
  for (std::size_t i : idx) chosen.push_back(frames.at(i));
  return encode_sequences(chosen, encoding);
}

dbn::DbnModel fit_ordinary(const dbn::DiscreteData& data, const CognitiveEncoding& encoding, double alpha) {
  return dbn::mle_fit(ordinary_structure(encoding), data, alpha);
}

std::vector<data::Sample> windows(const std::vector<data::Episode>& episodes,
                                  const std::vector<std::vector<CognitiveFrame>>& frames,
                                  const std::vector<std::size_t>& idx, double t_p, double t_f, std::size_t stride) {
  std::vector<data::Sample> out;
  for (std::size_t i : idx) {
    const auto* f = frames.empty() ? nullptr : &frames.at(i);
    auto s = data::window_samples(episodes.at(i), t_p, t_f, stride, f, i);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

}  // namespace cpsor::pipeline
