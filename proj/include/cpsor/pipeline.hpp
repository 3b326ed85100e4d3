#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpsor/cognitive_dbn.hpp"
#include "cpsor/dbn.hpp"
#include "cpsor/discretizer.hpp"
#include "cpsor/scenario.hpp"
#include "cpsor/trajectory_data.hpp"

namespace cpsor::pipeline {

struct DatasetEntry {
  std::string stem;
  sim::ScenarioConfig config;
};

// N episodes per (scenario, emotion) cell with seeds seed .. seed + N - 1.
std::vector<DatasetEntry> dataset_plan(const std::vector<int>& scenarios, const std::vector<Emotion>& emotions,
                                       int episodes, std::uint64_t seed, const sim::ScenarioConfig& base = {});

// Orders episodes by content (scenario, emotion label, seed, style score) so
// results never depend on file order.
void sort_canonical(std::vector<data::Episode>& episodes);

struct Split {
  std::vector<std::size_t> train, valid, test;
};

// Per-scenario shuffle then fractional split; each non-empty scenario keeps
// at least one training episode.
Split split_episodes(const std::vector<data::Episode>& episodes, std::uint64_t seed, double train_fraction = 0.7,
                     double valid_fraction = 0.15);

std::vector<data::Episode> subset(const std::vector<data::Episode>& episodes, const std::vector<std::size_t>& idx);

std::vector<std::vector<CognitiveFrame>> discretize(const disc::Discretizer& discretizer,
                                                    const std::vector<data::Episode>& episodes);

dbn::DiscreteData dbn_data(const std::vector<std::vector<CognitiveFrame>>& frames, const std::vector<std::size_t>& idx,
                           const CognitiveEncoding& encoding = {});

// MLE fit of the bundled ordinary structure.
dbn::DbnModel fit_ordinary(const dbn::DiscreteData& data, const CognitiveEncoding& encoding = {}, double alpha = 0.0);

std::vector<data::Sample> windows(const std::vector<data::Episode>& episodes,
                                  const std::vector<std::vector<CognitiveFrame>>& frames,
                                  const std::vector<std::size_t>& idx, double t_p, double t_f, std::size_t stride);

}  // namespace cpsor::pipeline
