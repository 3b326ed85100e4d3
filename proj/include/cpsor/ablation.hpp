#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpsor/dbn.hpp"
#include "cpsor/discretizer.hpp"
#include "cpsor/metrics.hpp"
#include "cpsor/neural.hpp"

namespace cpsor::eval {

struct AblationConfig {
  std::vector<double> horizons{1.0, 2.0, 3.0};
  double history_s = 3.0;
  std::size_t stride = 25;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<nn::Variant> variants{nn::Variant::P, nn::Variant::CP, nn::Variant::CPSOR};
  nn::ModelDims dims;  // future_steps is set per horizon
  nn::TrainConfig train;
  dbn::SearchOptions search;
  disc::DiscretizerConfig discretizer;
  double d_close = graph::kDefaultCloseDistance;
  double train_fraction = 0.7;
  double valid_fraction = 0.15;
};

struct AblationRow {
  std::uint64_t seed = 0;  // 0 in aggregated rows
  nn::Variant variant = nn::Variant::P;
  double horizon_s = 1.0;
  int scenario_id = 0;  // 0 = all scenarios
  std::size_t n_samples = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double ade = 0.0;
  double fde = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;  // per seed
};

// Trains every variant on identical splits per seed and scores the test split.
// Throws std::invalid_argument if a variant's DBN cannot be fitted.
AblationResult run_ablation(std::vector<data::Episode> episodes, const AblationConfig& config,
                            std::ostream* log = nullptr);

// Mean over seeds; one row per (variant, horizon, scenario) with seed 0.
std::vector<AblationRow> aggregate(const std::vector<AblationRow>& rows);
double mean_rmse(const std::vector<AblationRow>& rows, nn::Variant variant, double horizon_s, int scenario_id = 0);

std::string ablation_csv(const std::vector<AblationRow>& rows);
// Scenario x {ADE, FDE} per variant plus RMSE change relative to P and CP.
std::string ablation_markdown(const std::vector<AblationRow>& aggregated);

struct ConditionalCurvePoint {
  int npc_a_state = 0;
  int ego_a_state = 0;
  double sor = 0.0;
  double ordinary = 0.0;
  double empirical = 0.0;
};

struct DbnComparison {
  int scenario_id = 0;
  double bic_sor_params = 0.0;
  double bic_ordinary_params = 0.0;
  double bic_sor_nodes = 0.0;
  double bic_ordinary_nodes = 0.0;
  double tv_sor = 0.0;       // empirical-weighted total variation to the data
  double tv_ordinary = 0.0;
  std::vector<ConditionalCurvePoint> curve;  // P(Ego_a | Npc_a)
};

// Both models must be fitted on `data` and share the node list.
DbnComparison compare_dbn(const dbn::DiscreteData& data, const dbn::DbnModel& sor, const dbn::DbnModel& ordinary,
                          int scenario_id = 0);
std::string comparison_csv(const std::vector<DbnComparison>& reports);
std::string curves_csv(const std::vector<DbnComparison>& reports);

}  // namespace cpsor::eval
