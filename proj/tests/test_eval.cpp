#include <gtest/gtest.h>

#include <random>

#include "cpsor/ablation.hpp"
#include "cpsor/cognitive_dbn.hpp"
#include "cpsor/metrics.hpp"
#include "cpsor/scenario.hpp"
#include "metric_oracle.hpp"

using namespace cpsor;
using namespace cpsor::eval;

namespace {

Eigen::MatrixXd traj(std::initializer_list<std::pair<double, double>> pts) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), 2);
  Eigen::Index r = 0;
  for (const auto& [x, y] : pts) {
    m(r, 0) = x;
    m(r, 1) = y;
    ++r;
  }
  return m;
}

}  // namespace

TEST(Metrics, HandCases) {
  const Trajectories zero{traj({{0, 0}, {1, 1}})};
  for (double v : rmse_per_step(zero, zero)) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(mae(zero, zero), 0.0);

  const Trajectories p1{traj({{1, 0}})}, t1{traj({{0, 0}})};
  EXPECT_DOUBLE_EQ(rmse_per_step(p1, t1)[0], 1.0);

  const Trajectories p2{traj({{3, 4}}), traj({{0, 0}})}, t2{traj({{0, 0}}), traj({{0, 0}})};
  EXPECT_NEAR(rmse_per_step(p2, t2)[0], std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(rmse_per_step(p2, t2)[0], 3.5355, 1e-4);

  EXPECT_DOUBLE_EQ(mae({traj({{0, 2}})}, {traj({{0, 0}})}), 2.0);
  const Trajectories p4{traj({{1, 0}, {0, 3}}), traj({{3, 4}, {0, 0}})};
  const Trajectories t4{traj({{0, 0}, {0, 0}}), traj({{0, 0}, {0, 0}})};
  EXPECT_DOUBLE_EQ(mae(p4, t4), (1.0 + 3.0 + 5.0 + 0.0) / 4.0);

  EXPECT_DOUBLE_EQ(ade({0, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(fde({0, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(ade({0.7, 0.7}), 0.7);
  EXPECT_DOUBLE_EQ(fde({0.7, 0.7}), 0.7);
  EXPECT_THROW(ade({}), std::invalid_argument);
  EXPECT_THROW(fde({}), std::invalid_argument);
  EXPECT_THROW(rmse_per_step(p2, t1), std::invalid_argument);
  EXPECT_THROW(mae({traj({{0, 0}, {1, 1}})}, t1), std::invalid_argument);
}

TEST(Metrics, MatchDirectArithmetic) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [pred, truth] = test::random_instance(rng);
    const auto want = test::oracle_metrics(pred, truth);
    const auto p = test::to_matrices(pred), t = test::to_matrices(truth);
    const auto h = horizon_metrics(p, t, 1.0);
    ASSERT_EQ(h.rmse_per_step.size(), want.rmse.size());
    for (std::size_t k = 0; k < want.rmse.size(); ++k) EXPECT_NEAR(h.rmse_per_step[k], want.rmse[k], 1e-12);
    EXPECT_NEAR(h.mae, want.mae, 1e-12);
    EXPECT_NEAR(h.ade, want.ade, 1e-12);
    EXPECT_NEAR(h.fde, want.fde, 1e-12);
    EXPECT_NEAR(h.ade, ade(h.rmse_per_step), 1e-12);
    EXPECT_NEAR(h.fde, h.rmse_per_step.back(), 1e-12);
    EXPECT_LE(h.mae, h.rmse + 1e-12);
    EXPECT_GE(h.mae, 0.0);
  }
}

TEST(Metrics, ReportFormatting) {
  EXPECT_EQ(relative_change(2.0, 1.5), "decreased by 25.00%");
  EXPECT_EQ(relative_change(2.0, 2.5), "increased by 25.00%");
  MetricReport r;
  r.variant = "cpsor";
  r.scenario_id = 1;
  r.n_samples = 3;
  HorizonMetrics h;
  h.ade = 2.29;
  h.fde = 1.91;
  r.horizons.push_back(h);
  const auto csv = reports_csv({r});
  EXPECT_NE(csv.find("cpsor,1,1,3,0,0,2.29,1.91"), std::string::npos) << csv;
}

TEST(Ablation, AggregateCsvAndMarkdown) {
  std::vector<AblationRow> rows;
  for (std::uint64_t seed : {1u, 2u}) {
    for (auto v : {nn::Variant::P, nn::Variant::CP, nn::Variant::CPSOR}) {
      for (int s = 0; s <= 4; ++s) {
        const double base = v == nn::Variant::P ? 2.0 : v == nn::Variant::CP ? 1.8 : 1.5;
        rows.push_back({seed, v, 1.0, s, 10, base + 0.1 * static_cast<double>(seed), 1.0, 2.29, 1.91});
      }
    }
  }
  const auto agg = aggregate(rows);
  EXPECT_EQ(agg.size(), 15u);
  EXPECT_NEAR(mean_rmse(agg, nn::Variant::P, 1.0), 2.15, 1e-12);
  EXPECT_NEAR(mean_rmse(rows, nn::Variant::CPSOR, 1.0), 1.65, 1e-12);
  EXPECT_EQ(agg.front().n_samples, 20u);
  EXPECT_THROW(mean_rmse(rows, nn::Variant::P, 3.0), std::invalid_argument);
  const auto csv = ablation_csv(agg);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);
  const auto md = ablation_markdown(agg);
  EXPECT_NE(md.find("| 1 | cpsor | 2.29 | 1.91 |"), std::string::npos) << md;
  EXPECT_NE(md.find("decreased by"), std::string::npos);
}

TEST(DbnComparison, IdenticalModelsAndMismatch) {
  const CognitiveEncoding enc;
  const auto truth = sim::reference_sor_dbn(enc);
  dbn::DiscreteData data;
  data.n_nodes = truth.structure.size();
  for (std::uint64_t s = 0; s < 20; ++s) data.sequences.push_back(dbn::sample(truth, 50, s));
  const auto fitted = dbn::mle_fit(truth.structure, data);
  const auto r = compare_dbn(data, fitted, fitted, 2);
  EXPECT_EQ(r.bic_sor_params, r.bic_ordinary_params);
  EXPECT_EQ(r.bic_sor_nodes, r.bic_ordinary_nodes);
  EXPECT_EQ(r.tv_sor, r.tv_ordinary);
  for (const auto& p : r.curve) EXPECT_EQ(p.sor, p.ordinary);
  EXPECT_GT(r.bic_sor_nodes, r.bic_sor_params);  // the node-count penalty is smaller here

  const auto ordinary = dbn::mle_fit(ordinary_structure(enc), data);
  const auto c = compare_dbn(data, fitted, ordinary, 1);
  EXPECT_GE(c.tv_ordinary, 0.0);
  EXPECT_LE(c.tv_sor, 1.0);
  EXPECT_NE(curves_csv({c}).find("scenario_id,npc_a_state"), std::string::npos);
  const auto table = comparison_csv({r, c});
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);

  dbn::DbnModel other = fitted;
  other.structure.nodes.pop_back();
  EXPECT_THROW(compare_dbn(data, fitted, other, 1), std::invalid_argument);
}
