#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cpsor/graph_builder.hpp"
#include "cpsor/scenario.hpp"

using namespace cpsor;
using namespace cpsor::graph;

namespace {

data::VehicleState at(const std::string& id, double x, double y) {
  data::VehicleState s;
  s.vehicle_id = id;
  s.x = x;
  s.y = y;
  s.v = 5.0;
  return s;
}

CognitiveFrame frame_from(const CognitiveEncoding& enc, const std::vector<int>& states) { return enc.decode(states); }

}  // namespace

TEST(PhysicalGraph, Weights) {
  std::vector<data::VehicleState> two{at("ego", 0, 0), at("npc1", 0, 0)};
  EXPECT_DOUBLE_EQ(build_physical_graph(two).adjacency(0, 1), 1.0);
  two[1].x = 1.0;
  EXPECT_NEAR(build_physical_graph(two).adjacency(0, 1), 0.367879441171, 1e-12);
  two[1].x = 50.0;
  EXPECT_EQ(build_physical_graph(two, 50.0).adjacency(0, 1), 0.0);
  two[1].x = 49.0;
  EXPECT_GT(build_physical_graph(two, 50.0).adjacency(0, 1), 0.0);
  two[1].x = std::nan("");
  EXPECT_THROW(build_physical_graph(two), std::invalid_argument);
}

TEST(PhysicalGraph, SymmetricMonotoneAndSorted) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<data::VehicleState> states{at("zeta", u(rng), u(rng)), at("ego", u(rng), u(rng)),
                                           at("alpha", u(rng), u(rng))};
    const auto g = build_physical_graph(states, 30.0);
    EXPECT_EQ(g.node_ids, (std::vector<std::string>{"alpha", "ego", "zeta"}));
    EXPECT_TRUE(g.adjacency.isApprox(g.adjacency.transpose(), 0.0));
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(g.adjacency(i, i), 0.0);
      for (int j = 0; j < 3; ++j) {
        EXPECT_GE(g.adjacency(i, j), 0.0);
        EXPECT_LE(g.adjacency(i, j), 1.0);
      }
    }
  }
  // Weight falls as the gap widens.
  double previous = 2.0;
  for (double d = 0.0; d < 10.0; d += 0.5) {
    std::vector<data::VehicleState> two{at("ego", 0, 0), at("npc1", d, 0)};
    const double w = build_physical_graph(two).adjacency(0, 1);
    EXPECT_LT(w, previous);
    previous = w;
  }
}

TEST(PhysicalGraph, Normalizer) {
  data::Sample s;
  s.history = {{at("ego", 0, 0), at("ego", 2, 0)}, {at("npc1", 4, 2), at("npc1", 6, 2)}};
  const auto n = FeatureNormalizer::fit({s});
  const auto back = FeatureNormalizer::from_json(n.to_json());
  EXPECT_EQ(back.mean, n.mean);
  EXPECT_EQ(back.scale, n.scale);
  EXPECT_NEAR(n.mean[0], 3.0, 1e-12);
}

TEST(CognitiveGraph, SingleParentEdgeReadsCpt) {
  const CognitiveEncoding enc;
  const auto model = sim::reference_sor_dbn(enc);
  const int emo = model.structure.index_of("Emo_cluster");
  const int lat = model.structure.index_of("Man_lateral");
  ASSERT_EQ(model.structure.parents(lat), (std::vector<int>{emo}));
  const CognitiveWeights weights(model, enc);
  std::vector<int> states(enc.nodes().size(), 0);
  states[static_cast<std::size_t>(model.structure.index_of("Ego_a"))] = enc.accel_state(0);
  states[static_cast<std::size_t>(model.structure.index_of("Npc_a"))] = enc.accel_state(0);
  for (int e = 0; e < 3; ++e) {
    for (int l = 0; l < 3; ++l) {
      states[static_cast<std::size_t>(emo)] = e;
      states[static_cast<std::size_t>(lat)] = l;
      const auto g = build_cognitive_graph(frame_from(enc, states), weights);
      EXPECT_NEAR(g.adjacency(lat, emo), model.intra[lat].table[static_cast<std::size_t>(e * 3 + l)], 1e-12);
      EXPECT_NEAR(edge_weight(model, emo, lat, e, l), model.intra[lat].table[static_cast<std::size_t>(e * 3 + l)], 1e-12);
    }
  }
}

TEST(CognitiveGraph, DeterministicEdgeAndNonEdges) {
  const CognitiveEncoding enc;
  auto model = sim::reference_sor_dbn(enc);
  const int ego = model.structure.index_of("Ego_a");
  const int longi = model.structure.index_of("Man_longi");
  ASSERT_EQ(model.structure.parents(longi), (std::vector<int>{ego}));
  auto& cpt = model.intra[static_cast<std::size_t>(longi)];
  for (std::size_t r = 0; r < cpt.rows(); ++r) {
    for (int k = 0; k < 3; ++k) cpt.table[r * 3 + k] = static_cast<int>(r % 3) == k ? 1.0 : 0.0;
  }
  std::vector<int> states(enc.nodes().size(), 0);
  states[static_cast<std::size_t>(ego)] = 31;
  states[static_cast<std::size_t>(longi)] = 31 % 3;
  const auto g = build_cognitive_graph(frame_from(enc, states), model, enc);
  EXPECT_DOUBLE_EQ(g.adjacency(longi, ego), 1.0);
  for (int i = 0; i < g.adjacency.rows(); ++i) {
    for (int j = 0; j < g.adjacency.cols(); ++j) {
      const bool edge = model.structure.intra_edges.count({j, i}) > 0;
      if (!edge) {
        EXPECT_EQ(g.adjacency(i, j), 0.0) << i << "," << j;
      }
      EXPECT_GE(g.adjacency(i, j), 0.0);
      EXPECT_LE(g.adjacency(i, j), 1.0 + 1e-12);
    }
  }
  EXPECT_EQ(g.node_ids.front(), "Npc_a");
  EXPECT_EQ(g.node_features.rows(), 9);
  EXPECT_EQ(g.node_features.cols(), enc.accel_states());
  EXPECT_DOUBLE_EQ(g.node_features.row(ego).sum(), 1.0);
  EXPECT_DOUBLE_EQ(g.node_features(ego, 31), 1.0);
}

TEST(CognitiveGraph, MultiParentMarginalizes) {
  const CognitiveEncoding enc;
  const auto model = sim::reference_sor_dbn(enc);
  const int emo = model.structure.index_of("Emo_cluster");
  const int obj = model.structure.index_of("Obj_style");
  // P(obj | emo) by exact inference agrees with the edge weight.
  for (int e = 0; e < 3; ++e) {
    const auto p = dbn::infer_conditional(model, obj, {{emo, e}});
    for (int o = 0; o < 3; ++o) EXPECT_NEAR(edge_weight(model, emo, obj, e, o), p[static_cast<std::size_t>(o)], 1e-12);
  }
}

TEST(CognitiveGraph, Errors) {
  const CognitiveEncoding enc;
  const auto model = sim::reference_sor_dbn(enc);
  dbn::DbnModel other = model;
  other.structure.nodes[0].name = "Other";
  EXPECT_THROW(CognitiveWeights(other, enc), std::invalid_argument);
  EXPECT_THROW(edge_weight(model, 0, 1, 0, 0), std::invalid_argument);
}

TEST(Snapshot, DumpIsRowMajor) {
  std::vector<data::VehicleState> two{at("ego", 0, 0), at("npc1", 1, 0)};
  const auto text = dump_snapshot(build_physical_graph(two));
  EXPECT_NE(text.find("0.367879441"), std::string::npos);
}
