#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpsor/cognitive_dbn.hpp"
#include "cpsor/dbn.hpp"
#include "cpsor/trajectory_data.hpp"

namespace cpsor::graph {

inline constexpr double kDefaultCloseDistance = 50.0;  // m

enum class GraphKind { Physical, Cognitive };

// Adjacency rows are receivers: adjacency(i, j) is the weight of the message j -> i.
struct GraphSnapshot {
  Eigen::MatrixXd node_features;
  Eigen::MatrixXd adjacency;
  std::vector<std::string> node_ids;
  GraphKind kind = GraphKind::Physical;

  int index_of(const std::string& id) const;  // -1 if absent
};

// Affine standardization of (x, y, v, a), fitted once on the training split.
struct FeatureNormalizer {
  std::array<double, 4> mean{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> scale{1.0, 1.0, 1.0, 1.0};

  static FeatureNormalizer fit(const std::vector<data::Sample>& samples);
  Eigen::RowVector4d apply(const data::VehicleState& s) const;

  std::string to_json() const;
  static FeatureNormalizer from_json(const std::string& text);
};

// Nodes ordered by vehicle id; edge weight exp(-d) for d < d_close, else 0.
GraphSnapshot build_physical_graph(std::span<const data::VehicleState> states,
                                   double d_close = kDefaultCloseDistance,
                                   const FeatureNormalizer& normalizer = {});

// Per-edge lookup of P(child state | parent state) with the child's other
// parents marginalized under the model.
class CognitiveWeights {
 public:
  CognitiveWeights() = default;
  CognitiveWeights(const dbn::DbnModel& model, const CognitiveEncoding& encoding = {});

  const std::vector<dbn::Edge>& edges() const { return edges_; }
  double weight(std::size_t edge, int parent_state, int child_state) const;
  const CognitiveEncoding& encoding() const { return encoding_; }
  std::size_t node_count() const { return node_count_; }
  int max_cardinality() const { return max_cardinality_; }
  const std::vector<int>& cardinalities() const { return cards_; }

 private:
  CognitiveEncoding encoding_;
  std::size_t node_count_ = 0;
  int max_cardinality_ = 0;
  std::vector<int> cards_;
  std::vector<dbn::Edge> edges_;
  std::vector<std::vector<double>> tables_;  // [edge][parent_state * card_child + child_state]
};

// Conditional weight of one edge, computed directly from the model.
double edge_weight(const dbn::DbnModel& model, int parent, int child, int parent_state, int child_state);

// One node per cognitive factor with a one-hot feature padded to the widest
// cardinality. Throws std::invalid_argument on a state outside the model.
GraphSnapshot build_cognitive_graph(const CognitiveFrame& frame, const CognitiveWeights& weights);
GraphSnapshot build_cognitive_graph(const CognitiveFrame& frame, const dbn::DbnModel& model,
                                    const CognitiveEncoding& encoding = {});

// Row-major text dump at 9 significant digits.
std::string dump_snapshot(const GraphSnapshot& snapshot);

}  // namespace cpsor::graph
