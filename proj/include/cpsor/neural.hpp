#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cpsor/graph_builder.hpp"
#include "cpsor/trajectory_data.hpp"

namespace cpsor::nn {

using MatRef = Eigen::Ref<const Eigen::MatrixXd>;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// D^{-1/2} (A + I) D^{-1/2}, D the row sums of A + I.
Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& a);

// ReLU(A_norm * H * W).
Eigen::MatrixXd gcn_layer(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a_norm, const Eigen::MatrixXd& w);

// Gate blocks are stacked as (input, forget, candidate, output).
struct LstmTrace {
  std::vector<Eigen::VectorXd> h, c, i, f, g, o;
};
LstmTrace lstm_forward(const std::vector<Eigen::VectorXd>& inputs, const MatRef& wx, const MatRef& wh,
                       const VecRef& b);

struct AttentionTrace {
  std::vector<Eigen::VectorXd> u;  // tanh(P h_t)
  Eigen::VectorXd weights;
  Eigen::VectorXd context;
};
AttentionTrace attention_pool(const std::vector<Eigen::VectorXd>& hidden, const MatRef& p, const VecRef& v);

enum class Variant { P, CP, CPSOR };
std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view text);

struct ModelDims {
  int phy_in = 4;
  int cog_in = 60;  // one-hot width (widest cognitive cardinality)
  int gcn = 16;
  int lstm = 32;
  int attn = 16;
  int future_steps = 25;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// All learnable weights in one flat vector; the accessors are views into it.
class PredictorParams {
 public:
  PredictorParams() = default;
  explicit PredictorParams(const ModelDims& dims);  // zeros
  static PredictorParams xavier(const ModelDims& dims, std::uint64_t seed);

  const ModelDims& dims() const { return dims_; }
  std::size_t size() const { return static_cast<std::size_t>(flat_.size()); }
  const Eigen::VectorXd& flat() const { return flat_; }
  void set_flat(const Eigen::VectorXd& values);

  // Fixed per-axis scale applied to head outputs (meters per unit).
  std::array<double, 2> output_scale{1.0, 1.0};

  enum Block { W1P, W2P, W1C, W2C, LstmWx, LstmWh, LstmB, AttnP, AttnV, HeadW, HeadB, kBlocks };
  Eigen::Map<const Eigen::MatrixXd> block(Block b) const;
  Eigen::Map<Eigen::MatrixXd> block(Block b);
  std::size_t offset(Block b) const { return offsets_[b]; }

  friend bool operator==(const PredictorParams&, const PredictorParams&) = default;

 private:
  ModelDims dims_;
  Eigen::VectorXd flat_;
  std::array<std::size_t, kBlocks + 1> offsets_{};
  std::array<std::pair<int, int>, kBlocks> shapes_{};
  void layout();
};

// Graph inputs for one history step, precomputed from snapshots.
struct StepInput {
  Eigen::MatrixXd phy_adj;  // normalized
  Eigen::MatrixXd phy_ax;   // normalized adjacency times node features
  int ego = 0;
  Eigen::MatrixXd cog_adj;  // normalized; empty when the cognitive branch is absent
  std::vector<int> cog_states;
};

StepInput make_step_input(const graph::GraphSnapshot& phys, const std::string& ego_id,
                          const graph::GraphSnapshot* cog);

struct EncodedSample {
  std::vector<StepInput> steps;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();  // last observed ego position
  Eigen::MatrixXd target;                             // T_f x 2 absolute positions
};

// Turns windows into network inputs for one variant.
struct Encoder {
  Variant variant = Variant::P;
  graph::FeatureNormalizer normalizer;
  double d_close = graph::kDefaultCloseDistance;
  std::shared_ptr<const graph::CognitiveWeights> cognitive;  // required for CP and CPSOR

  EncodedSample encode(const data::Sample& sample) const;
  std::vector<EncodedSample> encode_all(const std::vector<data::Sample>& samples) const;
};

struct StepTrace {
  Eigen::MatrixXd z1p, h1p;
  Eigen::VectorXd z2p;  // ego row only
  Eigen::MatrixXd z1c, h1c, z2c, h2c;
  Eigen::VectorXd x;
};

struct ForwardTrace {
  std::vector<StepTrace> steps;
  LstmTrace lstm;
  AttentionTrace attention;
  Eigen::VectorXd head;        // raw head output, 2 T_f
  Eigen::MatrixXd prediction;  // T_f x 2 absolute positions
};

// Step embedding: ego row of the physical branch, then the mean-pooled
// cognitive branch (zeros when absent).
Eigen::VectorXd encode_step(const StepInput& step, const PredictorParams& params, StepTrace* trace = nullptr);
Eigen::VectorXd encode_step(const graph::GraphSnapshot& phys, const std::string& ego_id,
                            const graph::GraphSnapshot* cog, const PredictorParams& params);

ForwardTrace forward(const EncodedSample& sample, const PredictorParams& params);

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;
};

// Mean squared Euclidean error over every predicted point of the batch.
LossAndGradient loss_and_gradients(const std::vector<const EncodedSample*>& batch, const PredictorParams& params);
LossAndGradient loss_and_gradients(const std::vector<EncodedSample>& batch, const PredictorParams& params);
double loss_only(const std::vector<EncodedSample>& batch, const PredictorParams& params);

// RMS length of the final-step offset, used for both axes; floored at 1e-3.
std::array<double, 2> fit_output_scale(const std::vector<EncodedSample>& samples);

struct TrainConfig {
  double learning_rate = 0.02;
  double momentum = 0.9;
  int epochs = 30;
  int batch_size = 32;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;
};

struct EpochLoss {
  int epoch = 0;
  double train = 0.0;
  double valid = 0.0;
};

struct TrainResult {
  PredictorParams params;
  std::vector<EpochLoss> losses;
  int best_epoch = 0;  // 0 means params0 were never beaten
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TrainResult fit(const std::vector<EncodedSample>& train, const std::vector<EncodedSample>& valid,
                const PredictorParams& params0, const TrainConfig& config);

std::string loss_csv(const std::vector<EpochLoss>& losses);

inline constexpr int kWeightsSchemaVersion = 1;
std::string weights_to_text(const PredictorParams& params, Variant variant);
PredictorParams weights_from_text(const std::string& text, Variant* variant = nullptr);

}  // namespace cpsor::nn
