#include <cmath>
#include <random>
#include <stdexcept>

#include "cpsor/neural.hpp"

namespace cpsor::nn {

PredictorParams::PredictorParams(const ModelDims& dims) : dims_(dims) {
  layout();
  flat_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(offsets_[kBlocks]));
}

void PredictorParams::layout() {
  const auto& d = dims_;
  if (d.phy_in < 1 || d.cog_in < 1 || d.gcn < 1 || d.lstm < 1 || d.attn < 1 || d.future_steps < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  shapes_ = {{{d.phy_in, d.gcn},
              {d.gcn, d.gcn},
              {d.cog_in, d.gcn},
              {d.gcn, d.gcn},
              {4 * d.lstm, 2 * d.gcn},
              {4 * d.lstm, d.lstm},
              {4 * d.lstm, 1},
              {d.attn, d.lstm},
              {d.attn, 1},
              {2 * d.future_steps, d.lstm},
              {2 * d.future_steps, 1}}};
  offsets_[0] = 0;
  for (int b = 0; b < kBlocks; ++b) {
    offsets_[static_cast<std::size_t>(b) + 1] =
        offsets_[static_cast<std::size_t>(b)] +
        static_cast<std::size_t>(shapes_[static_cast<std::size_t>(b)].first * shapes_[static_cast<std::size_t>(b)].second);
  }
}

Eigen::Map<const Eigen::MatrixXd> PredictorParams::block(Block b) const {
  const auto& s = shapes_[static_cast<std::size_t>(b)];
  return {flat_.data() + offsets_[static_cast<std::size_t>(b)], s.first, s.second};
}

Eigen::Map<Eigen::MatrixXd> PredictorParams::block(Block b) {
  const auto& s = shapes_[static_cast<std::size_t>(b)];
  return {flat_.data() + offsets_[static_cast<std::size_t>(b)], s.first, s.second};
}

void PredictorParams::set_flat(const Eigen::VectorXd& values) {
  if (values.size() != flat_.size()) throw std::invalid_argument("flat parameter length mismatch");
  flat_ = values;
}

PredictorParams PredictorParams::xavier(const ModelDims& dims, std::uint64_t seed) {
  PredictorParams p(dims);
  std::mt19937_64 rng(seed);
  auto fill = [&](Block b) {
    auto m = p.block(b);
    const double a = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, j) = a * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
      }
    }
  };
  for (Block b : {W1P, W2P, W1C, W2C, LstmWx, LstmWh, AttnP, HeadW}) fill(b);
  // Attention score vector: Xavier over (attn, 1).
  fill(AttnV);
  p.block(LstmB).block(dims.lstm, 0, dims.lstm, 1).setOnes();  // forget gate
  return p;
}

StepInput make_step_input(const graph::GraphSnapshot& phys, const std::string& ego_id,
                          const graph::GraphSnapshot* cog) {
  StepInput in;
  in.ego = phys.index_of(ego_id);
  if (in.ego < 0) throw std::invalid_argument("ego '" + ego_id + "' missing from physical snapshot");
  in.phy_adj = normalize_adjacency(phys.adjacency);
  in.phy_ax = in.phy_adj * phys.node_features;
  if (cog != nullptr) {
    in.cog_adj = normalize_adjacency(cog->adjacency);
    for (Eigen::Index i = 0; i < cog->node_features.rows(); ++i) {
      Eigen::Index s = 0;
      if (cog->node_features.row(i).maxCoeff(&s) != 1.0 || cog->node_features.row(i).sum() != 1.0) {
        throw std::invalid_argument("cognitive node features must be one-hot");
      }
      in.cog_states.push_back(static_cast<int>(s));
    }
  }
  return in;
}

EncodedSample Encoder::encode(const data::Sample& sample) const {
  if (variant != Variant::P && cognitive == nullptr) {
    throw std::invalid_argument(std::string("variant ") + std::string(to_string(variant)) + " needs a fitted DBN");
  }
  const std::size_t steps = sample.history_steps();
  if (steps == 0) throw std::invalid_argument("sample has no history");
  if (variant != Variant::P && sample.cognition.size() != steps) {
    throw std::invalid_argument("sample lacks cognitive frames");
  }
  EncodedSample out;
  std::vector<data::VehicleState> states(sample.history.size());
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t v = 0; v < sample.history.size(); ++v) states[v] = sample.history[v][t];
    const auto phys = graph::build_physical_graph(states, d_close, normalizer);
    if (variant == Variant::P) {
      out.steps.push_back(make_step_input(phys, sample.vehicle_ids.front(), nullptr));
    } else {
      const auto cog = graph::build_cognitive_graph(sample.cognition[t], *cognitive);
      out.steps.push_back(make_step_input(phys, sample.vehicle_ids.front(), &cog));
    }
  }
  out.origin = {sample.last_ego().x, sample.last_ego().y};
  out.target.resize(static_cast<Eigen::Index>(sample.future.size()), 2);
  for (std::size_t k = 0; k < sample.future.size(); ++k) {
    out.target(static_cast<Eigen::Index>(k), 0) = sample.future[k].x;
    out.target(static_cast<Eigen::Index>(k), 1) = sample.future[k].y;
  }
  return out;
}

std::vector<EncodedSample> Encoder::encode_all(const std::vector<data::Sample>& samples) const {
  std::vector<EncodedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(encode(s));
  return out;
}

Eigen::VectorXd encode_step(const StepInput& step, const PredictorParams& params, StepTrace* trace) {
  using B = PredictorParams;
  const auto& d = params.dims();
  if (step.phy_ax.cols() != d.phy_in) throw std::invalid_argument("physical feature width mismatch");
  StepTrace local;
  StepTrace& tr = trace != nullptr ? *trace : local;
  tr.z1p = step.phy_ax * params.block(B::W1P);
  tr.h1p = tr.z1p.cwiseMax(0.0);
  tr.z2p = (step.phy_adj.row(step.ego) * tr.h1p * params.block(B::W2P)).transpose();
  tr.x = Eigen::VectorXd::Zero(2 * d.gcn);
  tr.x.head(d.gcn) = tr.z2p.cwiseMax(0.0);
  if (step.cog_adj.size() > 0) {
    const auto w1c = params.block(B::W1C);
    const auto n = static_cast<Eigen::Index>(step.cog_states.size());
    Eigen::MatrixXd gathered(n, d.gcn);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int s = step.cog_states[static_cast<std::size_t>(i)];
      if (s < 0 || s >= d.cog_in) throw std::invalid_argument("cognitive state outside one-hot width");
      gathered.row(i) = w1c.row(s);
    }
    tr.z1c = step.cog_adj * gathered;
    tr.h1c = tr.z1c.cwiseMax(0.0);
    tr.z2c = step.cog_adj * tr.h1c * params.block(B::W2C);
    tr.h2c = tr.z2c.cwiseMax(0.0);
    tr.x.tail(d.gcn) = tr.h2c.colwise().mean().transpose();
  }
  return tr.x;
}

Eigen::VectorXd encode_step(const graph::GraphSnapshot& phys, const std::string& ego_id,
                            const graph::GraphSnapshot* cog, const PredictorParams& params) {
  return encode_step(make_step_input(phys, ego_id, cog), params, nullptr);
}

ForwardTrace forward(const EncodedSample& sample, const PredictorParams& params) {
  using B = PredictorParams;
  const auto& d = params.dims();
  ForwardTrace tr;
  tr.steps.resize(sample.steps.size());
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(sample.steps.size());
  for (std::size_t t = 0; t < sample.steps.size(); ++t) xs.push_back(encode_step(sample.steps[t], params, &tr.steps[t]));
  tr.lstm = lstm_forward(xs, params.block(B::LstmWx), params.block(B::LstmWh), params.block(B::LstmB));
  tr.attention = attention_pool(tr.lstm.h, params.block(B::AttnP), params.block(B::AttnV));
  tr.head = params.block(B::HeadW) * tr.attention.context + params.block(B::HeadB);
  tr.prediction.resize(d.future_steps, 2);
  for (Eigen::Index k = 0; k < d.future_steps; ++k) {
    tr.prediction(k, 0) = sample.origin(0) + params.output_scale[0] * tr.head(2 * k);
    tr.prediction(k, 1) = sample.origin(1) + params.output_scale[1] * tr.head(2 * k + 1);
  }
  return tr;
}

namespace {

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& z) { return (z.array() > 0.0).cast<double>().matrix(); }

void backward(const EncodedSample& sample, const PredictorParams& params, const ForwardTrace& tr,
              const Eigen::MatrixXd& dpred, PredictorParams& grad) {
  using B = PredictorParams;
  const auto& d = params.dims();
  const Eigen::Index L = d.lstm;
  const Eigen::Index G = d.gcn;

  Eigen::VectorXd dhead(2 * d.future_steps);
  for (Eigen::Index k = 0; k < d.future_steps; ++k) {
    dhead(2 * k) = dpred(k, 0) * params.output_scale[0];
    dhead(2 * k + 1) = dpred(k, 1) * params.output_scale[1];
  }
  const auto& att = tr.attention;
  grad.block(B::HeadW) += dhead * att.context.transpose();
  grad.block(B::HeadB) += dhead;
  const Eigen::VectorXd dctx = params.block(B::HeadW).transpose() * dhead;

  const std::size_t T = tr.lstm.h.size();
  std::vector<Eigen::VectorXd> dh(T);
  Eigen::VectorXd dalpha(static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    dalpha(static_cast<Eigen::Index>(t)) = dctx.dot(tr.lstm.h[t]);
    dh[t] = att.weights(static_cast<Eigen::Index>(t)) * dctx;
  }
  const double mean_dalpha = att.weights.dot(dalpha);
  const auto p = params.block(B::AttnP);
  const auto v = params.block(B::AttnV);
  for (std::size_t t = 0; t < T; ++t) {
    const double ds = att.weights(static_cast<Eigen::Index>(t)) * (dalpha(static_cast<Eigen::Index>(t)) - mean_dalpha);
    grad.block(B::AttnV) += ds * att.u[t];
    const Eigen::VectorXd dpre = (ds * v.col(0)).cwiseProduct((1.0 - att.u[t].array().square()).matrix());
    grad.block(B::AttnP) += dpre * tr.lstm.h[t].transpose();
    dh[t] += p.transpose() * dpre;
  }

  const auto wx = params.block(B::LstmWx);
  const auto wh = params.block(B::LstmWh);
  const auto w2p = params.block(B::W2P);
  const auto w2c = params.block(B::W2C);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(L), dc_next = Eigen::VectorXd::Zero(L);
  Eigen::VectorXd dz(4 * L);
  for (std::size_t t = T; t-- > 0;) {
    const auto& lt = tr.lstm;
    const Eigen::VectorXd h_dir = dh[t] + dh_next;
    const Eigen::ArrayXd tanh_c = lt.c[t].array().tanh();
    const Eigen::ArrayXd dc = dc_next.array() + h_dir.array() * lt.o[t].array() * (1.0 - tanh_c.square());
    Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(L);
    if (t > 0) c_prev = lt.c[t - 1].array();
    const Eigen::ArrayXd i = lt.i[t].array(), f = lt.f[t].array(), g = lt.g[t].array(), o = lt.o[t].array();
    dz.segment(0, L) = (dc * g * i * (1.0 - i)).matrix();
    dz.segment(L, L) = (dc * c_prev * f * (1.0 - f)).matrix();
    dz.segment(2 * L, L) = (dc * i * (1.0 - g.square())).matrix();
    dz.segment(3 * L, L) = (h_dir.array() * tanh_c * o * (1.0 - o)).matrix();
    const auto& st = tr.steps[t];
    grad.block(B::LstmWx) += dz * st.x.transpose();
    if (t > 0) grad.block(B::LstmWh) += dz * lt.h[t - 1].transpose();
    grad.block(B::LstmB) += dz;
    dh_next = wh.transpose() * dz;
    dc_next = (dc * f).matrix();
    const Eigen::VectorXd dx = wx.transpose() * dz;

    // Physical branch, ego row only.
    const auto& in = sample.steps[t];
    const Eigen::VectorXd dz2p = dx.head(G).cwiseProduct(relu_mask(st.z2p));
    const Eigen::RowVectorXd a_ego = in.phy_adj.row(in.ego);
    grad.block(B::W2P) += (st.h1p.transpose() * a_ego.transpose()) * dz2p.transpose();
    const Eigen::MatrixXd dh1p = a_ego.transpose() * (w2p * dz2p).transpose();
    const Eigen::MatrixXd dz1p = dh1p.cwiseProduct(relu_mask(st.z1p));
    grad.block(B::W1P) += in.phy_ax.transpose() * dz1p;

    if (in.cog_adj.size() > 0) {
      const auto n = st.h2c.rows();
      Eigen::MatrixXd dz2c = (dx.tail(G).transpose() / static_cast<double>(n)).replicate(n, 1);
      dz2c = dz2c.cwiseProduct(relu_mask(st.z2c));
      grad.block(B::W2C) += (in.cog_adj * st.h1c).transpose() * dz2c;
      const Eigen::MatrixXd dh1c = in.cog_adj.transpose() * dz2c * w2c.transpose();
      const Eigen::MatrixXd dz1c = dh1c.cwiseProduct(relu_mask(st.z1c));
      const Eigen::MatrixXd dgathered = in.cog_adj.transpose() * dz1c;
      auto gw1c = grad.block(B::W1C);
      for (Eigen::Index r = 0; r < n; ++r) gw1c.row(in.cog_states[static_cast<std::size_t>(r)]) += dgathered.row(r);
    }
  }
}

}  // namespace

LossAndGradient loss_and_gradients(const std::vector<const EncodedSample*>& batch, const PredictorParams& params) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const auto& d = params.dims();
  const double coef = 1.0 / (static_cast<double>(batch.size()) * static_cast<double>(d.future_steps));
  PredictorParams grad(d);
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const EncodedSample& s = *batch[b];
    if (s.target.rows() != d.future_steps) throw std::invalid_argument("sample horizon does not match the model");
    const auto tr = forward(s, params);
    const Eigen::MatrixXd diff = tr.prediction - s.target;
    const double sq = diff.squaredNorm();
    if (!std::isfinite(sq)) throw TrainingError("non-finite loss at sample " + std::to_string(b));
    loss += coef * sq;
    backward(s, params, tr, 2.0 * coef * diff, grad);
  }
  return {loss, grad.flat()};
}

LossAndGradient loss_and_gradients(const std::vector<EncodedSample>& batch, const PredictorParams& params) {
  std::vector<const EncodedSample*> ptrs;
  for (const auto& s : batch) ptrs.push_back(&s);
  return loss_and_gradients(ptrs, params);
}

double loss_only(const std::vector<EncodedSample>& batch, const PredictorParams& params) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double sq = (forward(batch[b], params).prediction - batch[b].target).squaredNorm();
    if (!std::isfinite(sq)) throw TrainingError("non-finite loss at sample " + std::to_string(b));
    total += sq;
  }
  return total / (static_cast<double>(batch.size()) * static_cast<double>(params.dims().future_steps));
}

std::array<double, 2> fit_output_scale(const std::vector<EncodedSample>& samples) {
  // One scale for both axes; a per-axis scale starves the near-constant lateral axis of gradient.
  if (samples.empty()) return {1.0, 1.0};
  double sq = 0.0;
  for (const auto& s : samples) {
    const Eigen::Index last = s.target.rows() - 1;
    for (int a = 0; a < 2; ++a) {
      const double off = s.target(last, a) - s.origin(a);
      sq += off * off;
    }
  }
  const double scale = std::max(1e-3, std::sqrt(sq / static_cast<double>(samples.size())));
  return {scale, scale};
}

}  // namespace cpsor::nn
