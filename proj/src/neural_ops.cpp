#include <cmath>
#include <stdexcept>

#include "cpsor/neural.hpp"

namespace cpsor::nn {
namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("adjacency must be square");
  if ((a.array() < 0.0).any()) throw std::invalid_argument("adjacency must be non-negative");
  Eigen::MatrixXd tilde = a + Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::VectorXd d = tilde.rowwise().sum().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * tilde * d.asDiagonal();
}

Eigen::MatrixXd gcn_layer(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a_norm, const Eigen::MatrixXd& w) {
  if (a_norm.rows() != a_norm.cols() || a_norm.cols() != h.rows() || h.cols() != w.rows()) {
    throw std::invalid_argument("gcn_layer shape mismatch");
  }
  return (a_norm * h * w).cwiseMax(0.0);
}

LstmTrace lstm_forward(const std::vector<Eigen::VectorXd>& inputs, const MatRef& wx, const MatRef& wh,
                       const VecRef& b) {
  const Eigen::Index n = wh.cols();
  if (wx.rows() != 4 * n || wh.rows() != 4 * n || b.size() != 4 * n) throw std::invalid_argument("lstm shape mismatch");
  LstmTrace tr;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n), c = Eigen::VectorXd::Zero(n);
  for (const auto& x : inputs) {
    if (x.size() != wx.cols()) throw std::invalid_argument("lstm input width mismatch");
    const Eigen::VectorXd z = wx * x + wh * h + b;
    Eigen::VectorXd i = sigmoid(z.segment(0, n));
    Eigen::VectorXd f = sigmoid(z.segment(n, n));
    Eigen::VectorXd g = z.segment(2 * n, n).array().tanh().matrix();
    Eigen::VectorXd o = sigmoid(z.segment(3 * n, n));
    c = f.cwiseProduct(c) + i.cwiseProduct(g);
    h = o.cwiseProduct(c.array().tanh().matrix());
    tr.i.push_back(std::move(i));
    tr.f.push_back(std::move(f));
    tr.g.push_back(std::move(g));
    tr.o.push_back(std::move(o));
    tr.c.push_back(c);
    tr.h.push_back(h);
  }
  return tr;
}

AttentionTrace attention_pool(const std::vector<Eigen::VectorXd>& hidden, const MatRef& p, const VecRef& v) {
  if (hidden.empty()) throw std::invalid_argument("attention needs at least one step");
  AttentionTrace tr;
  const auto t_steps = static_cast<Eigen::Index>(hidden.size());
  Eigen::VectorXd scores(t_steps);
  for (Eigen::Index t = 0; t < t_steps; ++t) {
    tr.u.push_back((p * hidden[static_cast<std::size_t>(t)]).array().tanh().matrix());
    scores(t) = v.dot(tr.u.back());
  }
  const double top = scores.maxCoeff();
  tr.weights = (scores.array() - top).exp().matrix();
  tr.weights /= tr.weights.sum();
  tr.context = Eigen::VectorXd::Zero(hidden.front().size());
  for (Eigen::Index t = 0; t < t_steps; ++t) tr.context += tr.weights(t) * hidden[static_cast<std::size_t>(t)];
  return tr;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::P: return "p";
    case Variant::CP: return "cp";
    case Variant::CPSOR: return "cpsor";
  }
  return "?";
}

Variant variant_from_string(std::string_view text) {
  if (text == "p") return Variant::P;
  if (text == "cp") return Variant::CP;
  if (text == "cpsor") return Variant::CPSOR;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "'");
}

}  // namespace cpsor::nn
