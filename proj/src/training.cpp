#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cpsor/neural.hpp"
#include "cpsor/text_format.hpp"

namespace cpsor::nn {

TrainResult fit(const std::vector<EncodedSample>& train, const std::vector<EncodedSample>& valid,
                const PredictorParams& params0, const TrainConfig& config) {
  if (train.empty() || valid.empty()) throw std::invalid_argument("training and validation splits must be non-empty");
  if (config.batch_size < 1 || config.epochs < 0) throw std::invalid_argument("invalid training config");
  TrainResult result;
  result.params = params0;
  if (config.epochs == 0) return result;

  double best_valid = loss_only(valid, params0);
  PredictorParams params = params0;
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.size()));
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double train_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      std::vector<const EncodedSample*> items;
      for (std::size_t k = start; k < std::min(order.size(), start + batch); ++k) items.push_back(&train[order[k]]);
      LossAndGradient lg;
      try {
        lg = loss_and_gradients(items, params);
      } catch (const TrainingError& e) {
        throw TrainingError("diverged at epoch " + std::to_string(epoch) + ": " + e.what());
      }
      train_sum += lg.loss * static_cast<double>(items.size());
      const double norm = lg.gradient.norm();
      if (!std::isfinite(norm)) throw TrainingError("non-finite gradient at epoch " + std::to_string(epoch));
      if (config.clip_norm > 0.0 && norm > config.clip_norm) lg.gradient *= config.clip_norm / norm;
      velocity = config.momentum * velocity - config.learning_rate * lg.gradient;
      params.set_flat(params.flat() + velocity);
    }
    double valid_loss = 0.0;
    try {
      valid_loss = loss_only(valid, params);
    } catch (const TrainingError& e) {
      throw TrainingError("diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    result.losses.push_back({epoch, train_sum / static_cast<double>(train.size()), valid_loss});
    if (valid_loss < best_valid) {
      best_valid = valid_loss;
      result.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

std::string loss_csv(const std::vector<EpochLoss>& losses) {
  std::ostringstream out;
  out << "epoch,train_loss,valid_loss\n";
  for (const auto& l : losses) out << l.epoch << ',' << format_number(l.train, 12) << ',' << format_number(l.valid, 12) << '\n';
  return out.str();
}

std::string weights_to_text(const PredictorParams& params, Variant variant) {
  const auto& d = params.dims();
  std::ostringstream out;
  out << "schema_version " << kWeightsSchemaVersion << '\n';
  out << "variant " << to_string(variant) << '\n';
  out << "dims " << d.phy_in << ' ' << d.cog_in << ' ' << d.gcn << ' ' << d.lstm << ' ' << d.attn << ' '
      << d.future_steps << '\n';
  out << "output_scale " << format_number(params.output_scale[0], 12) << ' '
      << format_number(params.output_scale[1], 12) << '\n';
  out << "values " << params.size() << '\n';
  for (Eigen::Index i = 0; i < params.flat().size(); ++i) out << format_number(params.flat()(i), 12) << '\n';
  return out.str();
}

PredictorParams weights_from_text(const std::string& text, Variant* variant) {
  std::vector<std::vector<std::string>> lines;
  for (const auto& raw : split(text, '\n')) {
    const auto body = trim(raw);
    if (body.empty()) continue;
    lines.push_back(split(body, ' '));
  }
  auto expect = [&](std::size_t i, const char* key, std::size_t n) -> const std::vector<std::string>& {
    if (i >= lines.size() || lines[i].front() != key || lines[i].size() != n + 1) {
      throw std::runtime_error(std::string("weights file: expected '") + key + "'");
    }
    return lines[i];
  };
  if (parse_integer(expect(0, "schema_version", 1)[1]) != kWeightsSchemaVersion) {
    throw std::runtime_error("weights file: unsupported schema_version");
  }
  const Variant v = variant_from_string(expect(1, "variant", 1)[1]);
  if (variant != nullptr) *variant = v;
  const auto& dl = expect(2, "dims", 6);
  ModelDims d;
  d.phy_in = static_cast<int>(parse_integer(dl[1]));
  d.cog_in = static_cast<int>(parse_integer(dl[2]));
  d.gcn = static_cast<int>(parse_integer(dl[3]));
  d.lstm = static_cast<int>(parse_integer(dl[4]));
  d.attn = static_cast<int>(parse_integer(dl[5]));
  d.future_steps = static_cast<int>(parse_integer(dl[6]));
  PredictorParams params(d);
  const auto& sl = expect(3, "output_scale", 2);
  params.output_scale = {parse_number(sl[1]), parse_number(sl[2])};
  const auto n = static_cast<std::size_t>(parse_integer(expect(4, "values", 1)[1]));
  if (n != params.size() || lines.size() != 5 + n) throw std::runtime_error("weights file: parameter count mismatch");
  Eigen::VectorXd flat(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (lines[5 + i].size() != 1) throw std::runtime_error("weights file: one value per line expected");
    flat(static_cast<Eigen::Index>(i)) = parse_number(lines[5 + i][0]);
  }
  params.set_flat(flat);
  return params;
}

}  // namespace cpsor::nn
