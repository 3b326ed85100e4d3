#include "cpsor/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cpsor/text_format.hpp"

namespace cpsor::eval {
namespace {

void check_shapes(const Trajectories& preds, const Trajectories& truths) {
  if (preds.empty()) throw std::invalid_argument("no samples");
  if (preds.size() != truths.size()) throw std::invalid_argument("prediction and truth counts differ");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].rows() != preds.front().rows() || preds[i].cols() != 2 || truths[i].rows() != preds[i].rows() ||
        truths[i].cols() != 2) {
      throw std::invalid_argument("trajectory shape mismatch at sample " + std::to_string(i));
    }
  }
  if (preds.front().rows() < 1) throw std::invalid_argument("empty horizon");
}

}  // namespace

std::vector<double> rmse_per_step(const Trajectories& preds, const Trajectories& truths) {
  check_shapes(preds, truths);
  const auto steps = static_cast<std::size_t>(preds.front().rows());
  std::vector<double> out(steps, 0.0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t t = 0; t < steps; ++t) {
      out[t] += (preds[i].row(static_cast<Eigen::Index>(t)) - truths[i].row(static_cast<Eigen::Index>(t))).squaredNorm();
    }
  }
  for (double& v : out) v = std::sqrt(v / static_cast<double>(preds.size()));
  return out;
}

double mae(const Trajectories& preds, const Trajectories& truths) {
  check_shapes(preds, truths);
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) total += (preds[i] - truths[i]).rowwise().norm().sum();
  return total / static_cast<double>(preds.size() * static_cast<std::size_t>(preds.front().rows()));
}

double ade(const std::vector<double>& rmse) {
  if (rmse.empty()) throw std::invalid_argument("empty RMSE vector");
  double total = 0.0;
  for (double v : rmse) total += v;
  return total / static_cast<double>(rmse.size());
}

double fde(const std::vector<double>& rmse) {
  if (rmse.empty()) throw std::invalid_argument("empty RMSE vector");
  return rmse.back();
}

double pooled_rmse(const Trajectories& preds, const Trajectories& truths) {
  check_shapes(preds, truths);
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) total += (preds[i] - truths[i]).squaredNorm();
  return std::sqrt(total / static_cast<double>(preds.size() * static_cast<std::size_t>(preds.front().rows())));
}

HorizonMetrics horizon_metrics(const Trajectories& preds, const Trajectories& truths, double horizon_s) {
  HorizonMetrics h;
  h.horizon_s = horizon_s;
  h.rmse_per_step = rmse_per_step(preds, truths);
  h.rmse = pooled_rmse(preds, truths);
  h.mae = mae(preds, truths);
  h.ade = ade(h.rmse_per_step);
  h.fde = fde(h.rmse_per_step);
  return h;
}

std::string reports_csv(const std::vector<MetricReport>& reports) {
  std::ostringstream out;
  out << "variant,scenario_id,horizon_s,n_samples,rmse,mae,ade,fde\n";
  for (const auto& r : reports) {
    for (const auto& h : r.horizons) {
      out << r.variant << ',' << r.scenario_id << ',' << format_number(h.horizon_s, 9) << ',' << r.n_samples << ','
          << format_number(h.rmse, 9) << ',' << format_number(h.mae, 9) << ',' << format_number(h.ade, 9) << ','
          << format_number(h.fde, 9) << '\n';
    }
  }
  return out.str();
}

std::string relative_change(double baseline, double value) {
  if (!(baseline > 0.0)) return "n/a";
  const double pct = 100.0 * (baseline - value) / baseline;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s by %.2f%%", pct >= 0.0 ? "decreased" : "increased", std::abs(pct));
  return buf;
}

}  // namespace cpsor::eval
