#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cpsor::eval {

// One matrix per sample, T rows of (x, y).
using Trajectories = std::vector<Eigen::MatrixXd>;

// RMSE^t = sqrt(mean over samples of the squared Euclidean error at step t).
std::vector<double> rmse_per_step(const Trajectories& preds, const Trajectories& truths);
// Mean Euclidean error over every (sample, step).
double mae(const Trajectories& preds, const Trajectories& truths);
double ade(const std::vector<double>& rmse);
double fde(const std::vector<double>& rmse);
// sqrt of the mean squared error over every (sample, step).
double pooled_rmse(const Trajectories& preds, const Trajectories& truths);

struct HorizonMetrics {
  double horizon_s = 1.0;
  std::vector<double> rmse_per_step;
  double rmse = 0.0;  // pooled
  double mae = 0.0;
  double ade = 0.0;
  double fde = 0.0;
};

struct MetricReport {
  std::string variant;
  int scenario_id = 0;  // 0 = all scenarios
  std::size_t n_samples = 0;
  std::vector<HorizonMetrics> horizons;
};

HorizonMetrics horizon_metrics(const Trajectories& preds, const Trajectories& truths, double horizon_s);

// Long format: variant, scenario, horizon, n, rmse, mae, ade, fde, then one row per step.
std::string reports_csv(const std::vector<MetricReport>& reports);

// "decreased by 12.34%" (or "increased by ...") relative to `baseline`.
std::string relative_change(double baseline, double value);

}  // namespace cpsor::eval
