#pragma once

// Direct arithmetic on nested vectors, independent of Eigen.

#include <cmath>
#include <random>
#include <vector>

#include "cpsor/metrics.hpp"

namespace cpsor::test {

using Points = std::vector<std::vector<std::pair<double, double>>>;  // [sample][step]

struct OracleMetrics {
  std::vector<double> rmse;
  double mae = 0.0, ade = 0.0, fde = 0.0;
};

inline OracleMetrics oracle_metrics(const Points& pred, const Points& truth) {
  const std::size_t n = pred.size(), T = pred.front().size();
  OracleMetrics m;
  double abs_sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = pred[i][t].first - truth[i][t].first;
      const double dy = pred[i][t].second - truth[i][t].second;
      sq += dx * dx + dy * dy;
      abs_sum += std::sqrt(dx * dx + dy * dy);
    }
    m.rmse.push_back(std::sqrt(sq / static_cast<double>(n)));
  }
  m.mae = abs_sum / static_cast<double>(n * T);
  for (double r : m.rmse) m.ade += r;
  m.ade /= static_cast<double>(T);
  m.fde = m.rmse.back();
  return m;
}

inline eval::Trajectories to_matrices(const Points& p) {
  eval::Trajectories out;
  for (const auto& s : p) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(s.size()), 2);
    for (std::size_t t = 0; t < s.size(); ++t) {
      m(static_cast<Eigen::Index>(t), 0) = s[t].first;
      m(static_cast<Eigen::Index>(t), 1) = s[t].second;
    }
    out.push_back(m);
  }
  return out;
}

inline std::pair<Points, Points> random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 20), t_dist(1, 30);
  std::normal_distribution<double> pos(0.0, 20.0), err(0.0, 1.5);
  const int n = n_dist(rng), T = t_dist(rng);
  Points pred(n), truth(n);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      const double x = pos(rng), y = pos(rng);
      truth[i].emplace_back(x, y);
      pred[i].emplace_back(x + err(rng), y + err(rng));
    }
  }
  return {pred, truth};
}

}  // namespace cpsor::test
