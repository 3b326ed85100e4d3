#include "cpsor/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace cpsor::disc {
namespace {

std::size_t count_distinct(const Eigen::MatrixXd& points, std::size_t enough) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < points.rows() && seen.size() < enough; ++i) {
    std::vector<double> row(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index j = 0; j < points.cols(); ++j) row[static_cast<std::size_t>(j)] = points(i, j);
    seen.insert(std::move(row));
  }
  return seen.size();
}

int nearest_row(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& p, double* dist2) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist2 != nullptr) *dist2 = best_d;
  return best;
}

}  // namespace

int ClusterModel::nearest(const Eigen::VectorXd& point) const {
  return nearest_row(centroids, point.transpose(), nullptr);
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations) {
  if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
  const auto n = points.rows();
  if (count_distinct(points, static_cast<std::size_t>(k)) < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("kmeans: fewer than k distinct points");
  }

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd centroids(k, points.cols());
  {
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centroids.row(0) = points.row(pick(rng));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < c; ++j) best = std::min(best, (points.row(i) - centroids.row(j)).squaredNorm());
        d2[static_cast<std::size_t>(i)] = best;
        total += best;
      }
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double acc = 0.0;
      Eigen::Index chosen = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d2[static_cast<std::size_t>(i)] <= 0.0) continue;
        acc += d2[static_cast<std::size_t>(i)];
        chosen = i;
        if (acc >= target) break;
      }
      centroids.row(c) = points.row(chosen);
    }
  }

  KMeansResult result;
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = nearest_row(centroids, points.row(i), nullptr);
      if (c != assign[static_cast<std::size_t>(i)]) {
        assign[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      // empty clusters keep their previous centroid
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
    double sse = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      sse += (points.row(i) - centroids.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
    }
    result.sse_trace.push_back(sse);
    result.iterations = iter + 1;
  }

  result.model.k = k;
  result.model.centroids = std::move(centroids);
  result.model.label_map.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) result.model.label_map[static_cast<std::size_t>(c)] = c;
  result.assignment = std::move(assign);
  return result;
}

}  // namespace cpsor::disc
