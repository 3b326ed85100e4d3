#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cpsor::disc {

// Fitted clustering. label_map[c] is the semantic state index of cluster c.
struct ClusterModel {
  int k = 0;
  Eigen::MatrixXd centroids;  // k x d
  std::vector<int> label_map;

  // Index of the nearest centroid (lowest index on ties).
  int nearest(const Eigen::VectorXd& point) const;
};

struct KMeansResult {
  ClusterModel model;
  std::vector<int> assignment;
  std::vector<double> sse_trace;  // within-cluster SSE after every Lloyd update
  int iterations = 0;
};

// Lloyd's algorithm from k-means++ seeding; stops at an assignment fixpoint or
// after `max_iterations`. Points are rows. Throws std::invalid_argument when
// fewer than k distinct points exist.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    int max_iterations = 100);

}  // namespace cpsor::disc
