#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

namespace semtype {

struct ClusterAssignment {
  std::vector<int> assignments;  // cluster id per instance, < k
  int k = 0;
  double objective = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> objective_history;  // one entry per assignment pass
};

// Lloyd's algorithm with k-means++ seeding. Objective is the sum of squared
// distances to the assigned centroid; empty clusters are re-seeded to the
// point farthest from its centroid.
ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                         int max_iter = 300, double tol = 1e-6);

// Park-Jun style k-medoids: initial medoids are the k points with the
// smallest normalized summed distance; alternates nearest-medoid assignment
// with per-cluster medoid updates. Objective is total Euclidean distance.
ClusterAssignment kmedoids(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           int max_iter = 100);

// Ng-Jordan-Weiss spectral clustering: RBF affinity (zero diagonal),
// normalized Laplacian D^-1/2 A D^-1/2, top-k eigenvectors via the Jacobi
// solver, row-normalized embedding fed to kmeans. sigma = nullopt picks the
// median pairwise distance.
ClusterAssignment spectral(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           std::optional<double> sigma = std::nullopt);

std::string assignments_csv(const ClusterAssignment& result);

}  // namespace semtype
