#include "semtype/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "semtype/error.hpp"
#include "semtype/linalg.hpp"
#include "semtype/rng.hpp"

namespace semtype {

namespace {

void check_k(const Eigen::MatrixXd& points, int k) {
  if (k < 1 || static_cast<Eigen::Index>(k) > points.rows()) {
    raise(Err::BadK, "k must lie in [1, n]");
  }
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (points.row(i) - points.row(j)).norm();
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<double> dist2(static_cast<std::size_t>(n),
                            std::numeric_limits<double>::infinity());
  Eigen::Index first = static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::size_t>(n)));
  centroids.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d2 = (points.row(i) - centroids.row(c - 1)).squaredNorm();
      auto& best = dist2[static_cast<std::size_t>(i)];
      best = std::min(best, d2);
      total += best;
    }
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2[static_cast<std::size_t>(i)];
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::size_t>(n)));
    }
    centroids.row(c) = points.row(chosen);
  }
  return centroids;
}

}  // namespace

ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iter,
                         double tol) {
  check_k(points, k);
  const Eigen::Index n = points.rows();

  Rng rng(seed);
  Eigen::MatrixXd centroids = kmeanspp_init(points, k, rng);

  ClusterAssignment out;
  out.k = k;
  out.seed = seed;
  out.assignments.assign(static_cast<std::size_t>(n), 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment pass.
    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d2 = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d2 < best) {
          best = d2;
          best_c = c;
        }
      }
      out.assignments[static_cast<std::size_t>(i)] = best_c;
      objective += best;
    }
    out.objective = objective;
    out.objective_history.push_back(objective);
    out.iterations = iter + 1;

    // Update pass.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(out.assignments[static_cast<std::size_t>(i)]) += points.row(i);
      counts[static_cast<std::size_t>(out.assignments[static_cast<std::size_t>(i)])] += 1;
    }
    double movement = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        // Re-seed an empty cluster to the point farthest from its centroid.
        double worst = -1.0;
        Eigen::Index worst_i = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d2 =
              (points.row(i) -
               centroids.row(out.assignments[static_cast<std::size_t>(i)]))
                  .squaredNorm();
          if (d2 > worst) {
            worst = d2;
            worst_i = i;
          }
        }
        movement += (centroids.row(c) - points.row(worst_i)).norm();
        centroids.row(c) = points.row(worst_i);
      } else {
        const Eigen::RowVectorXd next =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        movement += (centroids.row(c) - next).norm();
        centroids.row(c) = next;
      }
    }
    if (movement < tol) break;
  }
  return out;
}

ClusterAssignment kmedoids(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           int max_iter) {
  check_k(points, k);
  const Eigen::Index n = points.rows();
  const Eigen::MatrixXd d = pairwise_distances(points);

  // Park-Jun initialization: v_j = sum_i d(i,j) / sum_l d(i,l); take the k
  // smallest. Ties resolve to the lower index.
  Eigen::VectorXd row_sums = d.rowwise().sum();
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += row_sums[i] > 0.0 ? d(i, j) / row_sums[i] : 0.0;
    }
    v[static_cast<std::size_t>(j)] = acc;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return v[static_cast<std::size_t>(a)] < v[static_cast<std::size_t>(b)];
  });
  std::vector<Eigen::Index> medoids(order.begin(), order.begin() + k);

  ClusterAssignment out;
  out.k = k;
  out.seed = seed;
  out.assignments.assign(static_cast<std::size_t>(n), 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assign to nearest medoid.
    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double dist = d(i, medoids[static_cast<std::size_t>(c)]);
        if (dist < best) {
          best = dist;
          best_c = c;
        }
      }
      out.assignments[static_cast<std::size_t>(i)] = best_c;
      objective += best;
    }
    out.objective = objective;
    out.objective_history.push_back(objective);
    out.iterations = iter + 1;

    // Update each medoid to the in-cluster point minimizing total distance.
    bool changed = false;
    for (int c = 0; c < k; ++c) {
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (out.assignments[static_cast<std::size_t>(i)] == c) members.push_back(i);
      }
      if (members.empty()) continue;
      double best_cost = std::numeric_limits<double>::infinity();
      Eigen::Index best_m = medoids[static_cast<std::size_t>(c)];
      for (const Eigen::Index candidate : members) {
        double cost = 0.0;
        for (const Eigen::Index other : members) cost += d(candidate, other);
        if (cost < best_cost) {
          best_cost = cost;
          best_m = candidate;
        }
      }
      if (best_m != medoids[static_cast<std::size_t>(c)]) {
        medoids[static_cast<std::size_t>(c)] = best_m;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return out;
}

ClusterAssignment spectral(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           std::optional<double> sigma) {
  check_k(points, k);
  const Eigen::Index n = points.rows();
  const Eigen::MatrixXd d = pairwise_distances(points);

  double s = 0.0;
  if (sigma) {
    s = *sigma;
  } else {
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) dists.push_back(d(i, j));
    }
    if (dists.empty()) {
      s = 1.0;
    } else {
      std::sort(dists.begin(), dists.end());
      const std::size_t m = dists.size();
      s = m % 2 == 1 ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
    }
  }
  if (!(s > 0.0)) s = 1.0;  // all-identical points degenerate to one blob

  Eigen::MatrixXd affinity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    affinity(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = std::exp(-d(i, j) * d(i, j) / (2.0 * s * s));
      affinity(i, j) = a;
      affinity(j, i) = a;
    }
  }

  Eigen::VectorXd degree = affinity.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv_sqrt[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
  }
  const Eigen::MatrixXd laplacian =
      inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal();

  const EigenDecomposition eig = jacobi_eigen(SymMatrix(laplacian));
  Eigen::MatrixXd embedding = eig.vectors.leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }

  ClusterAssignment out = kmeans(embedding, k, seed);
  out.seed = seed;
  return out;
}

std::string assignments_csv(const ClusterAssignment& result) {
  std::string out = "instance_id,cluster_id\n";
  for (std::size_t i = 0; i < result.assignments.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(result.assignments[i]) + "\n";
  }
  return out;
}

}  // namespace semtype
