#include "semtype/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "semtype/csv.hpp"
#include "semtype/error.hpp"
#include "semtype/metrics.hpp"
#include "semtype/parallel.hpp"
#include "semtype/rng.hpp"

namespace semtype {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "logistic_regression" || name == "logreg") return Algorithm::LogisticRegression;
  if (name == "knn") return Algorithm::Knn;
  if (name == "decision_tree" || name == "dtree") return Algorithm::DecisionTree;
  if (name == "random_forest" || name == "rforest") return Algorithm::RandomForest;
  if (name == "adaboost") return Algorithm::AdaBoost;
  if (name == "svm") return Algorithm::Svm;
  raise(Err::BadSpec, "unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::LogisticRegression: return "logistic_regression";
    case Algorithm::Knn: return "knn";
    case Algorithm::DecisionTree: return "decision_tree";
    case Algorithm::RandomForest: return "random_forest";
    case Algorithm::AdaBoost: return "adaboost";
    case Algorithm::Svm: return "svm";
  }
  return "unknown";
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = {
      Algorithm::LogisticRegression, Algorithm::Knn,      Algorithm::DecisionTree,
      Algorithm::RandomForest,       Algorithm::AdaBoost, Algorithm::Svm,
  };
  return all;
}

std::string ModelSpec::brief() const {
  switch (algorithm) {
    case Algorithm::Knn:
      return "knn k=" + std::to_string(knn_k);
    case Algorithm::DecisionTree:
      return "dt depth=" + std::to_string(max_depth);
    case Algorithm::RandomForest:
      return "rf trees=" + std::to_string(n_trees);
    case Algorithm::AdaBoost:
      return "ada rounds=" + std::to_string(n_rounds) + " depth=" + std::to_string(stump_depth);
    case Algorithm::LogisticRegression:
      return "lr rate=" + format_double(learning_rate, 6) + " l2=" + format_double(l2_lambda, 6);
    case Algorithm::Svm:
      return "svm rate=" + format_double(learning_rate, 6) + " l2=" + format_double(l2_lambda, 6);
  }
  return "?";
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  s.mean = x.colwise().mean();
  s.std_dev.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    s.std_dev[c] = std::sqrt((x.col(c).array() - s.mean[c]).square().mean());
  }
  return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    raise(Err::DimensionMismatch, "feature count differs from training dimension");
  }
  Eigen::MatrixXd out = x;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (std_dev[c] > 0.0) out.col(c) = (x.col(c).array() - mean[c]) / std_dev[c];
  }
  return out;
}

int Tree::predict(const Eigen::RowVectorXd& x) const {
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    node = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].leaf_class;
}

namespace {

constexpr double kMinGain = 1e-12;

struct CartParams {
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
  int mtry = 0;  // 0 = all features in ascending order
};

struct CartBuilder {
  const Eigen::MatrixXd& x;
  const std::vector<int>& y;
  const std::vector<double>& w;
  int num_classes;
  CartParams params;
  Rng* rng;  // only consulted when mtry > 0
  Tree tree;

  int majority_class(const std::vector<double>& class_weight) const {
    int best = 0;
    for (int c = 1; c < num_classes; ++c) {
      if (class_weight[static_cast<std::size_t>(c)] >
          class_weight[static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    return best;
  }

  static double gini(const std::vector<double>& class_weight, double total) {
    if (total <= 0.0) return 0.0;
    double sumsq = 0.0;
    for (const double cw : class_weight) sumsq += cw * cw;
    return 1.0 - sumsq / (total * total);
  }

  std::vector<int> candidate_features() {
    const int d = static_cast<int>(x.cols());
    if (params.mtry <= 0 || params.mtry >= d || rng == nullptr) {
      std::vector<int> all(static_cast<std::size_t>(d));
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    const auto picks = rng->sample_without_replacement(static_cast<std::size_t>(d),
                                                       static_cast<std::size_t>(params.mtry));
    std::vector<int> out;
    out.reserve(picks.size());
    for (const std::size_t p : picks) out.push_back(static_cast<int>(p));
    std::sort(out.begin(), out.end());
    return out;
  }

  int build(std::vector<int>& samples, int depth) {
    std::vector<double> class_weight(static_cast<std::size_t>(num_classes), 0.0);
    double total = 0.0;
    for (const int i : samples) {
      class_weight[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])] +=
          w[static_cast<std::size_t>(i)];
      total += w[static_cast<std::size_t>(i)];
    }
    const double node_gini = gini(class_weight, total);
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(node_id)].leaf_class = majority_class(class_weight);

    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
    if (depth_capped || node_gini <= 0.0 ||
        static_cast<int>(samples.size()) < 2 * params.min_leaf) {
      return node_id;
    }

    // Best axis-aligned threshold over the candidate features; ties keep the
    // first (lowest feature, lowest threshold) found.
    double best_gain = kMinGain;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> order;
    std::vector<double> left_weight(static_cast<std::size_t>(num_classes));
    for (const int f : candidate_features()) {
      order.clear();
      order.reserve(samples.size());
      for (const int i : samples) order.emplace_back(x(i, f), i);
      std::sort(order.begin(), order.end());

      std::fill(left_weight.begin(), left_weight.end(), 0.0);
      double left_total = 0.0;
      double left_sumsq = 0.0;

      for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
        const int i = order[pos].second;
        const double wi = w[static_cast<std::size_t>(i)];
        auto& cw = left_weight[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])];
        left_sumsq += wi * wi + 2.0 * wi * cw;
        cw += wi;
        left_total += wi;
        if (order[pos].first == order[pos + 1].first) continue;  // no boundary here
        const std::size_t left_count = pos + 1;
        const std::size_t right_count = order.size() - left_count;
        if (left_count < static_cast<std::size_t>(params.min_leaf) ||
            right_count < static_cast<std::size_t>(params.min_leaf)) {
          continue;
        }
        const double right_total = total - left_total;
        const double gini_l = left_total > 0.0 ? 1.0 - left_sumsq / (left_total * left_total) : 0.0;
        double right_sq = 0.0;
        for (int c = 0; c < num_classes; ++c) {
          const double rc = class_weight[static_cast<std::size_t>(c)] -
                            left_weight[static_cast<std::size_t>(c)];
          right_sq += rc * rc;
        }
        const double gini_r =
            right_total > 0.0 ? 1.0 - right_sq / (right_total * right_total) : 0.0;
        const double children =
            (left_total * gini_l + right_total * gini_r) / total;
        const double gain = node_gini - children;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (order[pos].first + order[pos + 1].first);
        }
      }
    }
    if (best_feature < 0) return node_id;  // no useful split

    std::vector<int> left_samples;
    std::vector<int> right_samples;
    for (const int i : samples) {
      (x(i, best_feature) < best_threshold ? left_samples : right_samples).push_back(i);
    }
    if (left_samples.empty() || right_samples.empty()) return node_id;
    samples.clear();
    samples.shrink_to_fit();

    const int left_id = build(left_samples, depth + 1);
    const int right_id = build(right_samples, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_id;
    node.right = right_id;
    return node_id;
  }
};

Tree fit_cart(const Eigen::MatrixXd& x, const std::vector<int>& y, const std::vector<double>& w,
              int num_classes, const CartParams& params, Rng* rng) {
  CartBuilder builder{x, y, w, num_classes, params, rng, {}};
  std::vector<int> samples(y.size());
  std::iota(samples.begin(), samples.end(), 0);
  builder.build(samples, 0);
  return std::move(builder.tree);
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const double peak = p.row(r).maxCoeff();
    p.row(r) = (p.row(r).array() - peak).exp();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

int argmax_smallest(const Eigen::RowVectorXd& scores) {
  int best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = static_cast<int>(c);
  }
  return best;
}

void fit_logistic_regression(TrainedModel& model, const Eigen::MatrixXd& x,
                             const std::vector<int>& y) {
  const auto& spec = model.spec;
  const int k = model.num_classes;
  model.weights = Eigen::MatrixXd::Zero(k, x.cols());
  model.bias = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd grad_w(k, x.cols());
  Eigen::VectorXd grad_b(k);
  model.loss_history.reserve(static_cast<std::size_t>(spec.epochs));
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    model.loss_history.push_back(lr_loss(model.weights, model.bias, x, y, spec.l2_lambda));
    lr_gradient(model.weights, model.bias, x, y, spec.l2_lambda, grad_w, grad_b);
    model.weights -= spec.learning_rate * grad_w;
    model.bias -= spec.learning_rate * grad_b;
  }
}

void fit_svm(TrainedModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y) {
  const auto& spec = model.spec;
  const int k = model.num_classes;
  const Eigen::Index m = x.rows();
  model.weights = Eigen::MatrixXd::Zero(k, x.cols());
  model.bias = Eigen::VectorXd::Zero(k);
  // One-vs-rest hinge loss, full-batch subgradient steps.
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd sign(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      sign[i] = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
    }
    Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(x.cols());
    double b = 0.0;
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
      Eigen::RowVectorXd grad_w = spec.l2_lambda * w;
      double grad_b = 0.0;
      const Eigen::VectorXd margin = (x * w.transpose()).array() + b;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (sign[i] * margin[i] < 1.0) {
          grad_w -= (sign[i] / static_cast<double>(m)) * x.row(i);
          grad_b -= sign[i] / static_cast<double>(m);
        }
      }
      w -= spec.learning_rate * grad_w;
      b -= spec.learning_rate * grad_b;
    }
    model.weights.row(c) = w;
    model.bias[c] = b;
  }
}

void fit_adaboost(TrainedModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y) {
  const auto& spec = model.spec;
  const int k = model.num_classes;
  const std::size_t m = y.size();
  std::vector<double> weights(m, 1.0 / static_cast<double>(m));
  const double reject_at = 1.0 - 1.0 / static_cast<double>(k);

  // Majority fallback for the degenerate no-accepted-learner case.
  {
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (const int label : y) counts[static_cast<std::size_t>(label)] += 1;
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    }
    model.fallback_class = best;
  }

  const CartParams cart{spec.stump_depth, spec.min_leaf, 0};
  for (int round = 0; round < spec.n_rounds; ++round) {
    Tree tree = fit_cart(x, y, weights, k, cart, nullptr);
    std::vector<bool> wrong(m);
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      wrong[i] = tree.predict(x.row(static_cast<Eigen::Index>(i))) != y[i];
      if (wrong[i]) err += weights[i];
    }
    if (err >= reject_at) break;  // SAMME requires better-than-chance learners

    if (err <= 0.0) {
      const double eps = 1e-12;
      model.forest.push_back(std::move(tree));
      model.alphas.push_back(std::log((1.0 - eps) / eps) + std::log(static_cast<double>(k - 1)));
      model.round_errors.push_back(err);
      break;  // perfect learner, nothing left to reweight
    }
    const double alpha = std::log((1.0 - err) / err) + std::log(static_cast<double>(k - 1));
    model.forest.push_back(std::move(tree));
    model.alphas.push_back(alpha);
    model.round_errors.push_back(err);

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (wrong[i]) weights[i] *= std::exp(alpha);
      total += weights[i];
    }
    for (auto& wi : weights) wi /= total;
  }
}

void fit_random_forest(TrainedModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y,
                       int jobs) {
  const auto& spec = model.spec;
  const Eigen::Index m = x.rows();
  const int d = static_cast<int>(x.cols());
  const int mtry =
      spec.rf_mtry > 0 ? spec.rf_mtry
                       : std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d)))));
  model.forest.resize(static_cast<std::size_t>(spec.n_trees));
  parallel_for(static_cast<std::size_t>(spec.n_trees), jobs, [&](std::size_t t) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd xb;
    std::vector<int> yb;
    if (spec.rf_bootstrap) {
      xb.resize(m, d);
      yb.resize(static_cast<std::size_t>(m));
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto pick =
            static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::size_t>(m)));
        xb.row(i) = x.row(pick);
        yb[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(pick)];
      }
    } else {
      xb = x;
      yb = y;
    }
    const std::vector<double> uniform(yb.size(), 1.0);
    const CartParams cart{spec.max_depth, spec.min_leaf, mtry};
    model.forest[t] = fit_cart(xb, yb, uniform, model.num_classes, cart, &rng);
  });
}

int vote(const std::vector<int>& votes, int num_classes) {
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (const int v : votes) counts[static_cast<std::size_t>(v)] += 1;
  int best = 0;
  for (int c = 1; c < num_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

}  // namespace

double lr_loss(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::MatrixXd& x,
               const std::vector<int>& y, double l2_lambda) {
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd logits = x * w.transpose();
  logits.rowwise() += b.transpose();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double peak = logits.row(i).maxCoeff();
    const double log_z = peak + std::log((logits.row(i).array() - peak).exp().sum());
    loss -= logits(i, y[static_cast<std::size_t>(i)]) - log_z;
  }
  loss /= static_cast<double>(m);
  loss += 0.5 * l2_lambda * w.squaredNorm();
  return loss;
}

void lr_gradient(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::MatrixXd& x,
                 const std::vector<int>& y, double l2_lambda, Eigen::MatrixXd& grad_w,
                 Eigen::VectorXd& grad_b) {
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd logits = x * w.transpose();
  logits.rowwise() += b.transpose();
  Eigen::MatrixXd p = softmax_rows(logits);
  for (Eigen::Index i = 0; i < m; ++i) p(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  grad_w = (p.transpose() * x) / static_cast<double>(m) + l2_lambda * w;
  grad_b = p.colwise().sum().transpose() / static_cast<double>(m);
}

TrainedModel train(const ModelSpec& spec, const Dataset& data, int jobs) {
  data.validate();
  if (data.rows() == 0) raise(Err::EmptyData, "training set is empty");
  {
    std::vector<bool> seen(static_cast<std::size_t>(data.num_classes()), false);
    int distinct = 0;
    for (const int label : data.y) {
      if (!seen[static_cast<std::size_t>(label)]) {
        seen[static_cast<std::size_t>(label)] = true;
        ++distinct;
      }
    }
    if (distinct < 2) raise(Err::SingleClass, "training labels hold a single class");
  }

  TrainedModel model;
  model.algorithm = spec.algorithm;
  model.spec = spec;
  model.num_classes = data.num_classes();
  model.standardizer = Standardizer::fit(data.X);
  const Eigen::MatrixXd x = model.standardizer.transform(data.X);

  switch (spec.algorithm) {
    case Algorithm::LogisticRegression:
      fit_logistic_regression(model, x, data.y);
      break;
    case Algorithm::Knn:
      model.stored_x = x;
      model.stored_y = data.y;
      break;
    case Algorithm::DecisionTree: {
      const std::vector<double> uniform(data.y.size(), 1.0);
      const CartParams cart{spec.max_depth, spec.min_leaf, 0};
      model.tree = fit_cart(x, data.y, uniform, model.num_classes, cart, nullptr);
      break;
    }
    case Algorithm::RandomForest:
      fit_random_forest(model, x, data.y, jobs);
      break;
    case Algorithm::AdaBoost:
      fit_adaboost(model, x, data.y);
      break;
    case Algorithm::Svm:
      fit_svm(model, x, data.y);
      break;
  }
  return model;
}

std::vector<int> predict(const TrainedModel& model, const Eigen::MatrixXd& x_raw) {
  const Eigen::MatrixXd x = model.standardizer.transform(x_raw);
  const Eigen::Index m = x.rows();
  std::vector<int> out(static_cast<std::size_t>(m), 0);

  switch (model.algorithm) {
    case Algorithm::LogisticRegression:
    case Algorithm::Svm: {
      Eigen::MatrixXd scores = x * model.weights.transpose();
      scores.rowwise() += model.bias.transpose();
      for (Eigen::Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = argmax_smallest(scores.row(i));
      break;
    }
    case Algorithm::Knn: {
      const Eigen::Index n = model.stored_x.rows();
      const int k = std::min<int>(model.spec.knn_k, static_cast<int>(n));
      std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          dist[static_cast<std::size_t>(j)] = {(model.stored_x.row(j) - x.row(i)).squaredNorm(),
                                               j};
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        std::vector<int> votes;
        votes.reserve(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) {
          votes.push_back(model.stored_y[static_cast<std::size_t>(dist[static_cast<std::size_t>(t)].second)]);
        }
        out[static_cast<std::size_t>(i)] = vote(votes, model.num_classes);
      }
      break;
    }
    case Algorithm::DecisionTree:
      for (Eigen::Index i = 0; i < m; ++i) {
        out[static_cast<std::size_t>(i)] = model.tree.predict(x.row(i));
      }
      break;
    case Algorithm::RandomForest:
      for (Eigen::Index i = 0; i < m; ++i) {
        std::vector<int> votes;
        votes.reserve(model.forest.size());
        for (const auto& tree : model.forest) votes.push_back(tree.predict(x.row(i)));
        out[static_cast<std::size_t>(i)] = vote(votes, model.num_classes);
      }
      break;
    case Algorithm::AdaBoost:
      for (Eigen::Index i = 0; i < m; ++i) {
        if (model.forest.empty()) {
          out[static_cast<std::size_t>(i)] = model.fallback_class;
          continue;
        }
        Eigen::RowVectorXd scores = Eigen::RowVectorXd::Zero(model.num_classes);
        for (std::size_t t = 0; t < model.forest.size(); ++t) {
          scores[model.forest[t].predict(x.row(i))] += model.alphas[t];
        }
        out[static_cast<std::size_t>(i)] = argmax_smallest(scores);
      }
      break;
  }
  return out;
}

namespace {

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.family = data.family;
  out.class_names = data.class_names;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), data.X.cols());
  out.y.resize(rows.size());
  out.instance_ids.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(rows[i]);
    out.y[i] = data.y[static_cast<std::size_t>(rows[i])];
    out.instance_ids[i] = static_cast<std::size_t>(rows[i]) < data.instance_ids.size()
                              ? data.instance_ids[static_cast<std::size_t>(rows[i])]
                              : std::to_string(rows[i]);
  }
  return out;
}

std::vector<std::vector<Eigen::Index>> group_by_class(const Dataset& data) {
  std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(data.num_classes()));
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    groups[static_cast<std::size_t>(data.y[i])].push_back(static_cast<Eigen::Index>(i));
  }
  return groups;
}

}  // namespace

Dataset balance_downsample(const Dataset& data, std::uint64_t seed) {
  data.validate();
  if (data.num_classes() < 2) raise(Err::SingleClass, "balancing needs at least 2 classes");
  const auto groups = group_by_class(data);
  std::size_t min_count = std::numeric_limits<std::size_t>::max();
  for (const auto& g : groups) {
    if (g.empty()) raise(Err::EmptyLabel, "a class has no instances");
    min_count = std::min(min_count, g.size());
  }

  Rng sampler(derive_seed(seed, 1));
  std::vector<Eigen::Index> keep;
  for (const auto& g : groups) {
    const auto picks = sampler.sample_without_replacement(g.size(), min_count);
    for (const std::size_t p : picks) keep.push_back(g[p]);
  }
  Rng shuffler(derive_seed(seed, 2));
  shuffler.shuffle(keep);
  return subset(data, keep);
}

SplitResult split_dataset(const Dataset& data, double train_fraction, std::uint64_t seed,
                          bool stratified) {
  data.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    raise(Err::BadSpec, "train fraction must lie in (0, 1)");
  }
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;

  const auto take = [&](std::vector<Eigen::Index>& pool, std::uint64_t stream) {
    Rng rng(derive_seed(seed, stream));
    std::vector<Eigen::Index> shuffled = pool;
    rng.shuffle(shuffled);
    const std::size_t n = shuffled.size();
    if (n < 2) raise(Err::ClassTooSmall, "need at least 2 instances to split");
    std::size_t n_train = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      (i < n_train ? train_rows : test_rows).push_back(shuffled[i]);
    }
  };

  if (stratified) {
    auto groups = group_by_class(data);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      take(groups[c], static_cast<std::uint64_t>(c));
    }
  } else {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(data.rows()));
    std::iota(all.begin(), all.end(), 0);
    take(all, 0);
  }
  return {subset(data, train_rows), subset(data, test_rows)};
}

std::vector<int> stratified_folds(const std::vector<int>& y, int num_classes, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) raise(Err::BadSpec, "need at least 2 folds");
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < y.size(); ++i) {
    groups[static_cast<std::size_t>(y[i])].push_back(i);
  }
  std::vector<int> fold_of(y.size(), 0);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    auto& members = groups[c];
    if (members.empty()) continue;
    if (members.size() < static_cast<std::size_t>(folds)) {
      raise(Err::ClassTooSmall, "class " + std::to_string(c) + " smaller than fold count");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(members);
    const std::size_t base = members.size() / static_cast<std::size_t>(folds);
    const std::size_t extra = members.size() % static_cast<std::size_t>(folds);
    std::size_t pos = 0;
    for (int f = 0; f < folds; ++f) {
      const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
      for (std::size_t i = 0; i < len; ++i) fold_of[members[pos++]] = f;
    }
  }
  return fold_of;
}

CvResult cross_validate(const ModelSpec& spec, const Dataset& data, int folds,
                        std::uint64_t seed) {
  data.validate();
  const std::vector<int> fold_of = stratified_folds(data.y, data.num_classes(), folds, seed);

  CvResult result;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
      (fold_of[i] == f ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
    }
    ModelSpec fold_spec = spec;
    fold_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(f));
    const Dataset train_data = subset(data, train_rows);
    const Dataset test_data = subset(data, test_rows);
    const TrainedModel model = train(fold_spec, train_data);
    const std::vector<int> preds = predict(model, test_data.X);
    const MetricReport rep = f_scores(confusion(test_data.y, preds, data.num_classes()));
    result.fold_accuracy.push_back(rep.accuracy);
    result.fold_macro_f.push_back(rep.macro_f);
  }
  result.mean_accuracy =
      std::accumulate(result.fold_accuracy.begin(), result.fold_accuracy.end(), 0.0) /
      static_cast<double>(folds);
  result.mean_macro_f =
      std::accumulate(result.fold_macro_f.begin(), result.fold_macro_f.end(), 0.0) /
      static_cast<double>(folds);
  return result;
}

GridSearchResult grid_search(const std::vector<ModelSpec>& grid, const Dataset& data, int folds,
                             std::uint64_t seed, int jobs) {
  if (grid.empty()) raise(Err::EmptyGrid, "hyper-parameter grid is empty");
  GridSearchResult result;
  result.cell_scores.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t cell) {
    ModelSpec spec = grid[cell];
    spec.seed = derive_seed(seed, static_cast<std::uint64_t>(cell));
    result.cell_scores[cell] = cross_validate(spec, data, folds, seed).mean_accuracy;
  });
  std::size_t best = 0;
  for (std::size_t cell = 1; cell < grid.size(); ++cell) {
    if (result.cell_scores[cell] > result.cell_scores[best]) best = cell;
  }
  result.best = grid[best];
  result.best_score = result.cell_scores[best];
  return result;
}

std::vector<ModelSpec> default_grid(Algorithm algorithm) {
  std::vector<ModelSpec> grid;
  ModelSpec base;
  base.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::Knn:
      for (const int k : {1, 3, 5, 7, 11}) {
        base.knn_k = k;
        grid.push_back(base);
      }
      break;
    case Algorithm::DecisionTree:
      for (const int depth : {3, 5, 8, 12, 0}) {
        base.max_depth = depth;
        grid.push_back(base);
      }
      break;
    case Algorithm::RandomForest:
      for (const int trees : {50, 100, 200}) {
        base.n_trees = trees;
        grid.push_back(base);
      }
      break;
    case Algorithm::AdaBoost:
      for (const int rounds : {50, 100, 200}) {
        for (const int depth : {1, 2}) {
          base.n_rounds = rounds;
          base.stump_depth = depth;
          grid.push_back(base);
        }
      }
      break;
    case Algorithm::LogisticRegression:
    case Algorithm::Svm:
      for (const double lambda : {1e-4, 1e-3, 1e-2, 1e-1}) {
        for (const double rate : {0.01, 0.1}) {
          base.l2_lambda = lambda;
          base.learning_rate = rate;
          base.epochs = 500;
          grid.push_back(base);
        }
      }
      break;
  }
  return grid;
}

std::vector<ModelSpec> small_grid(Algorithm algorithm) {
  std::vector<ModelSpec> grid;
  ModelSpec base;
  base.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::Knn:
      for (const int k : {1, 5}) {
        base.knn_k = k;
        grid.push_back(base);
      }
      break;
    case Algorithm::DecisionTree:
      for (const int depth : {5, 0}) {
        base.max_depth = depth;
        grid.push_back(base);
      }
      break;
    case Algorithm::RandomForest:
      for (const int trees : {50, 100}) {
        base.n_trees = trees;
        grid.push_back(base);
      }
      break;
    case Algorithm::AdaBoost:
      for (const int rounds : {50, 100}) {
        base.n_rounds = rounds;
        base.stump_depth = 2;
        grid.push_back(base);
      }
      break;
    case Algorithm::LogisticRegression:
    case Algorithm::Svm:
      for (const double lambda : {1e-3, 1e-2}) {
        base.l2_lambda = lambda;
        base.learning_rate = 0.1;
        base.epochs = 300;
        grid.push_back(base);
      }
      break;
  }
  return grid;
}

ModelSpec fixed_spec(Algorithm algorithm) {
  ModelSpec spec;
  spec.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::Knn:
      spec.knn_k = 5;
      break;
    case Algorithm::DecisionTree:
      spec.max_depth = 12;
      break;
    case Algorithm::RandomForest:
      spec.n_trees = 100;
      break;
    case Algorithm::AdaBoost:
      spec.n_rounds = 100;
      spec.stump_depth = 2;
      break;
    case Algorithm::LogisticRegression:
    case Algorithm::Svm:
      spec.learning_rate = 0.1;
      spec.l2_lambda = 1e-3;
      spec.epochs = 500;
      break;
  }
  return spec;
}

namespace {

nlohmann::ordered_json tree_to_json(const Tree& tree, int node_id) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
  nlohmann::ordered_json j;
  if (node.is_leaf()) {
    j["leaf_class"] = node.leaf_class;
    return j;
  }
  j["feature"] = node.feature;
  j["threshold"] = node.threshold;
  j["left"] = tree_to_json(tree, node.left);
  j["right"] = tree_to_json(tree, node.right);
  return j;
}

int tree_from_json(const nlohmann::json& j, Tree& tree) {
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf_class")) {
    tree.nodes[static_cast<std::size_t>(node_id)].leaf_class = j.at("leaf_class").get<int>();
    return node_id;
  }
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  const int left = tree_from_json(j.at("left"), tree);
  const int right = tree_from_json(j.at("right"), tree);
  TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  return node_id;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return {};
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  return m;
}

}  // namespace

std::string save_model(const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["algorithm"] = to_string(model.algorithm);
  j["num_classes"] = model.num_classes;

  nlohmann::ordered_json hp;
  const ModelSpec& s = model.spec;
  hp["knn_k"] = s.knn_k;
  hp["max_depth"] = s.max_depth;
  hp["min_leaf"] = s.min_leaf;
  hp["n_trees"] = s.n_trees;
  hp["rf_bootstrap"] = s.rf_bootstrap;
  hp["rf_mtry"] = s.rf_mtry;
  hp["n_rounds"] = s.n_rounds;
  hp["stump_depth"] = s.stump_depth;
  hp["learning_rate"] = s.learning_rate;
  hp["epochs"] = s.epochs;
  hp["l2_lambda"] = s.l2_lambda;
  hp["seed"] = s.seed;
  j["hyper_parameters"] = std::move(hp);

  j["standardizer"] = {{"mean", to_vec(model.standardizer.mean)},
                       {"std", to_vec(model.standardizer.std_dev)}};

  nlohmann::ordered_json payload;
  switch (model.algorithm) {
    case Algorithm::LogisticRegression:
    case Algorithm::Svm:
      payload["weights"] = matrix_to_json(model.weights);
      payload["bias"] = to_vec(model.bias);
      break;
    case Algorithm::Knn:
      payload["x"] = matrix_to_json(model.stored_x);
      payload["y"] = model.stored_y;
      break;
    case Algorithm::DecisionTree:
      payload["tree"] = tree_to_json(model.tree, 0);
      break;
    case Algorithm::RandomForest: {
      nlohmann::ordered_json trees = nlohmann::ordered_json::array();
      for (const auto& tree : model.forest) trees.push_back(tree_to_json(tree, 0));
      payload["trees"] = std::move(trees);
      break;
    }
    case Algorithm::AdaBoost: {
      nlohmann::ordered_json trees = nlohmann::ordered_json::array();
      for (const auto& tree : model.forest) trees.push_back(tree_to_json(tree, 0));
      payload["trees"] = std::move(trees);
      payload["alphas"] = model.alphas;
      payload["fallback_class"] = model.fallback_class;
      break;
    }
  }
  j["model"] = std::move(payload);
  return j.dump(2) + "\n";
}

TrainedModel load_model(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.at("format_version").get<int>() != 1) {
    raise(Err::BadSpec, "unsupported model format version");
  }
  TrainedModel model;
  model.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  model.num_classes = j.at("num_classes").get<int>();

  const auto& hp = j.at("hyper_parameters");
  ModelSpec& s = model.spec;
  s.algorithm = model.algorithm;
  s.knn_k = hp.at("knn_k").get<int>();
  s.max_depth = hp.at("max_depth").get<int>();
  s.min_leaf = hp.at("min_leaf").get<int>();
  s.n_trees = hp.at("n_trees").get<int>();
  s.rf_bootstrap = hp.at("rf_bootstrap").get<bool>();
  s.rf_mtry = hp.at("rf_mtry").get<int>();
  s.n_rounds = hp.at("n_rounds").get<int>();
  s.stump_depth = hp.at("stump_depth").get<int>();
  s.learning_rate = hp.at("learning_rate").get<double>();
  s.epochs = hp.at("epochs").get<int>();
  s.l2_lambda = hp.at("l2_lambda").get<double>();
  s.seed = hp.at("seed").get<std::uint64_t>();

  model.standardizer.mean = from_vec(j.at("standardizer").at("mean").get<std::vector<double>>());
  model.standardizer.std_dev =
      from_vec(j.at("standardizer").at("std").get<std::vector<double>>());

  const auto& payload = j.at("model");
  switch (model.algorithm) {
    case Algorithm::LogisticRegression:
    case Algorithm::Svm:
      model.weights = matrix_from_json(payload.at("weights"));
      model.bias = from_vec(payload.at("bias").get<std::vector<double>>());
      break;
    case Algorithm::Knn:
      model.stored_x = matrix_from_json(payload.at("x"));
      model.stored_y = payload.at("y").get<std::vector<int>>();
      break;
    case Algorithm::DecisionTree:
      tree_from_json(payload.at("tree"), model.tree);
      break;
    case Algorithm::RandomForest:
      for (const auto& tj : payload.at("trees")) {
        Tree tree;
        tree_from_json(tj, tree);
        model.forest.push_back(std::move(tree));
      }
      break;
    case Algorithm::AdaBoost:
      for (const auto& tj : payload.at("trees")) {
        Tree tree;
        tree_from_json(tj, tree);
        model.forest.push_back(std::move(tree));
      }
      model.alphas = payload.at("alphas").get<std::vector<double>>();
      model.fallback_class = payload.at("fallback_class").get<int>();
      break;
  }
  return model;
}

}  // namespace semtype
