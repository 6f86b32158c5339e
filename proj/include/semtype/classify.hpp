#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "semtype/dataset.hpp"

namespace semtype {

enum class Algorithm {
  LogisticRegression,
  Knn,
  DecisionTree,
  RandomForest,
  AdaBoost,
  Svm,
};

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);
const std::vector<Algorithm>& all_algorithms();

struct ModelSpec {
  Algorithm algorithm = Algorithm::Knn;
  int knn_k = 5;
  int max_depth = 0;  // trees; 0 = unlimited
  int min_leaf = 1;
  int n_trees = 100;       // random forest
  bool rf_bootstrap = true;
  int rf_mtry = 0;         // features per split; 0 = round(sqrt(d))
  int n_rounds = 100;      // adaboost
  int stump_depth = 1;
  double learning_rate = 0.1;  // lr / svm
  int epochs = 500;
  double l2_lambda = 1e-3;
  std::uint64_t seed = 0;

  std::string brief() const;  // compact "key=value ..." id used in reports
};

// Per-feature z-scoring constants fit on the training split. Zero-variance
// columns pass through untouched.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

// CART node in flattened form; left/right = -1 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_class = -1;
  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0
  int predict(const Eigen::RowVectorXd& x) const;
};

struct TrainedModel {
  Algorithm algorithm = Algorithm::Knn;
  ModelSpec spec;
  int num_classes = 0;
  Standardizer standardizer;

  // Softmax regression / linear SVM: one row of weights per class.
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
  std::vector<double> loss_history;  // LR full-batch loss per epoch

  // KNN: the standardized training set.
  Eigen::MatrixXd stored_x;
  std::vector<int> stored_y;

  Tree tree;                   // decision tree
  std::vector<Tree> forest;    // random forest / adaboost learners
  std::vector<double> alphas;  // adaboost round weights
  std::vector<double> round_errors;  // adaboost weighted error of accepted learners
  int fallback_class = 0;  // majority class, used only if boosting accepts no learner
};

// Fits the requested algorithm on z-scored features. RandomForest trees may
// be trained on up to `jobs` workers; per-tree seeds make the result
// schedule-independent.
TrainedModel train(const ModelSpec& spec, const Dataset& data, int jobs = 1);

// Deterministic inference; every vote/argmax tie breaks toward the smallest
// label id.
std::vector<int> predict(const TrainedModel& model, const Eigen::MatrixXd& x);

// Multinomial cross-entropy with L2 on the weights, and its analytic
// gradient. Exposed so the gradient can be checked against finite
// differences.
double lr_loss(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::MatrixXd& x,
               const std::vector<int>& y, double l2_lambda);
void lr_gradient(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::MatrixXd& x,
                 const std::vector<int>& y, double l2_lambda, Eigen::MatrixXd& grad_w,
                 Eigen::VectorXd& grad_b);

// Every class downsampled to the smallest class count, rows shuffled.
Dataset balance_downsample(const Dataset& data, std::uint64_t seed);

struct SplitResult {
  Dataset train;
  Dataset test;
};

// Stratified seeded split; per-class train count = round(fraction * count),
// clamped to leave at least one instance on each side.
SplitResult split_dataset(const Dataset& data, double train_fraction, std::uint64_t seed,
                          bool stratified = true);

// Stratified fold ids (0..folds-1) per instance; per class, the first
// (count mod folds) folds take the extra element.
std::vector<int> stratified_folds(const std::vector<int>& y, int num_classes, int folds,
                                  std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_accuracy;
  std::vector<double> fold_macro_f;
  double mean_accuracy = 0.0;
  double mean_macro_f = 0.0;
};

CvResult cross_validate(const ModelSpec& spec, const Dataset& data, int folds = 5,
                        std::uint64_t seed = 0);

struct GridSearchResult {
  ModelSpec best;
  double best_score = 0.0;           // mean CV accuracy
  std::vector<double> cell_scores;   // aligned with the grid
};

// Exhaustive search over the given grid by mean CV accuracy; ties keep the
// earliest grid entry. Cells may be evaluated on `jobs` workers.
GridSearchResult grid_search(const std::vector<ModelSpec>& grid, const Dataset& data,
                             int folds = 5, std::uint64_t seed = 0, int jobs = 1);

// The documented default hyper-parameter grids, and a reduced preset for
// quick runs. "fixed" yields a single reasonable spec per algorithm.
std::vector<ModelSpec> default_grid(Algorithm algorithm);
std::vector<ModelSpec> small_grid(Algorithm algorithm);
ModelSpec fixed_spec(Algorithm algorithm);

// Versioned JSON model persistence (format documented in docs/formats.md).
std::string save_model(const TrainedModel& model);
TrainedModel load_model(const std::string& json_text);

}  // namespace semtype
