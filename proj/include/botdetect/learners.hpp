#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "botdetect/matrix.hpp"

namespace botdetect {

enum class LearnerKind { decision_tree, random_forest, gradient_boosting, ada_boost };

inline constexpr int kLearnerKindCount = 4;
inline constexpr LearnerKind kAllLearnerKinds[kLearnerKindCount] = {
    LearnerKind::decision_tree, LearnerKind::random_forest,
    LearnerKind::gradient_boosting, LearnerKind::ada_boost};

std::string to_string(LearnerKind k);
std::optional<LearnerKind> learner_from_string(const std::string& s);

enum class FeatureSubsample { all_features, sqrt_features };

struct LearnerParams {
  int max_depth = 8;
  int n_estimators = 100;
  int min_samples_leaf = 5;
  double learning_rate = 0.1;  // gradient boosting shrinkage
  FeatureSubsample feature_subsample = FeatureSubsample::all_features;
  bool bootstrap = true;  // random forest resampling toggle
  std::uint64_t seed = 42;

  bool operator==(const LearnerParams&) const = default;
};

/// Conventional defaults per family (recorded in the model file).
LearnerParams default_params(LearnerKind kind);

/// Internal node: routes x[feature] <= threshold to `left`, else `right`.
/// Leaf: feature == -1. Classification leaves carry weighted class tallies;
/// regression leaves carry `value`. Every node stores its sample weight and
/// impurity so feature importances need no refit.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;
  int right = -1;
  double n_bot = 0;
  double n_human = 0;
  double value = 0;
  double weight = 0;
  double impurity = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // preorder; node 0 is the root

  const TreeNode& leaf_for(const Eigen::VectorXd& x) const;
  /// Walks the tree reading only the features along the path, so sparse
  /// training matrices are never densified row-wise.
  const TreeNode& leaf_for_row(const FeatureMatrix& X, Eigen::Index row) const;
  bool operator==(const Tree&) const = default;
};

/// A fitted model of any of the four families. `trees` holds the member
/// trees (one for a decision tree); AdaBoost adds per-tree stage weights,
/// gradient boosting an initial log-odds. `prior_bot` backs degenerate
/// cases (AdaBoost with no accepted stage).
struct FittedLearner {
  LearnerKind kind = LearnerKind::decision_tree;
  int feature_count = 0;
  std::vector<Tree> trees;
  std::vector<double> stage_weights;
  double initial_log_odds = 0;
  double prior_bot = 0.5;
  LearnerParams params;

  bool operator==(const FittedLearner&) const = default;
};

/// Labels are 1 = bot, 0 = human throughout.
using Labels = std::vector<int>;

/// Greedy CART on Gini impurity; exhaustive scan over features and
/// midpoints between consecutive distinct sorted values; ties broken by
/// lowest feature index then lowest threshold.
FittedLearner fit_decision_tree(const FeatureMatrix& X, const Labels& y,
                                const LearnerParams& params);

/// Bootstrap-resampled trees with per-split feature subsampling
/// (ceil(sqrt(d)) under sqrt_features). Per-tree RNG is derived from
/// (seed, tree index), so parallel and serial fits match bit for bit.
FittedLearner fit_random_forest(const FeatureMatrix& X, const Labels& y,
                                const LearnerParams& params, int workers = 1);

/// Binary log-loss boosting: F0 = log(n_bot/n_human); each stage fits a
/// squared-error tree to residuals y - p and replaces leaf values with one
/// Newton step scaled by the learning rate.
FittedLearner fit_gradient_boosting(const FeatureMatrix& X, const Labels& y,
                                    const LearnerParams& params);

/// Discrete two-class SAMME over depth-1 stumps; stage weight
/// alpha = ln((1-err)/err); stops at err >= 0.5 (stage dropped) or err = 0
/// (perfect stump recorded).
FittedLearner fit_adaboost(const FeatureMatrix& X, const Labels& y,
                           const LearnerParams& params);

FittedLearner fit_learner(LearnerKind kind, const FeatureMatrix& X, const Labels& y,
                          const LearnerParams& params, int workers = 1);

/// (p_bot, p_human); entries in [0,1] summing to 1 for every family.
std::pair<double, double> predict_proba(const FittedLearner& model,
                                        const Eigen::VectorXd& x);

}  // namespace botdetect
