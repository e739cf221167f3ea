#pragma once

// Internal CART builder shared by the four learner families.

#include <random>
#include <vector>

#include "botdetect/learners.hpp"
#include "botdetect/matrix.hpp"

namespace botdetect::detail {

struct TreeBuildConfig {
  int max_depth = 8;
  int min_samples_leaf = 1;
  int features_per_split = 0;   // <= 0 means all features
  std::mt19937_64* rng = nullptr;  // required when subsampling features
};

/// Gini-impurity classification tree over the given active rows.
/// `weights` may be empty (unit weights).
Tree build_classification_tree(const FeatureMatrix& X, const Labels& y,
                               const std::vector<double>& weights,
                               const std::vector<int>& active,
                               const TreeBuildConfig& config);

/// Squared-error regression tree on `target`; leaf values are replaced by
/// the Newton step sum(target) / max(sum(hessian), 1e-12), scaled by
/// `leaf_scale`.
Tree build_regression_tree(const FeatureMatrix& X,
                           const std::vector<double>& target,
                           const std::vector<double>& hessian,
                           double leaf_scale,
                           const std::vector<int>& active,
                           const TreeBuildConfig& config);

double gini_pair(double n_bot, double n_human);

}  // namespace botdetect::detail
