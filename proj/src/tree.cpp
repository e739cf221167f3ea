#include "tree_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace botdetect {

const TreeNode& Tree::leaf_for(const Eigen::VectorXd& x) const {
  int idx = 0;
  while (!nodes[idx].is_leaf()) {
    const TreeNode& n = nodes[idx];
    idx = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[idx];
}

const TreeNode& Tree::leaf_for_row(const FeatureMatrix& X, Eigen::Index row) const {
  int idx = 0;
  while (!nodes[idx].is_leaf()) {
    const TreeNode& n = nodes[idx];
    idx = X.coeff(row, n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[idx];
}

namespace detail {

double gini_pair(double n_bot, double n_human) {
  const double w = n_bot + n_human;
  if (w <= 0) return 0.0;
  const double pb = n_bot / w;
  const double ph = n_human / w;
  return 1.0 - pb * pb - ph * ph;
}

namespace {

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double score = 0;  // lower is better
};

// One (value, row-payload) entry of a gathered column.
struct Sample {
  double value;
  int row;
};

class TreeBuilder {
public:
  TreeBuilder(const FeatureMatrix& X, const TreeBuildConfig& config)
      : X_(X), config_(config) {
    column_.resize(X.rows());
    all_features_.resize(static_cast<std::size_t>(X.cols()));
    std::iota(all_features_.begin(), all_features_.end(), 0);
  }

  virtual ~TreeBuilder() = default;

  Tree build(const std::vector<int>& active) {
    Tree tree;
    grow(tree, active, 0);
    return tree;
  }

protected:
  // Node statistics and leaf filling are family-specific.
  virtual double node_impurity(const std::vector<int>& active) const = 0;
  virtual bool is_pure(const std::vector<int>& active) const = 0;
  virtual void fill_leaf(TreeNode& node, const std::vector<int>& active) const = 0;
  // Scores every boundary of sorted `samples`; returns best (lowest score).
  virtual SplitCandidate scan_feature(const std::vector<Sample>& samples) const = 0;
  virtual double total_weight(const std::vector<int>& active) const = 0;

  const FeatureMatrix& X_;
  const TreeBuildConfig& config_;
  int min_leaf() const { return config_.min_samples_leaf; }

private:
  int grow(Tree& tree, const std::vector<int>& active, int depth) {
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[idx].weight = total_weight(active);
    tree.nodes[idx].impurity = node_impurity(active);

    const bool can_split =
        depth < config_.max_depth &&
        static_cast<int>(active.size()) >= 2 * config_.min_samples_leaf &&
        !is_pure(active);
    SplitCandidate best;
    if (can_split) best = find_split(active);
    if (!best.found) {
      fill_leaf(tree.nodes[idx], active);
      return idx;
    }

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(active.size());
    right_rows.reserve(active.size());
    for (int row : active) {
      if (X_.coeff(row, best.feature) <= best.threshold) {
        left_rows.push_back(row);
      } else {
        right_rows.push_back(row);
      }
    }

    tree.nodes[idx].feature = best.feature;
    tree.nodes[idx].threshold = best.threshold;
    const int left = grow(tree, left_rows, depth + 1);
    const int right = grow(tree, right_rows, depth + 1);
    tree.nodes[idx].left = left;
    tree.nodes[idx].right = right;
    return idx;
  }

  SplitCandidate find_split(const std::vector<int>& active) {
    const std::vector<int>* features = &all_features_;
    std::vector<int> sampled;
    if (config_.features_per_split > 0 &&
        config_.features_per_split < static_cast<int>(all_features_.size()) &&
        config_.rng != nullptr) {
      sampled.reserve(static_cast<std::size_t>(config_.features_per_split));
      std::sample(all_features_.begin(), all_features_.end(),
                  std::back_inserter(sampled),
                  static_cast<std::size_t>(config_.features_per_split),
                  *config_.rng);
      features = &sampled;  // std::sample keeps ascending order
    }

    SplitCandidate best;
    std::vector<Sample> samples;
    samples.reserve(active.size());
    for (int f : *features) {
      X_.column(f, column_);
      samples.clear();
      for (int row : active) samples.push_back({column_[row], row});
      std::sort(samples.begin(), samples.end(),
                [](const Sample& a, const Sample& b) { return a.value < b.value; });
      if (samples.front().value == samples.back().value) continue;
      SplitCandidate cand = scan_feature(samples);
      if (cand.found && (!best.found || cand.score < best.score)) {
        best = cand;
        best.feature = f;
      }
    }
    return best;
  }

  std::vector<int> all_features_;
  mutable Eigen::VectorXd column_;
};

class ClassificationBuilder : public TreeBuilder {
public:
  ClassificationBuilder(const FeatureMatrix& X, const Labels& y,
                        const std::vector<double>& weights,
                        const TreeBuildConfig& config)
      : TreeBuilder(X, config), y_(y), weights_(weights) {}

protected:
  double weight_of(int row) const {
    return weights_.empty() ? 1.0 : weights_[row];
  }

  double total_weight(const std::vector<int>& active) const override {
    double w = 0;
    for (int row : active) w += weight_of(row);
    return w;
  }

  double node_impurity(const std::vector<int>& active) const override {
    double wb = 0, wh = 0;
    tally(active, wb, wh);
    return gini_pair(wb, wh);
  }

  bool is_pure(const std::vector<int>& active) const override {
    double wb = 0, wh = 0;
    tally(active, wb, wh);
    return wb == 0.0 || wh == 0.0;
  }

  void fill_leaf(TreeNode& node, const std::vector<int>& active) const override {
    tally(active, node.n_bot, node.n_human);
  }

  SplitCandidate scan_feature(const std::vector<Sample>& samples) const override {
    double total_bot = 0, total_human = 0;
    for (const Sample& s : samples) {
      if (y_[s.row] == 1) {
        total_bot += weight_of(s.row);
      } else {
        total_human += weight_of(s.row);
      }
    }
    const double total = total_bot + total_human;
    const int n = static_cast<int>(samples.size());

    SplitCandidate best;
    double left_bot = 0, left_human = 0;
    for (int i = 0; i < n - 1; ++i) {
      if (y_[samples[i].row] == 1) {
        left_bot += weight_of(samples[i].row);
      } else {
        left_human += weight_of(samples[i].row);
      }
      if (samples[i + 1].value == samples[i].value) continue;
      const int left_n = i + 1;
      const int right_n = n - left_n;
      if (left_n < min_leaf() || right_n < min_leaf()) continue;
      const double right_bot = total_bot - left_bot;
      const double right_human = total_human - left_human;
      const double wl = left_bot + left_human;
      const double wr = right_bot + right_human;
      const double score = (wl * gini_pair(left_bot, left_human) +
                            wr * gini_pair(right_bot, right_human)) /
                           total;
      if (!best.found || score < best.score) {
        best.found = true;
        best.threshold = (samples[i].value + samples[i + 1].value) / 2.0;
        best.score = score;
      }
    }
    return best;
  }

private:
  void tally(const std::vector<int>& active, double& wb, double& wh) const {
    wb = 0;
    wh = 0;
    for (int row : active) {
      if (y_[row] == 1) {
        wb += weight_of(row);
      } else {
        wh += weight_of(row);
      }
    }
  }

  const Labels& y_;
  const std::vector<double>& weights_;
};

class RegressionBuilder : public TreeBuilder {
public:
  RegressionBuilder(const FeatureMatrix& X, const std::vector<double>& target,
                    const std::vector<double>& hessian, double leaf_scale,
                    const TreeBuildConfig& config)
      : TreeBuilder(X, config),
        target_(target),
        hessian_(hessian),
        leaf_scale_(leaf_scale) {}

protected:
  double total_weight(const std::vector<int>& active) const override {
    return static_cast<double>(active.size());
  }

  double node_impurity(const std::vector<int>& active) const override {
    // Mean squared deviation from the node mean.
    double sum = 0, sumsq = 0;
    for (int row : active) {
      sum += target_[row];
      sumsq += target_[row] * target_[row];
    }
    const double n = static_cast<double>(active.size());
    if (n == 0) return 0;
    const double mean = sum / n;
    return std::max(0.0, sumsq / n - mean * mean);
  }

  bool is_pure(const std::vector<int>& active) const override {
    for (std::size_t i = 1; i < active.size(); ++i) {
      if (target_[active[i]] != target_[active[0]]) return false;
    }
    return true;
  }

  void fill_leaf(TreeNode& node, const std::vector<int>& active) const override {
    double num = 0, den = 0;
    for (int row : active) {
      num += target_[row];
      den += hessian_[row];
    }
    node.value = leaf_scale_ * num / std::max(den, 1e-12);
  }

  SplitCandidate scan_feature(const std::vector<Sample>& samples) const override {
    double total_sum = 0;
    for (const Sample& s : samples) total_sum += target_[s.row];
    const int n = static_cast<int>(samples.size());

    SplitCandidate best;
    double left_sum = 0;
    for (int i = 0; i < n - 1; ++i) {
      left_sum += target_[samples[i].row];
      if (samples[i + 1].value == samples[i].value) continue;
      const int left_n = i + 1;
      const int right_n = n - left_n;
      if (left_n < min_leaf() || right_n < min_leaf()) continue;
      const double right_sum = total_sum - left_sum;
      // Equivalent to minimizing total squared error.
      const double score = -(left_sum * left_sum / left_n +
                             right_sum * right_sum / right_n);
      if (!best.found || score < best.score) {
        best.found = true;
        best.threshold = (samples[i].value + samples[i + 1].value) / 2.0;
        best.score = score;
      }
    }
    return best;
  }

private:
  const std::vector<double>& target_;
  const std::vector<double>& hessian_;
  double leaf_scale_;
};

}  // namespace

Tree build_classification_tree(const FeatureMatrix& X, const Labels& y,
                               const std::vector<double>& weights,
                               const std::vector<int>& active,
                               const TreeBuildConfig& config) {
  ClassificationBuilder builder(X, y, weights, config);
  return builder.build(active);
}

Tree build_regression_tree(const FeatureMatrix& X,
                           const std::vector<double>& target,
                           const std::vector<double>& hessian, double leaf_scale,
                           const std::vector<int>& active,
                           const TreeBuildConfig& config) {
  RegressionBuilder builder(X, target, hessian, leaf_scale, config);
  return builder.build(active);
}

}  // namespace detail
}  // namespace botdetect
