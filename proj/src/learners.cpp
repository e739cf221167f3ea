#include "botdetect/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "botdetect/errors.hpp"
#include "botdetect/util.hpp"
#include "tree_builder.hpp"

namespace botdetect {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_training_input(const FeatureMatrix& X, const Labels& y) {
  if (X.rows() == 0 || y.empty()) {
    raise(ErrorCode::EmptyTrainingSet, "no training samples");
  }
  if (X.rows() != static_cast<Eigen::Index>(y.size())) {
    raise(ErrorCode::InconsistentDimensions,
          "X has " + std::to_string(X.rows()) + " rows but y has " +
              std::to_string(y.size()) + " labels");
  }
}

std::vector<int> all_rows(const FeatureMatrix& X) {
  std::vector<int> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

std::pair<double, double> leaf_proportions(const TreeNode& leaf) {
  const double total = leaf.n_bot + leaf.n_human;
  if (total <= 0) return {0.5, 0.5};
  return {leaf.n_bot / total, leaf.n_human / total};
}

int count_bots(const Labels& y) {
  return static_cast<int>(std::count(y.begin(), y.end(), 1));
}

}  // namespace

std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::decision_tree: return "decision_tree";
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::gradient_boosting: return "gradient_boosting";
    case LearnerKind::ada_boost: return "ada_boost";
  }
  return "decision_tree";
}

std::optional<LearnerKind> learner_from_string(const std::string& s) {
  if (s == "decision_tree") return LearnerKind::decision_tree;
  if (s == "random_forest") return LearnerKind::random_forest;
  if (s == "gradient_boosting") return LearnerKind::gradient_boosting;
  if (s == "ada_boost") return LearnerKind::ada_boost;
  return std::nullopt;
}

LearnerParams default_params(LearnerKind kind) {
  LearnerParams p;
  switch (kind) {
    case LearnerKind::decision_tree:
      p.max_depth = 8;
      p.min_samples_leaf = 5;
      p.n_estimators = 1;
      p.feature_subsample = FeatureSubsample::all_features;
      p.bootstrap = false;
      break;
    case LearnerKind::random_forest:
      p.max_depth = 8;
      p.min_samples_leaf = 5;
      p.n_estimators = 100;
      p.feature_subsample = FeatureSubsample::sqrt_features;
      p.bootstrap = true;
      break;
    case LearnerKind::gradient_boosting:
      p.max_depth = 3;
      p.min_samples_leaf = 1;
      p.n_estimators = 100;
      p.learning_rate = 0.1;
      p.feature_subsample = FeatureSubsample::all_features;
      p.bootstrap = false;
      break;
    case LearnerKind::ada_boost:
      p.max_depth = 1;
      p.min_samples_leaf = 1;
      p.n_estimators = 50;
      p.learning_rate = 1.0;
      p.feature_subsample = FeatureSubsample::all_features;
      p.bootstrap = false;
      break;
  }
  return p;
}

FittedLearner fit_decision_tree(const FeatureMatrix& X, const Labels& y,
                                const LearnerParams& params) {
  check_training_input(X, y);
  detail::TreeBuildConfig config;
  config.max_depth = params.max_depth;
  config.min_samples_leaf = params.min_samples_leaf;

  FittedLearner model;
  model.kind = LearnerKind::decision_tree;
  model.feature_count = static_cast<int>(X.cols());
  model.params = params;
  model.prior_bot = static_cast<double>(count_bots(y)) / static_cast<double>(y.size());
  model.trees.push_back(
      detail::build_classification_tree(X, y, {}, all_rows(X), config));
  return model;
}

FittedLearner fit_random_forest(const FeatureMatrix& X, const Labels& y,
                                const LearnerParams& params, int workers) {
  check_training_input(X, y);
  const int d = static_cast<int>(X.cols());
  detail::TreeBuildConfig base;
  base.max_depth = params.max_depth;
  base.min_samples_leaf = params.min_samples_leaf;
  const int per_split =
      params.feature_subsample == FeatureSubsample::sqrt_features
          ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))))
          : 0;

  FittedLearner model;
  model.kind = LearnerKind::random_forest;
  model.feature_count = d;
  model.params = params;
  model.prior_bot = static_cast<double>(count_bots(y)) / static_cast<double>(y.size());
  model.trees.resize(static_cast<std::size_t>(params.n_estimators));

  const auto n = static_cast<std::size_t>(X.rows());
  parallel_for(model.trees.size(), workers, [&](std::size_t t) {
    auto rng = make_rng(params.seed, t);
    std::vector<int> rows;
    if (params.bootstrap) {
      rows.resize(n);
      std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      rows = all_rows(X);
    }
    detail::TreeBuildConfig config = base;
    config.features_per_split = per_split;
    config.rng = &rng;
    model.trees[t] = detail::build_classification_tree(X, y, {}, rows, config);
  });
  return model;
}

FittedLearner fit_gradient_boosting(const FeatureMatrix& X, const Labels& y,
                                    const LearnerParams& params) {
  check_training_input(X, y);
  const int n_bot = count_bots(y);
  const int n_human = static_cast<int>(y.size()) - n_bot;
  if (n_bot == 0 || n_human == 0) {
    raise(ErrorCode::SingleClassTraining,
          "gradient boosting requires both classes (log-odds diverge)");
  }

  FittedLearner model;
  model.kind = LearnerKind::gradient_boosting;
  model.feature_count = static_cast<int>(X.cols());
  model.params = params;
  model.initial_log_odds =
      std::log(static_cast<double>(n_bot) / static_cast<double>(n_human));
  model.prior_bot = static_cast<double>(n_bot) / static_cast<double>(y.size());

  detail::TreeBuildConfig config;
  config.max_depth = params.max_depth;
  config.min_samples_leaf = params.min_samples_leaf;

  const auto n = y.size();
  std::vector<double> score(n, model.initial_log_odds);
  std::vector<double> residual(n), hessian(n);
  const auto rows = all_rows(X);
  for (int stage = 0; stage < params.n_estimators; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(score[i]);
      residual[i] = static_cast<double>(y[i]) - p;
      hessian[i] = p * (1.0 - p);
    }
    Tree tree = detail::build_regression_tree(X, residual, hessian,
                                              params.learning_rate, rows, config);
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += tree.leaf_for_row(X, static_cast<Eigen::Index>(i)).value;
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

FittedLearner fit_adaboost(const FeatureMatrix& X, const Labels& y,
                           const LearnerParams& params) {
  check_training_input(X, y);
  const int n_bot = count_bots(y);
  const int n_human = static_cast<int>(y.size()) - n_bot;
  if (n_bot == 0 || n_human == 0) {
    raise(ErrorCode::SingleClassTraining, "AdaBoost requires both classes");
  }

  FittedLearner model;
  model.kind = LearnerKind::ada_boost;
  model.feature_count = static_cast<int>(X.cols());
  model.params = params;
  model.prior_bot = static_cast<double>(n_bot) / static_cast<double>(y.size());

  detail::TreeBuildConfig config;
  config.max_depth = params.max_depth;
  config.min_samples_leaf = params.min_samples_leaf;

  const auto n = y.size();
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  const auto rows = all_rows(X);
  std::vector<int> predicted(n);

  for (int stage = 0; stage < params.n_estimators; ++stage) {
    Tree stump = detail::build_classification_tree(X, y, weights, rows, config);
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& leaf = stump.leaf_for_row(X, static_cast<Eigen::Index>(i));
      predicted[i] = leaf.n_bot > leaf.n_human ? 1 : 0;  // tie -> human
      if (predicted[i] != y[i]) err += weights[i];
    }
    if (err >= 0.5) break;  // stump no better than chance; stage dropped
    const double clamped = std::max(err, 1e-10);
    const double alpha = std::log((1.0 - clamped) / clamped);
    model.trees.push_back(std::move(stump));
    model.stage_weights.push_back(alpha);
    if (err == 0.0) break;  // perfect stump recorded

    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (predicted[i] != y[i]) weights[i] *= std::exp(alpha);
      total += weights[i];
    }
    for (auto& w : weights) w /= total;
  }
  return model;
}

FittedLearner fit_learner(LearnerKind kind, const FeatureMatrix& X, const Labels& y,
                          const LearnerParams& params, int workers) {
  switch (kind) {
    case LearnerKind::decision_tree: return fit_decision_tree(X, y, params);
    case LearnerKind::random_forest: return fit_random_forest(X, y, params, workers);
    case LearnerKind::gradient_boosting: return fit_gradient_boosting(X, y, params);
    case LearnerKind::ada_boost: return fit_adaboost(X, y, params);
  }
  raise(ErrorCode::InvalidConfig, "unknown learner kind");
}

std::pair<double, double> predict_proba(const FittedLearner& model,
                                        const Eigen::VectorXd& x) {
  if (x.size() != model.feature_count) {
    raise(ErrorCode::DimensionMismatch,
          "expected " + std::to_string(model.feature_count) + " features, got " +
              std::to_string(x.size()));
  }
  switch (model.kind) {
    case LearnerKind::decision_tree: {
      return leaf_proportions(model.trees.front().leaf_for(x));
    }
    case LearnerKind::random_forest: {
      double bot = 0;
      for (const auto& tree : model.trees) {
        bot += leaf_proportions(tree.leaf_for(x)).first;
      }
      bot /= static_cast<double>(model.trees.size());
      return {bot, 1.0 - bot};
    }
    case LearnerKind::gradient_boosting: {
      double f = model.initial_log_odds;
      for (const auto& tree : model.trees) f += tree.leaf_for(x).value;
      const double p = sigmoid(f);
      return {p, 1.0 - p};
    }
    case LearnerKind::ada_boost: {
      if (model.trees.empty()) {
        return {model.prior_bot, 1.0 - model.prior_bot};
      }
      double vote = 0, alpha_total = 0;
      for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto& leaf = model.trees[t].leaf_for(x);
        const double side = leaf.n_bot > leaf.n_human ? 1.0 : -1.0;
        vote += model.stage_weights[t] * side;
        alpha_total += model.stage_weights[t];
      }
      const double p = sigmoid(vote / alpha_total);
      return {p, 1.0 - p};
    }
  }
  return {0.5, 0.5};
}

}  // namespace botdetect
