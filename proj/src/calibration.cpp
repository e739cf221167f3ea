#include "botdetect/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "botdetect/errors.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

double CalibrationParams::apply(double score) const {
  return 1.0 / (1.0 + std::exp(a * score + b));
}

namespace {

double platt_objective(const std::vector<double>& scores,
                       const std::vector<double>& targets, double a, double b) {
  double loss = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double f = a * scores[i] + b;
    // Numerically stable -[t*log(p) + (1-t)*log(1-p)] with p = 1/(1+e^f):
    // log(p) = -log1p(e^f), log(1-p) = f - log1p(e^f).
    const double log1pef = f > 0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
    loss += targets[i] * log1pef + (1.0 - targets[i]) * (log1pef - f);
  }
  return loss;
}

}  // namespace

CalibrationParams platt_fit(const std::vector<double>& scores, const Labels& labels) {
  if (scores.size() != labels.size()) {
    raise(ErrorCode::LengthMismatch, "scores and labels differ in length");
  }
  if (scores.empty()) raise(ErrorCode::EmptyInput, "no calibration scores");
  for (double s : scores) {
    if (!std::isfinite(s)) raise(ErrorCode::NonFiniteScore, "raw score not finite");
  }
  const auto n = scores.size();
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += (l == 1);
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    raise(ErrorCode::SingleClassCalibration, "calibration needs both classes");
  }

  const double t_pos = (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0);
  const double t_neg = 1.0 / (static_cast<double>(n_neg) + 2.0);
  std::vector<double> targets(n);
  for (std::size_t i = 0; i < n; ++i) targets[i] = labels[i] == 1 ? t_pos : t_neg;

  double a = 0;
  double b = std::log((static_cast<double>(n_neg) + 1.0) /
                      (static_cast<double>(n_pos) + 1.0));
  double loss = platt_objective(scores, targets, a, b);

  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = a * scores[i] + b;
      const double p = 1.0 / (1.0 + std::exp(f));
      const double g = targets[i] - p;  // d(loss)/df
      ga += g * scores[i];
      gb += g;
      const double h = p * (1.0 - p);
      haa += h * scores[i] * scores[i];
      hab += h * scores[i];
      hbb += h;
    }
    if (std::max(std::abs(ga), std::abs(gb)) < 1e-8) break;

    // Solve the 2x2 Newton system with a small ridge for degenerate scores.
    const double ridge = 1e-12;
    haa += ridge;
    hbb += ridge;
    const double det = haa * hbb - hab * hab;
    double da = -(hbb * ga - hab * gb) / det;
    double db = -(haa * gb - hab * ga) / det;

    double step = 1.0;
    for (int halving = 0; halving < 32; ++halving) {
      const double next = platt_objective(scores, targets, a + step * da, b + step * db);
      if (next <= loss + 1e-15) {
        a += step * da;
        b += step * db;
        loss = next;
        break;
      }
      step /= 2.0;
    }
  }
  return CalibrationParams{a, b};
}

namespace {

// Stratified fold ids: per class, shuffled then dealt round-robin.
std::vector<int> fold_assignment(const Labels& y, int k, std::uint64_t seed) {
  std::vector<int> folds(y.size(), 0);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) idx.push_back(i);
    }
    auto rng = make_rng(seed, static_cast<std::uint64_t>(cls));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      folds[idx[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    }
  }
  return folds;
}

FeatureMatrix subset_rows(const FeatureMatrix& X, const std::vector<int>& rows) {
  if (!X.is_sparse()) {
    Eigen::MatrixXd dense(static_cast<Eigen::Index>(rows.size()), X.cols());
    Eigen::VectorXd col(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      X.column(j, col);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        dense(static_cast<Eigen::Index>(i), j) = col[rows[i]];
      }
    }
    return FeatureMatrix(std::move(dense));
  }
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd col(X.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    X.column(j, col);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = col[rows[i]];
      if (v != 0.0) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
      }
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows.size()), X.cols());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return FeatureMatrix(std::move(m));
}

}  // namespace

FieldClassifier calibrated_fit(LearnerKind kind, const FeatureMatrix& X,
                               const Labels& y, const LearnerParams& params,
                               int k, int workers) {
  if (X.rows() == 0) raise(ErrorCode::EmptyTrainingSet, "no samples to calibrate");
  if (k < 1) raise(ErrorCode::InvalidConfig, "fold count must be >= 1");
  if (static_cast<int>(y.size()) < k) {
    raise(ErrorCode::TooFewSamples,
          std::to_string(y.size()) + " samples for " + std::to_string(k) + " folds");
  }

  FieldClassifier fc;
  fc.kind = kind;
  fc.feature_count = static_cast<int>(X.cols());

  if (k == 1) {
    FittedLearner learner = fit_learner(kind, X, y, params, workers);
    std::vector<double> scores(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      scores[i] =
          predict_proba(learner, X.row(static_cast<Eigen::Index>(i))).first;
    }
    CalibrationParams platt = platt_fit(scores, y);
    fc.members.push_back({std::move(learner), platt});
    return fc;
  }

  const auto folds = fold_assignment(y, k, params.seed);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<int> train_rows, heldout_rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (folds[i] == fold) {
        heldout_rows.push_back(static_cast<int>(i));
      } else {
        train_rows.push_back(static_cast<int>(i));
      }
    }
    Labels train_y, heldout_y;
    train_y.reserve(train_rows.size());
    for (int r : train_rows) train_y.push_back(y[r]);
    for (int r : heldout_rows) heldout_y.push_back(y[r]);

    LearnerParams member_params = params;
    member_params.seed = mix_seed(params.seed, static_cast<std::uint64_t>(fold) + 101);
    FeatureMatrix train_X = subset_rows(X, train_rows);
    FittedLearner learner = fit_learner(kind, train_X, train_y, member_params, workers);

    std::vector<double> scores;
    scores.reserve(heldout_rows.size());
    for (int r : heldout_rows) {
      scores.push_back(
          predict_proba(learner,
                        X.row(static_cast<Eigen::Index>(r)))
              .first);
    }
    CalibrationParams platt = platt_fit(scores, heldout_y);
    fc.members.push_back({std::move(learner), platt});
  }
  return fc;
}

std::pair<double, double> calibrated_predict(const FieldClassifier& fc,
                                             const Eigen::VectorXd& x) {
  if (fc.constant_fallback) {
    return {fc.fallback_p_bot, 1.0 - fc.fallback_p_bot};
  }
  if (x.size() != fc.feature_count) {
    raise(ErrorCode::DimensionMismatch,
          to_string(fc.field) + ": expected " + std::to_string(fc.feature_count) +
              " features, got " + std::to_string(x.size()));
  }
  double bot = 0;
  for (const auto& member : fc.members) {
    bot += member.platt.apply(predict_proba(member.learner, x).first);
  }
  bot /= static_cast<double>(fc.members.size());
  return {bot, 1.0 - bot};
}

FieldClassifier make_constant_classifier(FieldKind field, double p_bot) {
  FieldClassifier fc;
  fc.field = field;
  fc.constant_fallback = true;
  fc.fallback_p_bot = p_bot;
  fc.feature_count = 0;
  return fc;
}

}  // namespace botdetect
