#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "botdetect/learners.hpp"
#include "botdetect/types.hpp"

namespace botdetect {

/// Sigmoid P(bot | s) = 1 / (1 + exp(a*s + b)) over a raw bot-score s.
/// a is negative whenever higher raw scores mean more bot-like.
struct CalibrationParams {
  double a = 0;
  double b = 0;

  double apply(double score) const;
  bool operator==(const CalibrationParams&) const = default;
};

/// Maximum-likelihood sigmoid fit with Platt's smoothed targets
/// t+ = (N+ + 1)/(N+ + 2), t- = 1/(N- + 2), by damped Newton iteration
/// (converges when the gradient infinity-norm drops below 1e-8, at most
/// 100 iterations).
CalibrationParams platt_fit(const std::vector<double>& scores, const Labels& labels);

/// One cross-validation member: a learner fitted on k-1 folds plus the
/// sigmoid fitted on its held-out fold.
struct CalibratedMember {
  FittedLearner learner;
  CalibrationParams platt;

  bool operator==(const CalibratedMember&) const = default;
};

/// One calibrated classifier bound to a field group. Prediction is the mean
/// of the members' calibrated bot probabilities. `constant_fallback` marks
/// classifiers that could not be trained (no usable field data) and always
/// answer the training prior.
struct FieldClassifier {
  FieldKind field = FieldKind::username;
  LearnerKind kind = LearnerKind::decision_tree;
  std::string schema_id;
  int feature_count = 0;
  std::vector<CalibratedMember> members;
  bool constant_fallback = false;
  double fallback_p_bot = 0.5;

  bool operator==(const FieldClassifier&) const = default;
};

/// Stratified k-fold calibration: per fold, fit the learner on the other
/// folds and Platt-scale its raw scores on the held-out fold. k = 1
/// degenerates to fit-on-all + calibrate-on-all.
FieldClassifier calibrated_fit(LearnerKind kind, const FeatureMatrix& X,
                               const Labels& y, const LearnerParams& params,
                               int k = 5, int workers = 1);

/// (bot, human); mean over members of the calibrated bot probability.
std::pair<double, double> calibrated_predict(const FieldClassifier& fc,
                                             const Eigen::VectorXd& x);

FieldClassifier make_constant_classifier(FieldKind field, double p_bot);

}  // namespace botdetect
