#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "botdetect/calibration.hpp"
#include "botdetect/features.hpp"

namespace botdetect {

/// Mean-decrease-in-impurity ranking for one field classifier. Scores are
/// non-negative and sum to 1 whenever any split exists; a split-free model
/// reports all zeros (unnormalized).
struct ImportanceReport {
  FieldKind field = FieldKind::username;
  std::vector<std::pair<std::string, double>> ranked;  // descending score
  bool normalized = false;
  bool truncated_to_vocab = false;  // k exceeded the vocabulary and was clamped
};

/// Sum over trees and nodes of the weighted impurity decrease at each
/// split, attributed to the split feature, averaged over the calibration
/// members (AdaBoost trees weigh in by stage weight).
ImportanceReport mdi_importances(const FieldClassifier& fc,
                                 const std::vector<std::string>& feature_names);

/// Top-k description words by MDI, mapped back through the vocabulary.
/// k larger than the vocabulary clamps (flagged); ties lexicographic.
ImportanceReport top_terms(const FieldClassifier& fc, const TfidfModel& vocab,
                           std::size_t k);

void write_importance_report(std::ostream& out, const ImportanceReport& report,
                             bool delimited);

}  // namespace botdetect
