#include "botdetect/importance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "botdetect/errors.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

namespace {

// Unnormalized per-feature impurity decrease for one tree, weighted by the
// root's total weight (node.weight / root_weight is each node's share).
void accumulate_tree(const Tree& tree, double tree_weight,
                     std::vector<double>& scores) {
  if (tree.nodes.empty()) return;
  const double root_weight = tree.nodes[0].weight;
  if (root_weight <= 0) return;
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    const auto& left = tree.nodes[node.left];
    const auto& right = tree.nodes[node.right];
    const double decrease =
        (node.weight * node.impurity - left.weight * left.impurity -
         right.weight * right.impurity) /
        root_weight;
    if (decrease > 0 && node.feature >= 0 &&
        node.feature < static_cast<int>(scores.size())) {
      scores[node.feature] += tree_weight * decrease;
    }
  }
}

std::vector<double> member_scores(const FittedLearner& learner, int n_features) {
  std::vector<double> scores(static_cast<std::size_t>(n_features), 0.0);
  if (learner.trees.empty()) return scores;
  switch (learner.kind) {
    case LearnerKind::decision_tree:
    case LearnerKind::gradient_boosting:
      for (const auto& tree : learner.trees) accumulate_tree(tree, 1.0, scores);
      break;
    case LearnerKind::random_forest: {
      const double w = 1.0 / static_cast<double>(learner.trees.size());
      for (const auto& tree : learner.trees) accumulate_tree(tree, w, scores);
      break;
    }
    case LearnerKind::ada_boost: {
      double alpha_total = 0;
      for (double a : learner.stage_weights) alpha_total += a;
      for (std::size_t t = 0; t < learner.trees.size(); ++t) {
        const double w =
            alpha_total > 0 ? learner.stage_weights[t] / alpha_total : 0.0;
        accumulate_tree(learner.trees[t], w, scores);
      }
      break;
    }
  }
  return scores;
}

}  // namespace

ImportanceReport mdi_importances(const FieldClassifier& fc,
                                 const std::vector<std::string>& feature_names) {
  ImportanceReport report;
  report.field = fc.field;

  std::vector<double> totals(static_cast<std::size_t>(fc.feature_count), 0.0);
  if (!fc.constant_fallback) {
    for (const auto& member : fc.members) {
      const auto scores = member_scores(member.learner, fc.feature_count);
      for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += scores[i];
    }
    if (!fc.members.empty()) {
      for (auto& t : totals) t /= static_cast<double>(fc.members.size());
    }
  }

  double sum = 0;
  for (double t : totals) sum += t;
  if (sum > 0) {
    for (auto& t : totals) t /= sum;
    report.normalized = true;
  }

  report.ranked.reserve(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    const std::string name =
        i < feature_names.size() ? feature_names[i] : "f" + std::to_string(i);
    report.ranked.emplace_back(name, totals[i]);
  }
  std::sort(report.ranked.begin(), report.ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return report;
}

ImportanceReport top_terms(const FieldClassifier& fc, const TfidfModel& vocab,
                           std::size_t k) {
  auto report = mdi_importances(fc, vocab.tokens_by_index());
  if (k > report.ranked.size()) {
    report.truncated_to_vocab = true;
    k = report.ranked.size();
  }
  report.ranked.resize(k);
  return report;
}

void write_importance_report(std::ostream& out, const ImportanceReport& report,
                             bool delimited) {
  if (delimited) {
    out << "rank,name,score\n";
    for (std::size_t i = 0; i < report.ranked.size(); ++i) {
      out << (i + 1) << ',' << report.ranked[i].first << ','
          << format_double(report.ranked[i].second) << '\n';
    }
    return;
  }
  out << to_string(report.field) << " feature importances"
      << (report.normalized ? " (MDI, sum 1)" : " (no splits)") << ":\n";
  for (std::size_t i = 0; i < report.ranked.size(); ++i) {
    out << "  " << (i + 1) << ". " << report.ranked[i].first << ' '
        << format_double(report.ranked[i].second) << '\n';
  }
  if (report.truncated_to_vocab) {
    out << "  (requested k exceeded the vocabulary; full ranking shown)\n";
  }
}

}  // namespace botdetect
