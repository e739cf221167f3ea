#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "botdetect/learners.hpp"
#include "botdetect/types.hpp"

namespace botdetect {

struct EnsembleModel;
struct TrainConfig;
struct ComparisonTable;

/// counts[truth][pred] with 1 = bot, 0 = human (matching Labels).
struct ConfusionMatrix {
  std::int64_t counts[2][2] = {{0, 0}, {0, 0}};

  std::int64_t total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }
  bool operator==(const ConfusionMatrix& o) const {
    for (int t = 0; t < 2; ++t)
      for (int p = 0; p < 2; ++p)
        if (counts[t][p] != o.counts[t][p]) return false;
    return true;
  }
};

/// All values as percentages in [0,100]. Macro-F1 averages the two
/// per-class F1 scores; micro-F1 pools TP/FP/FN counting each class as
/// positive in turn.
struct Metrics {
  double accuracy = 0;
  double micro_f1 = 0;
  double macro_f1 = 0;
  ConfusionMatrix confusion;
};

Metrics compute_metrics(const Labels& predicted, const Labels& truth);

/// Per-class counts in train equal round(ratio * class size); shuffling is
/// per class from the seed. Raises SingleClassDataset.
struct SplitIndices {
  std::vector<std::size_t> train, test;
};
SplitIndices stratified_split(const Labels& y, double ratio, std::uint64_t seed);

/// Same arithmetic without the both-classes requirement; used for the
/// per-dataset meta splits, where single-class datasets are legal.
SplitIndices stratified_split_any(const Labels& y, double ratio, std::uint64_t seed);

/// Disjoint, covering folds, class-balanced within +-1.
/// Raises TooFewPerClass when any class count < k.
std::vector<std::vector<std::size_t>> stratified_kfold(const Labels& y, int k,
                                                       std::uint64_t seed);

enum class EvalMode { processed_only, unprocessed_as_human, full_fields_only };

std::string to_string(EvalMode m);
std::optional<EvalMode> eval_mode_from_string(const std::string& s);

struct EvalReport {
  std::string dataset_name;
  EvalMode mode = EvalMode::unprocessed_as_human;
  double pct_processed = 0;  // [0,100]
  std::optional<double> accuracy_processed;
  std::optional<double> accuracy_overall;
  std::optional<double> micro_f1;
  std::optional<double> macro_f1;
  ConfusionMatrix confusion;
  std::int64_t evaluated_records = 0;
  std::int64_t unlabeled_skipped = 0;
};

struct EvalOptions {
  bool heldout_only = false;  // score only the per-dataset test split,
                              // re-derived from the model's training seed
  double train_ratio = 0.8;
  int workers = 1;
};

EvalReport evaluate(const EnsembleModel& model, const LabeledDataset& dataset,
                    EvalMode mode, const EvalOptions& options = {});

/// Accuracy of each of the four learner families on each field's meta-test
/// subset, plus Reddit-only / Instagram-only subset accuracies (NA when the
/// platform contributes no rows with that field). Feeds select_field_models.
ComparisonTable learner_comparison(const std::vector<LabeledDataset>& datasets,
                                   const TrainConfig& config);

void write_eval_report(std::ostream& out, const EvalReport& report, bool delimited);

/// One header for the whole batch in delimited mode.
void write_eval_reports(std::ostream& out, const std::vector<EvalReport>& reports,
                        bool delimited);

}  // namespace botdetect
