#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "botdetect/calibration.hpp"
#include "botdetect/chartable.hpp"
#include "botdetect/features.hpp"
#include "botdetect/types.hpp"

namespace botdetect {

using ProbPair = std::pair<double, double>;  // (bot, human)

/// One comparison cell: overall meta-test accuracy plus per-platform subset
/// accuracies (nullopt = NA, the platform contributes no rows with the
/// field). Percentages in [0,100]; overall is NaN when the cell could not
/// be evaluated at all.
struct LearnerEval {
  double overall = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> reddit;
  std::optional<double> instagram;
};

struct FieldComparison {
  FieldKind field = FieldKind::username;
  std::array<LearnerEval, kLearnerKindCount> by_kind;
};

struct ComparisonTable {
  std::array<FieldComparison, kFieldCount> fields;
};

/// Per field: the chosen family, its comparison cells, and whether the
/// multi-platform qualification rule had to be bypassed.
struct SelectionEntry {
  FieldKind field = FieldKind::username;
  LearnerKind chosen = LearnerKind::decision_tree;
  std::array<LearnerEval, kLearnerKindCount> cells;
  bool flagged = false;
  std::string note = "ok";
};

/// Highest-overall-accuracy family among those with non-zero accuracy on
/// every applicable non-Twitter subset; if none qualifies, highest overall
/// with the field flagged. Ties resolve in fixed kind order.
std::vector<SelectionEntry> select_field_models(const ComparisonTable& table);

struct TrainConfig {
  std::uint64_t seed = 42;
  int calibration_folds = 5;
  double train_ratio = 0.8;
  TfidfConfig desc_tfidf{};
  TfidfConfig posts_tfidf{};
  std::array<LearnerParams, kLearnerKindCount> learner_params = {
      default_params(LearnerKind::decision_tree),
      default_params(LearnerKind::random_forest),
      default_params(LearnerKind::gradient_boosting),
      default_params(LearnerKind::ada_boost)};
  int workers = 1;
  std::string created_at = "1970-01-01T00:00:00Z";  // stamped by the CLI
  std::optional<NameCharTable> char_table;  // prebuilt table; otherwise built
                                            // from training names
};

inline constexpr const char* kModelFormatVersion = "1";

/// The trained ensemble: five calibrated field classifiers plus the
/// vocabularies and character table they featurize with. Immutable after
/// training; the unit of serialization.
struct EnsembleModel {
  std::string format_version = kModelFormatVersion;
  std::string created_at;
  std::uint64_t training_seed = 0;
  NameCharTable char_table;
  TfidfModel desc_tfidf;
  TfidfModel posts_tfidf;
  std::array<FieldClassifier, kFieldCount> classifiers;  // by FieldKind order
  std::vector<SelectionEntry> selection_report;
};

/// Per-dataset stratified 80-20 splits concatenated into meta-train /
/// meta-test; per field and family, plain fits are compared on meta-test,
/// select_field_models picks the families, and the chosen families are
/// retrained with cross-validated Platt calibration on meta-train.
EnsembleModel train_ensemble(const std::vector<LabeledDataset>& datasets,
                             const TrainConfig& config);

struct Prediction {
  std::string user_id;
  PlatformKind platform = PlatformKind::custom;
  std::array<std::optional<ProbPair>, kFieldCount> per_field;
  ProbPair aggregate{0.0, 1.0};
  BotLabel label = BotLabel::human;
  int fields_used = 0;
  bool no_data = false;
};

/// Arithmetic mean of the non-null per-field tuples; argmax label with
/// tie -> human; no non-null tuple -> (0, 1), human, no_data.
Prediction aggregate_prediction(const std::array<std::optional<ProbPair>, kFieldCount>& per_field);

/// Raw feature vector for one field group, or nullopt when the group is
/// absent from the record.
std::optional<Eigen::VectorXd> extract_field_features(const UserRecord& record,
                                                      FieldKind field,
                                                      const EnsembleModel& model);

/// Total: every record receives a Prediction.
Prediction predict_user(const EnsembleModel& model, const UserRecord& record);

/// Order-preserving, element-wise equal to predict_user; parallel over
/// records.
std::vector<Prediction> predict_batch(const EnsembleModel& model,
                                      const std::vector<UserRecord>& records,
                                      int workers = 1);

/// Delimited rows: user_id, platform, p_bot, p_human, label, fields_used,
/// then per-field bot/human probabilities (empty cell = null).
void write_prediction_rows(std::ostream& out, const std::vector<Prediction>& preds);

void write_comparison_table(std::ostream& out, const ComparisonTable& table,
                            bool delimited);
void write_selection_report(std::ostream& out,
                            const std::vector<SelectionEntry>& report);

}  // namespace botdetect
