#include "botdetect/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "botdetect/errors.hpp"
#include "botdetect/evaluation.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

namespace {

int field_index(FieldKind f) { return static_cast<int>(f); }
int kind_index(LearnerKind k) { return static_cast<int>(k); }

struct MetaRow {
  const UserRecord* rec = nullptr;
  int y = 0;
  PlatformKind platform = PlatformKind::custom;
};

struct MetaSplit {
  std::vector<MetaRow> train, test;
};

// Per-dataset stratified 80-20 splits, concatenated. The shuffle seed is
// derived from the dataset name so held-out evaluation can re-derive the
// same partition later.
MetaSplit make_meta_split(const std::vector<LabeledDataset>& datasets,
                          const TrainConfig& config) {
  MetaSplit meta;
  for (const auto& ds : datasets) {
    std::vector<const UserRecord*> labeled;
    Labels y;
    for (const auto& rec : ds.records) {
      if (rec.label) {
        labeled.push_back(&rec);
        y.push_back(*rec.label == BotLabel::bot ? 1 : 0);
      }
    }
    if (labeled.empty()) continue;
    const auto split = stratified_split_any(
        y, config.train_ratio, mix_seed(config.seed, fnv1a(ds.name)));
    for (auto i : split.train) {
      meta.train.push_back({labeled[i], y[i], labeled[i]->platform});
    }
    for (auto i : split.test) {
      meta.test.push_back({labeled[i], y[i], labeled[i]->platform});
    }
  }
  return meta;
}

// The featurization state shared by training and the fitted model.
struct FeaturePipeline {
  NameCharTable char_table;
  TfidfModel desc_tfidf;
  TfidfModel posts_tfidf;
};

FeaturePipeline fit_feature_pipeline(const std::vector<MetaRow>& train,
                                     const TrainConfig& config) {
  FeaturePipeline pipe;
  if (config.char_table) {
    pipe.char_table = *config.char_table;
  } else {
    std::vector<std::string> names;
    for (const auto& row : train) {
      if (row.rec->username) names.push_back(*row.rec->username);
      if (row.rec->screenname) names.push_back(*row.rec->screenname);
    }
    bool any_chars = false;
    for (const auto& n : names) any_chars = any_chars || !n.empty();
    if (!any_chars) {
      // No names anywhere; user ids are always non-empty.
      names.clear();
      for (const auto& row : train) names.push_back(row.rec->user_id);
    }
    pipe.char_table = build_char_table(names);
  }

  std::vector<std::string> desc_corpus;
  for (const auto& row : train) {
    if (row.rec->description) desc_corpus.push_back(*row.rec->description);
  }
  if (!desc_corpus.empty()) {
    try {
      pipe.desc_tfidf = fit_tfidf(desc_corpus, config.desc_tfidf);
    } catch (const Error&) {
      // Vocabulary collapsed; the description classifier becomes a fallback.
    }
  }

  std::vector<std::string> posts_corpus;
  for (const auto& row : train) {
    if (row.rec->posts) posts_corpus.push_back(recent_posts_text(*row.rec->posts));
  }
  if (!posts_corpus.empty()) {
    try {
      pipe.posts_tfidf = fit_tfidf(posts_corpus, config.posts_tfidf);
    } catch (const Error&) {
    }
  }
  return pipe;
}

std::optional<Eigen::VectorXd> featurize(const UserRecord& rec, FieldKind field,
                                         const NameCharTable& char_table,
                                         const TfidfModel& desc_tfidf,
                                         const TfidfModel& posts_tfidf) {
  switch (field) {
    case FieldKind::username:
      if (!rec.username) return std::nullopt;
      return username_features(*rec.username, char_table).values;
    case FieldKind::screenname:
      if (!rec.screenname) return std::nullopt;
      return screenname_features(*rec.screenname, char_table).values;
    case FieldKind::description:
      if (!rec.description) return std::nullopt;
      return tfidf_transform_dense(*rec.description, desc_tfidf);
    case FieldKind::user_metadata:
      if (!rec.metadata) return std::nullopt;
      return metadata_features(*rec.metadata).values;
    case FieldKind::posts:
      if (!rec.posts) return std::nullopt;
      return posts_features(*rec.posts, posts_tfidf).values;
  }
  return std::nullopt;
}

// Rows of one field's design matrix: indices into the meta rows plus the
// assembled matrix (sparse for the two text fields).
struct FieldData {
  std::vector<int> row_of_meta;  // meta index per matrix row
  FeatureMatrix X;
  Labels y;
  std::vector<PlatformKind> platforms;
  bool empty() const { return y.empty(); }
};

Eigen::Index field_width(FieldKind field, const FeaturePipeline& pipe) {
  switch (field) {
    case FieldKind::username: return 7;
    case FieldKind::screenname: return 8;
    case FieldKind::user_metadata: return 7;
    case FieldKind::description:
      return static_cast<Eigen::Index>(pipe.desc_tfidf.size());
    case FieldKind::posts:
      return static_cast<Eigen::Index>(pipe.posts_tfidf.size()) + 4;
  }
  return 0;
}

FieldData build_field_data(const std::vector<MetaRow>& rows, FieldKind field,
                           const FeaturePipeline& pipe) {
  FieldData data;
  const bool text_field =
      field == FieldKind::description || field == FieldKind::posts;
  const Eigen::Index width = field_width(field, pipe);

  if (text_field) {
    std::vector<Eigen::SparseVector<double>> sparse_rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& rec = *rows[i].rec;
      if (!rec.has_field(field)) continue;
      Eigen::SparseVector<double> sv(width);
      if (field == FieldKind::description) {
        sv = tfidf_transform(*rec.description, pipe.desc_tfidf);
      } else {
        const auto fv = posts_features(*rec.posts, pipe.posts_tfidf).values;
        for (Eigen::Index j = 0; j < fv.size(); ++j) {
          if (fv[j] != 0.0) sv.insertBack(j) = fv[j];
        }
      }
      sparse_rows.push_back(std::move(sv));
      data.row_of_meta.push_back(static_cast<int>(i));
      data.y.push_back(rows[i].y);
      data.platforms.push_back(rows[i].platform);
    }
    data.X = make_sparse_matrix(sparse_rows, width);
    return data;
  }

  std::vector<Eigen::VectorXd> dense_rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto fv = featurize(*rows[i].rec, field, pipe.char_table, pipe.desc_tfidf,
                        pipe.posts_tfidf);
    if (!fv) continue;
    dense_rows.push_back(std::move(*fv));
    data.row_of_meta.push_back(static_cast<int>(i));
    data.y.push_back(rows[i].y);
    data.platforms.push_back(rows[i].platform);
  }
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(dense_rows.size()), width);
  for (std::size_t i = 0; i < dense_rows.size(); ++i) {
    dense.row(static_cast<Eigen::Index>(i)) = dense_rows[i];
  }
  data.X = FeatureMatrix(std::move(dense));
  return data;
}

double subset_accuracy(const std::vector<int>& pred, const Labels& truth,
                       const std::vector<bool>& mask) {
  std::int64_t n = 0, correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!mask[i]) continue;
    ++n;
    correct += (pred[i] == truth[i]);
  }
  return n > 0 ? 100.0 * static_cast<double>(correct) / static_cast<double>(n)
               : std::numeric_limits<double>::quiet_NaN();
}

ComparisonTable compare_learners_impl(const MetaSplit& meta,
                                      const FeaturePipeline& pipe,
                                      const TrainConfig& config) {
  ComparisonTable table;
  for (FieldKind field : kAllFields) {
    auto& row = table.fields[field_index(field)];
    row.field = field;
    const FieldData train = build_field_data(meta.train, field, pipe);
    const FieldData test = build_field_data(meta.test, field, pipe);
    if (train.empty() || test.empty()) continue;  // cells stay NaN

    std::vector<bool> reddit_mask(test.y.size()), instagram_mask(test.y.size());
    bool any_reddit = false, any_instagram = false;
    for (std::size_t i = 0; i < test.y.size(); ++i) {
      reddit_mask[i] = test.platforms[i] == PlatformKind::reddit_pushshift;
      instagram_mask[i] = test.platforms[i] == PlatformKind::instagram_crowdtangle;
      any_reddit = any_reddit || reddit_mask[i];
      any_instagram = any_instagram || instagram_mask[i];
    }

    for (LearnerKind kind : kAllLearnerKinds) {
      auto& cell = row.by_kind[kind_index(kind)];
      LearnerParams params = config.learner_params[kind_index(kind)];
      params.seed = mix_seed(config.seed, 17 + field_index(field) * 4 + kind_index(kind));
      FittedLearner learner;
      try {
        learner = fit_learner(kind, train.X, train.y, params, config.workers);
      } catch (const Error&) {
        continue;  // e.g. boosting on a single-class field; cell stays NaN
      }
      std::vector<int> pred(test.y.size());
      for (std::size_t i = 0; i < test.y.size(); ++i) {
        const auto p =
            predict_proba(learner, test.X.row(static_cast<Eigen::Index>(i)));
        pred[i] = p.first > p.second ? 1 : 0;
      }
      std::vector<bool> all_mask(test.y.size(), true);
      cell.overall = subset_accuracy(pred, test.y, all_mask);
      if (any_reddit) cell.reddit = subset_accuracy(pred, test.y, reddit_mask);
      if (any_instagram) {
        cell.instagram = subset_accuracy(pred, test.y, instagram_mask);
      }
    }
  }
  return table;
}

}  // namespace

std::vector<SelectionEntry> select_field_models(const ComparisonTable& table) {
  bool any_finite = false;
  for (const auto& row : table.fields) {
    for (const auto& cell : row.by_kind) {
      any_finite = any_finite || std::isfinite(cell.overall);
    }
  }
  if (!any_finite) {
    raise(ErrorCode::EmptyResults, "comparison table has no evaluated cells");
  }

  std::vector<SelectionEntry> report;
  for (const auto& row : table.fields) {
    SelectionEntry entry;
    entry.field = row.field;
    entry.cells = row.by_kind;

    auto qualifies = [&](const LearnerEval& cell) {
      if (!std::isfinite(cell.overall)) return false;
      if (cell.reddit && *cell.reddit == 0.0) return false;
      if (cell.instagram && *cell.instagram == 0.0) return false;
      return true;
    };

    int best_qualified = -1, best_any = -1;
    for (LearnerKind kind : kAllLearnerKinds) {
      const auto& cell = row.by_kind[kind_index(kind)];
      if (!std::isfinite(cell.overall)) continue;
      if (best_any < 0 || cell.overall > row.by_kind[best_any].overall) {
        best_any = kind_index(kind);
      }
      if (qualifies(cell) &&
          (best_qualified < 0 || cell.overall > row.by_kind[best_qualified].overall)) {
        best_qualified = kind_index(kind);
      }
    }

    if (best_qualified >= 0) {
      entry.chosen = static_cast<LearnerKind>(best_qualified);
    } else if (best_any >= 0) {
      entry.chosen = static_cast<LearnerKind>(best_any);
      entry.flagged = true;
      entry.note = "no learner clears the non-Twitter qualification rule";
    } else {
      entry.chosen = LearnerKind::decision_tree;
      entry.flagged = true;
      entry.note = "no evaluable cells";
    }
    report.push_back(std::move(entry));
  }
  return report;
}

ComparisonTable learner_comparison(const std::vector<LabeledDataset>& datasets,
                                   const TrainConfig& config) {
  const MetaSplit meta = make_meta_split(datasets, config);
  if (meta.train.empty()) raise(ErrorCode::EmptyInput, "no labeled training rows");
  const FeaturePipeline pipe = fit_feature_pipeline(meta.train, config);
  return compare_learners_impl(meta, pipe, config);
}

EnsembleModel train_ensemble(const std::vector<LabeledDataset>& datasets,
                             const TrainConfig& config) {
  if (datasets.empty()) raise(ErrorCode::EmptyInput, "no datasets");
  const MetaSplit meta = make_meta_split(datasets, config);
  if (meta.train.empty()) raise(ErrorCode::EmptyInput, "no labeled training rows");
  bool has_bot = false, has_human = false;
  for (const auto& row : meta.train) {
    has_bot = has_bot || row.y == 1;
    has_human = has_human || row.y == 0;
  }
  if (!has_bot || !has_human) {
    raise(ErrorCode::SingleClassDataset,
          "meta-training set must contain both classes");
  }

  const FeaturePipeline pipe = fit_feature_pipeline(meta.train, config);
  const ComparisonTable table = compare_learners_impl(meta, pipe, config);
  auto report = select_field_models(table);

  double prior_bot = 0;
  for (const auto& row : meta.train) prior_bot += row.y;
  prior_bot /= static_cast<double>(meta.train.size());

  EnsembleModel model;
  model.created_at = config.created_at;
  model.training_seed = config.seed;
  model.char_table = pipe.char_table;
  model.desc_tfidf = pipe.desc_tfidf;
  model.posts_tfidf = pipe.posts_tfidf;

  for (auto& entry : report) {
    const FieldKind field = entry.field;
    const FieldData train = build_field_data(meta.train, field, pipe);
    FieldClassifier fc;
    if (train.empty()) {
      fc = make_constant_classifier(field, prior_bot);
      entry.flagged = true;
      entry.note = "no field data; constant-prior fallback";
    } else {
      LearnerParams params = config.learner_params[kind_index(entry.chosen)];
      params.seed = mix_seed(config.seed, 503 + field_index(field));
      try {
        fc = calibrated_fit(entry.chosen, train.X, train.y, params,
                            config.calibration_folds, config.workers);
      } catch (const Error& e) {
        // Degenerate field data (single class or too few rows per fold).
        fc = make_constant_classifier(field, prior_bot);
        entry.flagged = true;
        entry.note = std::string("calibration fallback: ") + e.what();
      }
    }
    fc.field = field;
    fc.schema_id = schema_id_for(
        field, field == FieldKind::description ? pipe.desc_tfidf.size()
                                               : pipe.posts_tfidf.size());
    model.classifiers[field_index(field)] = std::move(fc);
  }
  model.selection_report = std::move(report);
  return model;
}

Prediction aggregate_prediction(
    const std::array<std::optional<ProbPair>, kFieldCount>& per_field) {
  Prediction pred;
  pred.per_field = per_field;
  double bot = 0, human = 0;
  int used = 0;
  for (const auto& tuple : per_field) {
    if (!tuple) continue;
    bot += tuple->first;
    human += tuple->second;
    ++used;
  }
  pred.fields_used = used;
  if (used == 0) {
    pred.aggregate = {0.0, 1.0};
    pred.label = BotLabel::human;
    pred.no_data = true;
    return pred;
  }
  pred.aggregate = {bot / used, human / used};
  pred.label = pred.aggregate.first > pred.aggregate.second ? BotLabel::bot
                                                            : BotLabel::human;
  return pred;
}

std::optional<Eigen::VectorXd> extract_field_features(const UserRecord& record,
                                                      FieldKind field,
                                                      const EnsembleModel& model) {
  return featurize(record, field, model.char_table, model.desc_tfidf,
                   model.posts_tfidf);
}

Prediction predict_user(const EnsembleModel& model, const UserRecord& record) {
  std::array<std::optional<ProbPair>, kFieldCount> per_field;
  for (FieldKind field : kAllFields) {
    auto features = extract_field_features(record, field, model);
    if (!features) continue;
    per_field[field_index(field)] =
        calibrated_predict(model.classifiers[field_index(field)], *features);
  }
  Prediction pred = aggregate_prediction(per_field);
  pred.user_id = record.user_id;
  pred.platform = record.platform;
  return pred;
}

std::vector<Prediction> predict_batch(const EnsembleModel& model,
                                      const std::vector<UserRecord>& records,
                                      int workers) {
  std::vector<Prediction> preds(records.size());
  parallel_for(records.size(), workers,
               [&](std::size_t i) { preds[i] = predict_user(model, records[i]); });
  return preds;
}

void write_prediction_rows(std::ostream& out, const std::vector<Prediction>& preds) {
  out << "user_id,platform,p_bot,p_human,label,fields_used";
  for (FieldKind f : kAllFields) {
    out << ',' << to_string(f) << "_bot," << to_string(f) << "_human";
  }
  out << '\n';
  for (const auto& p : preds) {
    out << p.user_id << ',' << to_string(p.platform) << ','
        << format_double(p.aggregate.first) << ','
        << format_double(p.aggregate.second) << ',' << to_string(p.label) << ','
        << p.fields_used;
    for (const auto& tuple : p.per_field) {
      if (tuple) {
        out << ',' << format_double(tuple->first) << ','
            << format_double(tuple->second);
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
}

namespace {

std::string cell_text(const LearnerEval& cell) {
  if (!std::isfinite(cell.overall)) return "NA";
  std::string text = format_double(cell.overall);
  auto subset = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("NA");
  };
  text += " (R " + subset(cell.reddit) + ", IG " + subset(cell.instagram) + ")";
  return text;
}

}  // namespace

void write_comparison_table(std::ostream& out, const ComparisonTable& table,
                            bool delimited) {
  if (delimited) {
    out << "field,learner,overall,reddit,instagram\n";
    for (const auto& row : table.fields) {
      for (LearnerKind kind : kAllLearnerKinds) {
        const auto& cell = row.by_kind[kind_index(kind)];
        auto opt = [](const std::optional<double>& v) {
          return v ? format_double(*v) : std::string("NA");
        };
        out << to_string(row.field) << ',' << to_string(kind) << ','
            << (std::isfinite(cell.overall) ? format_double(cell.overall)
                                            : std::string("NA"))
            << ',' << opt(cell.reddit) << ',' << opt(cell.instagram) << '\n';
      }
    }
    return;
  }
  for (const auto& row : table.fields) {
    out << to_string(row.field) << ":\n";
    for (LearnerKind kind : kAllLearnerKinds) {
      out << "  " << to_string(kind) << ": "
          << cell_text(row.by_kind[kind_index(kind)]) << '\n';
    }
  }
}

void write_selection_report(std::ostream& out,
                            const std::vector<SelectionEntry>& report) {
  for (const auto& entry : report) {
    out << to_string(entry.field) << " -> " << to_string(entry.chosen);
    if (entry.flagged) out << " [flagged: " << entry.note << "]";
    out << '\n';
  }
}

}  // namespace botdetect
