#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "botdetect/ensemble.hpp"
#include "botdetect/errors.hpp"
#include "botdetect/evaluation.hpp"
#include "botdetect/synth.hpp"
#include "helpers.hpp"

using namespace botdetect;
using botdetect::testing::full_record;

namespace {

Labels labels_of(int bots, int humans) {
  Labels y(static_cast<std::size_t>(bots), 1);
  y.insert(y.end(), static_cast<std::size_t>(humans), 0);
  return y;
}

// Plain confusion-matrix arithmetic, written from scratch for the oracle.
struct OracleMetrics {
  double accuracy, micro, macro;
};
OracleMetrics metrics_oracle(const Labels& pred, const Labels& truth) {
  double correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += pred[i] == truth[i];
  const double accuracy = 100.0 * correct / static_cast<double>(truth.size());

  double f1_sum = 0;
  double tp_pool = 0, fp_pool = 0, fn_pool = 0;
  for (int cls = 0; cls < 2; ++cls) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == cls && truth[i] == cls) tp += 1;
      if (pred[i] == cls && truth[i] != cls) fp += 1;
      if (pred[i] != cls && truth[i] == cls) fn += 1;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0;
    f1_sum += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
    tp_pool += tp;
    fp_pool += fp;
    fn_pool += fn;
  }
  const double micro =
      tp_pool + 0.5 * (fp_pool + fn_pool) > 0
          ? 100.0 * tp_pool / (tp_pool + 0.5 * (fp_pool + fn_pool))
          : 0;
  return {accuracy, micro, 100.0 * f1_sum / 2.0};
}

}  // namespace

TEST_CASE("stratified split: exact per-class arithmetic") {
  const auto y = labels_of(10, 10);
  const auto split = stratified_split(y, 0.8, 1);
  CHECK(split.train.size() == 16);
  CHECK(split.test.size() == 4);
  int train_bots = 0;
  for (auto i : split.train) train_bots += y[i];
  CHECK(train_bots == 8);

  const auto small = stratified_split(labels_of(5, 5), 0.8, 1);
  CHECK(small.train.size() == 8);  // round(0.8 * 5) = 4 per class
}

TEST_CASE("stratified split: determinism and class proportions") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int bots = 5 + static_cast<int>(rng() % 40);
    const int humans = 5 + static_cast<int>(rng() % 40);
    const auto y = labels_of(bots, humans);
    const auto a = stratified_split(y, 0.8, trial);
    const auto b = stratified_split(y, 0.8, trial);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);

    int train_bots = 0;
    for (auto i : a.train) train_bots += y[i];
    CHECK(train_bots == std::lround(0.8 * bots));
    CHECK(a.train.size() + a.test.size() == y.size());
  }
}

TEST_CASE("stratified split refuses single-class data") {
  CHECK_THROWS_AS(stratified_split(labels_of(10, 0), 0.8, 1), Error);
  CHECK_NOTHROW(stratified_split_any(labels_of(10, 0), 0.8, 1));
}

TEST_CASE("stratified k-fold partitions with balanced classes") {
  const auto y = labels_of(10, 10);
  const auto folds = stratified_kfold(y, 5, 9);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> seen;
  for (const auto& fold : folds) {
    CHECK(fold.size() == 4);
    int bots = 0;
    for (auto i : fold) {
      bots += y[i];
      CHECK(seen.insert(i).second);  // disjoint
    }
    CHECK(bots == 2);
  }
  CHECK(seen.size() == y.size());  // covering
}

TEST_CASE("k-fold class balance stays within one") {
  const auto y = labels_of(13, 29);
  const auto folds = stratified_kfold(y, 5, 4);
  std::vector<int> bots_per_fold, humans_per_fold;
  for (const auto& fold : folds) {
    int bots = 0;
    for (auto i : fold) bots += y[i];
    bots_per_fold.push_back(bots);
    humans_per_fold.push_back(static_cast<int>(fold.size()) - bots);
  }
  auto spread = [](const std::vector<int>& v) {
    return *std::max_element(v.begin(), v.end()) -
           *std::min_element(v.begin(), v.end());
  };
  CHECK(spread(bots_per_fold) <= 1);
  CHECK(spread(humans_per_fold) <= 1);
}

TEST_CASE("k-fold refuses classes smaller than k") {
  CHECK_THROWS_AS(stratified_kfold(labels_of(4, 10), 5, 1), Error);
}

TEST_CASE("compute_metrics hand-checked examples") {
  const auto perfect = compute_metrics({1, 0, 1}, {1, 0, 1});
  CHECK(perfect.accuracy == 100.0);
  CHECK(perfect.macro_f1 == 100.0);

  const auto wrong = compute_metrics({1, 1, 1}, {0, 0, 0});
  CHECK(wrong.accuracy == 0.0);
  CHECK(wrong.macro_f1 == 0.0);

  // truth [b,b,h,h], preds [b,h,h,h]: acc 75, bot F1 2/3, human F1 0.8.
  const auto mixed = compute_metrics({1, 0, 0, 0}, {1, 1, 0, 0});
  CHECK(mixed.accuracy == doctest::Approx(75.0));
  CHECK(mixed.macro_f1 == doctest::Approx(73.33333333333333).epsilon(1e-9));
  CHECK(mixed.confusion.counts[1][1] == 1);
  CHECK(mixed.confusion.counts[1][0] == 1);
  CHECK(mixed.confusion.counts[0][0] == 2);
  CHECK(mixed.confusion.counts[0][1] == 0);
}

TEST_CASE("compute_metrics input validation") {
  CHECK_THROWS_AS(compute_metrics({1}, {1, 0}), Error);
  CHECK_THROWS_AS(compute_metrics({}, {}), Error);
}

TEST_CASE("compute_metrics equals the brute-force oracle on random vectors") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    Labels pred(static_cast<std::size_t>(n)), truth(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      pred[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
      truth[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
    }
    const auto ours = compute_metrics(pred, truth);
    const auto oracle = metrics_oracle(pred, truth);
    CHECK(ours.accuracy == oracle.accuracy);
    CHECK(ours.micro_f1 == oracle.micro);
    CHECK(ours.macro_f1 == oracle.macro);
    CHECK(ours.confusion.total() == n);
  }
}

namespace {

// Small trained model shared by the evaluate() tests.
EnsembleModel trained_fixture_model() {
  SynthConfig config;
  config.n_users = 120;
  config.seed = 41;
  TrainConfig train;
  train.seed = 7;
  train.calibration_folds = 2;
  train.desc_tfidf.min_doc_freq = 1;
  train.desc_tfidf.max_vocab = 60;
  train.posts_tfidf = train.desc_tfidf;
  for (auto& p : train.learner_params) {
    p.n_estimators = std::min(p.n_estimators, 10);
  }
  return train_ensemble({generate(config)}, train);
}

}  // namespace

TEST_CASE("evaluate modes agree when every record is processed") {
  const auto model = trained_fixture_model();
  SynthConfig config;
  config.n_users = 60;
  config.seed = 55;
  const auto ds = generate(config);

  const auto processed = evaluate(model, ds, EvalMode::processed_only);
  const auto overall = evaluate(model, ds, EvalMode::unprocessed_as_human);
  CHECK(processed.pct_processed == 100.0);
  CHECK(overall.pct_processed == 100.0);
  CHECK(*processed.accuracy_processed == *overall.accuracy_overall);
  CHECK(*processed.micro_f1 == *overall.micro_f1);
}

TEST_CASE("full-fields accuracy beats all-points on a degraded mix") {
  // Off the separability ceiling (overlap 0.3), complete records score
  // higher than the same set diluted with field-dropped rows, mirroring the
  // complete-data-versus-all-points pattern.
  SynthConfig train_config;
  train_config.n_users = 500;
  train_config.seed = 101;
  train_config.overlap = 0.3;
  TrainConfig cfg;
  cfg.seed = 7;
  cfg.calibration_folds = 3;
  cfg.desc_tfidf.min_doc_freq = 1;
  cfg.desc_tfidf.max_vocab = 80;
  cfg.posts_tfidf = cfg.desc_tfidf;
  for (auto& p : cfg.learner_params) p.n_estimators = std::min(p.n_estimators, 15);
  const auto model = train_ensemble({generate(train_config)}, cfg);

  SynthConfig full_config = train_config;
  full_config.seed = 19;
  full_config.n_users = 250;
  full_config.platform_mix = {{PlatformKind::twitter_v2, 1.0}};
  auto mixed = generate(full_config);
  SynthConfig holey = full_config;
  holey.seed = 1019;
  holey.dropout = {0.6, 0.6, 0.6, 0.6, 0.6};
  for (auto& rec : generate(holey).records) {
    rec.user_id += "_holey";
    mixed.records.push_back(rec);
  }

  const auto full_only = evaluate(model, mixed, EvalMode::full_fields_only);
  const auto all_points = evaluate(model, mixed, EvalMode::unprocessed_as_human);
  CHECK(full_only.pct_processed < 100.0);
  CHECK(full_only.pct_processed > 0.0);
  REQUIRE(full_only.accuracy_processed);
  CHECK(*full_only.accuracy_processed > *all_points.accuracy_overall);
  CHECK(all_points.pct_processed == 100.0);
}

TEST_CASE("heldout-only evaluation re-derives the training partition") {
  SynthConfig config;
  config.n_users = 200;
  config.seed = 77;
  const auto ds = generate(config);
  TrainConfig cfg;
  cfg.seed = 13;
  cfg.calibration_folds = 2;
  cfg.desc_tfidf.min_doc_freq = 1;
  cfg.desc_tfidf.max_vocab = 60;
  cfg.posts_tfidf = cfg.desc_tfidf;
  for (auto& p : cfg.learner_params) p.n_estimators = std::min(p.n_estimators, 8);
  const auto model = train_ensemble({ds}, cfg);

  EvalOptions heldout;
  heldout.heldout_only = true;
  const auto partial = evaluate(model, ds, EvalMode::unprocessed_as_human, heldout);
  const auto whole = evaluate(model, ds, EvalMode::unprocessed_as_human);
  // The held-out partition is the 20% test side of the recorded-seed split.
  CHECK(partial.evaluated_records ==
        std::lround(0.2 * static_cast<double>(whole.evaluated_records)));
  CHECK(partial.evaluated_records > 0);
}

TEST_CASE("full-fields mode with no complete record reports NA") {
  const auto model = trained_fixture_model();
  LabeledDataset ds;
  ds.name = "incomplete";
  for (int i = 0; i < 6; ++i) {
    auto rec = full_record("nf" + std::to_string(i), i % 2 ? BotLabel::bot : BotLabel::human);
    rec.posts.reset();  // never complete
    ds.records.push_back(rec);
  }
  const auto report = evaluate(model, ds, EvalMode::full_fields_only);
  CHECK(report.pct_processed == 0.0);
  CHECK(!report.accuracy_processed);
  CHECK(!report.accuracy_overall);
  CHECK(report.evaluated_records == 0);
}

TEST_CASE("learner comparison has the expected shape") {
  SynthConfig config;
  config.n_users = 150;
  config.seed = 77;
  TrainConfig train;
  train.seed = 5;
  train.desc_tfidf.min_doc_freq = 1;
  train.desc_tfidf.max_vocab = 40;
  train.posts_tfidf = train.desc_tfidf;
  for (auto& p : train.learner_params) p.n_estimators = std::min(p.n_estimators, 8);

  const auto table = learner_comparison({generate(config)}, train);
  int cells = 0;
  for (const auto& row : table.fields) {
    for (const auto& cell : row.by_kind) {
      ++cells;
      if (std::isfinite(cell.overall)) {
        CHECK(cell.overall >= 0.0);
        CHECK(cell.overall <= 100.0);
      }
    }
  }
  CHECK(cells == 20);  // 4 kinds x 5 fields

  // Reddit never carries screenname/description; instagram never posts.
  const auto& screen_row = table.fields[static_cast<int>(FieldKind::screenname)];
  const auto& desc_row = table.fields[static_cast<int>(FieldKind::description)];
  const auto& posts_row = table.fields[static_cast<int>(FieldKind::posts)];
  for (LearnerKind kind : kAllLearnerKinds) {
    CHECK(!screen_row.by_kind[static_cast<int>(kind)].reddit.has_value());
    CHECK(!desc_row.by_kind[static_cast<int>(kind)].reddit.has_value());
    CHECK(!posts_row.by_kind[static_cast<int>(kind)].instagram.has_value());
  }
}
