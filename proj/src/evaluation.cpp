#include "botdetect/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "botdetect/ensemble.hpp"
#include "botdetect/errors.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

namespace {

double f1_for_class(const ConfusionMatrix& c, int cls) {
  const std::int64_t tp = c.counts[cls][cls];
  const std::int64_t fp = c.counts[1 - cls][cls];
  const std::int64_t fn = c.counts[cls][1 - cls];
  const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

Metrics compute_metrics(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) {
    raise(ErrorCode::LengthMismatch,
          std::to_string(predicted.size()) + " predictions vs " +
              std::to_string(truth.size()) + " truths");
  }
  if (predicted.empty()) raise(ErrorCode::EmptyInput, "no labels to score");

  Metrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m.confusion.counts[truth[i]][predicted[i]];
  }
  const auto total = static_cast<double>(truth.size());
  const double correct =
      static_cast<double>(m.confusion.counts[0][0] + m.confusion.counts[1][1]);
  m.accuracy = 100.0 * correct / total;

  // Pooled one-vs-rest counts, each class as positive in turn.
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (int cls = 0; cls < 2; ++cls) {
    tp += m.confusion.counts[cls][cls];
    fp += m.confusion.counts[1 - cls][cls];
    fn += m.confusion.counts[cls][1 - cls];
  }
  const double denom = static_cast<double>(tp) + 0.5 * static_cast<double>(fp + fn);
  m.micro_f1 = denom > 0 ? 100.0 * static_cast<double>(tp) / denom : 0.0;
  m.macro_f1 = 100.0 * (f1_for_class(m.confusion, 0) + f1_for_class(m.confusion, 1)) / 2.0;
  return m;
}

namespace {

SplitIndices split_impl(const Labels& y, double ratio, std::uint64_t seed) {
  SplitIndices out;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) idx.push_back(i);
    }
    if (idx.empty()) continue;
    auto rng = make_rng(seed, static_cast<std::uint64_t>(cls));
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::lround(ratio * static_cast<double>(idx.size())));
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      (pos < n_train ? out.train : out.test).push_back(idx[pos]);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace

SplitIndices stratified_split(const Labels& y, double ratio, std::uint64_t seed) {
  const auto bots = std::count(y.begin(), y.end(), 1);
  if (bots == 0 || bots == static_cast<std::ptrdiff_t>(y.size())) {
    raise(ErrorCode::SingleClassDataset, "stratified split needs both classes");
  }
  return split_impl(y, ratio, seed);
}

SplitIndices stratified_split_any(const Labels& y, double ratio, std::uint64_t seed) {
  return split_impl(y, ratio, seed);
}

std::vector<std::vector<std::size_t>> stratified_kfold(const Labels& y, int k,
                                                       std::uint64_t seed) {
  if (k < 2) raise(ErrorCode::InvalidConfig, "k must be >= 2");
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) idx.push_back(i);
    }
    if (idx.size() < static_cast<std::size_t>(k)) {
      raise(ErrorCode::TooFewPerClass,
            "class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                " samples for " + std::to_string(k) + " folds");
    }
    auto rng = make_rng(seed, static_cast<std::uint64_t>(cls) + 7);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      folds[pos % static_cast<std::size_t>(k)].push_back(idx[pos]);
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

std::string to_string(EvalMode m) {
  switch (m) {
    case EvalMode::processed_only: return "processed";
    case EvalMode::unprocessed_as_human: return "overall";
    case EvalMode::full_fields_only: return "full-fields";
  }
  return "overall";
}

std::optional<EvalMode> eval_mode_from_string(const std::string& s) {
  if (s == "processed" || s == "processed_only") return EvalMode::processed_only;
  if (s == "overall" || s == "unprocessed_as_human") return EvalMode::unprocessed_as_human;
  if (s == "full-fields" || s == "full_fields_only") return EvalMode::full_fields_only;
  return std::nullopt;
}

EvalReport evaluate(const EnsembleModel& model, const LabeledDataset& dataset,
                    EvalMode mode, const EvalOptions& options) {
  EvalReport report;
  report.dataset_name = dataset.name;
  report.mode = mode;

  // Base = labeled records (optionally only the re-derived held-out split).
  std::vector<std::size_t> base;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    if (dataset.records[i].label) {
      base.push_back(i);
    } else {
      ++report.unlabeled_skipped;
    }
  }
  if (options.heldout_only) {
    Labels y;
    y.reserve(base.size());
    for (auto i : base) {
      y.push_back(*dataset.records[i].label == BotLabel::bot ? 1 : 0);
    }
    const auto split = stratified_split_any(
        y, options.train_ratio,
        mix_seed(model.training_seed, fnv1a(dataset.name)));
    std::vector<std::size_t> heldout;
    heldout.reserve(split.test.size());
    for (auto pos : split.test) heldout.push_back(base[pos]);
    base = std::move(heldout);
  }
  if (base.empty()) raise(ErrorCode::EmptyInput, "no labeled records to evaluate");

  std::vector<UserRecord> records;
  records.reserve(base.size());
  for (auto i : base) records.push_back(dataset.records[i]);
  const auto preds = predict_batch(model, records, options.workers);

  Labels truth_all, pred_all;          // every base record, no-data as human
  Labels truth_processed, pred_processed;  // fields_used >= 1
  Labels truth_full, pred_full;        // all five groups present
  std::int64_t processed = 0, full = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int t = *records[i].label == BotLabel::bot ? 1 : 0;
    const int p = preds[i].label == BotLabel::bot ? 1 : 0;
    truth_all.push_back(t);
    pred_all.push_back(p);
    if (preds[i].fields_used >= 1) {
      ++processed;
      truth_processed.push_back(t);
      pred_processed.push_back(p);
    }
    bool all_groups = true;
    for (FieldKind f : kAllFields) all_groups = all_groups && records[i].has_field(f);
    if (all_groups) {
      ++full;
      truth_full.push_back(t);
      pred_full.push_back(p);
    }
  }
  const auto n_base = static_cast<double>(records.size());

  if (!pred_processed.empty()) {
    report.accuracy_processed = compute_metrics(pred_processed, truth_processed).accuracy;
  }
  report.accuracy_overall = compute_metrics(pred_all, truth_all).accuracy;

  switch (mode) {
    case EvalMode::processed_only: {
      report.pct_processed = 100.0 * static_cast<double>(processed) / n_base;
      if (!pred_processed.empty()) {
        const Metrics m = compute_metrics(pred_processed, truth_processed);
        report.micro_f1 = m.micro_f1;
        report.macro_f1 = m.macro_f1;
        report.confusion = m.confusion;
        report.evaluated_records = m.confusion.total();
      }
      break;
    }
    case EvalMode::unprocessed_as_human: {
      // Every record receives a prediction (no-data records answer human).
      report.pct_processed = 100.0;
      const Metrics m = compute_metrics(pred_all, truth_all);
      report.micro_f1 = m.micro_f1;
      report.macro_f1 = m.macro_f1;
      report.confusion = m.confusion;
      report.evaluated_records = m.confusion.total();
      break;
    }
    case EvalMode::full_fields_only: {
      report.pct_processed = 100.0 * static_cast<double>(full) / n_base;
      if (!pred_full.empty()) {
        const Metrics m = compute_metrics(pred_full, truth_full);
        report.accuracy_processed = m.accuracy;
        report.accuracy_overall = m.accuracy;
        report.micro_f1 = m.micro_f1;
        report.macro_f1 = m.macro_f1;
        report.confusion = m.confusion;
        report.evaluated_records = m.confusion.total();
      } else {
        report.accuracy_processed.reset();
        report.accuracy_overall.reset();
      }
      break;
    }
  }
  return report;
}

namespace {

std::string opt_pct(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

}  // namespace

namespace {

void write_header(std::ostream& out) {
  out << "dataset,mode,pct_processed,accuracy_processed,accuracy_overall,"
         "micro_f1,macro_f1,tn,fp,fn,tp,evaluated,unlabeled_skipped\n";
}

void write_row(std::ostream& out, const EvalReport& report) {
  out << report.dataset_name << ',' << to_string(report.mode) << ','
      << format_double(report.pct_processed) << ','
      << opt_pct(report.accuracy_processed) << ','
      << opt_pct(report.accuracy_overall) << ',' << opt_pct(report.micro_f1)
      << ',' << opt_pct(report.macro_f1) << ',' << report.confusion.counts[0][0]
      << ',' << report.confusion.counts[0][1] << ','
      << report.confusion.counts[1][0] << ',' << report.confusion.counts[1][1]
      << ',' << report.evaluated_records << ',' << report.unlabeled_skipped
      << '\n';
}

}  // namespace

void write_eval_report(std::ostream& out, const EvalReport& report, bool delimited) {
  if (delimited) {
    write_header(out);
    write_row(out, report);
    return;
  }
  // Mirrors the "accuracy (% processed)" summary cell.
  const auto headline = report.mode == EvalMode::unprocessed_as_human
                            ? report.accuracy_overall
                            : report.accuracy_processed;
  out << report.dataset_name << " [" << to_string(report.mode) << "]: "
      << opt_pct(headline) << " (" << format_double(report.pct_processed) << ")\n";
  out << "  accuracy_processed=" << opt_pct(report.accuracy_processed)
      << " accuracy_overall=" << opt_pct(report.accuracy_overall)
      << " micro_f1=" << opt_pct(report.micro_f1)
      << " macro_f1=" << opt_pct(report.macro_f1) << '\n';
  out << "  confusion human/human=" << report.confusion.counts[0][0]
      << " human/bot=" << report.confusion.counts[0][1]
      << " bot/human=" << report.confusion.counts[1][0]
      << " bot/bot=" << report.confusion.counts[1][1]
      << " evaluated=" << report.evaluated_records
      << " unlabeled_skipped=" << report.unlabeled_skipped << '\n';
}

void write_eval_reports(std::ostream& out, const std::vector<EvalReport>& reports,
                        bool delimited) {
  if (delimited) {
    write_header(out);
    for (const auto& report : reports) write_row(out, report);
    return;
  }
  for (const auto& report : reports) write_eval_report(out, report, false);
}

}  // namespace botdetect
