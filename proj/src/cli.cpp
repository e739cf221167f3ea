#include "botdetect/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "botdetect/chartable.hpp"
#include "botdetect/ensemble.hpp"
#include "botdetect/errors.hpp"
#include "botdetect/evaluation.hpp"
#include "botdetect/importance.hpp"
#include "botdetect/ingest.hpp"
#include "botdetect/modelstore.hpp"
#include "botdetect/synth.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string now_utc() {
  // SOURCE_DATE_EPOCH pins the stamp for reproducible runs.
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

int default_workers() {
  if (const char* env = std::getenv("BOTDETECT_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const auto hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string format = "text";
};

struct LoadedConfig {
  TrainConfig train;
  std::vector<std::string> manifest_paths;
  json raw = json::object();
  std::uint64_t digest = 0;
};

void apply_tfidf(const json& j, TfidfConfig& cfg) {
  if (j.contains("max_vocab")) cfg.max_vocab = j.at("max_vocab").get<std::size_t>();
  if (j.contains("min_df")) cfg.min_doc_freq = j.at("min_df").get<std::size_t>();
  if (j.contains("min_token_len")) {
    cfg.min_token_len = j.at("min_token_len").get<std::size_t>();
  }
}

void apply_learner(const json& j, LearnerParams& p) {
  if (j.contains("max_depth")) p.max_depth = j.at("max_depth").get<int>();
  if (j.contains("n_estimators")) p.n_estimators = j.at("n_estimators").get<int>();
  if (j.contains("min_samples_leaf")) {
    p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  }
  if (j.contains("learning_rate")) p.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("feature_subsample")) {
    const auto s = j.at("feature_subsample").get<std::string>();
    if (s == "sqrt") {
      p.feature_subsample = FeatureSubsample::sqrt_features;
    } else if (s == "all") {
      p.feature_subsample = FeatureSubsample::all_features;
    } else {
      raise(ErrorCode::InvalidConfig, "feature_subsample must be 'all' or 'sqrt'");
    }
  }
  if (j.contains("bootstrap")) p.bootstrap = j.at("bootstrap").get<bool>();
}

void apply_config_json(LoadedConfig& cfg, const std::string& config_path);

LoadedConfig load_config(const CommonOptions& common) {
  LoadedConfig cfg;
  cfg.train.created_at = now_utc();
  cfg.train.workers = default_workers();

  if (!common.config_path.empty()) {
    std::ifstream in(common.config_path);
    if (!in) raise(ErrorCode::IoError, "cannot open config '" + common.config_path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    cfg.digest = fnv1a(text);
    try {
      cfg.raw = json::parse(text);
    } catch (const json::exception& e) {
      raise(ErrorCode::ParseError,
            "config '" + common.config_path + "': " + e.what());
    }
    try {
      apply_config_json(cfg, common.config_path);
    } catch (const json::exception& e) {
      raise(ErrorCode::InvalidConfig,
            "config '" + common.config_path + "': " + e.what());
    }
  }
  if (common.seed) cfg.train.seed = *common.seed;
  if (common.workers) cfg.train.workers = *common.workers;
  return cfg;
}

void apply_config_json(LoadedConfig& cfg, const std::string& config_path) {
  {
    const auto base = std::filesystem::path(config_path).parent_path();
    if (cfg.raw.contains("seed")) cfg.train.seed = cfg.raw.at("seed").get<std::uint64_t>();
    if (cfg.raw.contains("workers")) cfg.train.workers = cfg.raw.at("workers").get<int>();
    if (cfg.raw.contains("folds")) {
      cfg.train.calibration_folds = cfg.raw.at("folds").get<int>();
    }
    if (cfg.raw.contains("train_ratio")) {
      cfg.train.train_ratio = cfg.raw.at("train_ratio").get<double>();
    }
    if (cfg.raw.contains("created_at")) {
      cfg.train.created_at = cfg.raw.at("created_at").get<std::string>();
    }
    if (cfg.raw.contains("tfidf")) {
      apply_tfidf(cfg.raw.at("tfidf"), cfg.train.desc_tfidf);
      apply_tfidf(cfg.raw.at("tfidf"), cfg.train.posts_tfidf);
    }
    if (cfg.raw.contains("posts_tfidf")) {
      apply_tfidf(cfg.raw.at("posts_tfidf"), cfg.train.posts_tfidf);
    }
    if (cfg.raw.contains("learners")) {
      for (LearnerKind kind : kAllLearnerKinds) {
        const auto key = to_string(kind);
        if (cfg.raw.at("learners").contains(key)) {
          apply_learner(cfg.raw.at("learners").at(key),
                        cfg.train.learner_params[static_cast<int>(kind)]);
        }
      }
    }
    if (cfg.raw.contains("chartable")) {
      cfg.train.char_table = load_char_table(
          (base / cfg.raw.at("chartable").get<std::string>()).string());
    }
    if (cfg.raw.contains("datasets")) {
      for (const auto& entry : cfg.raw.at("datasets")) {
        cfg.manifest_paths.push_back((base / entry.get<std::string>()).string());
      }
    }
  }
}

std::vector<LabeledDataset> load_datasets(const LoadedConfig& cfg) {
  if (cfg.manifest_paths.empty()) {
    raise(ErrorCode::InvalidConfig, "config lists no datasets");
  }
  std::vector<LabeledDataset> datasets;
  datasets.reserve(cfg.manifest_paths.size());
  for (const auto& path : cfg.manifest_paths) {
    datasets.push_back(load_dataset(path));
  }
  return datasets;
}

struct RunTimer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

void log_run(const std::string& command, const LoadedConfig& cfg,
             const RunTimer& timer) {
  std::cerr << "run command=" << command << " seed=" << cfg.train.seed
            << " config_digest=" << std::hex << cfg.digest << std::dec
            << " elapsed_ms=" << format_double(timer.elapsed_ms()) << '\n';
}

std::ostream& open_sink(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  return file;
}

std::optional<FieldMapping> mapping_option(const std::string& mapping_path) {
  if (mapping_path.empty()) return std::nullopt;
  return load_mapping(mapping_path);
}

PlatformKind parse_platform(const std::string& text) {
  const auto p = platform_from_string(text);
  if (!p) raise(ErrorCode::InvalidConfig, "unknown platform '" + text + "'");
  return *p;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"multi-platform social bot detection toolkit"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--config", common.config_path, "JSON config file");
  app.add_option("--seed", common.seed, "override the config seed");
  app.add_option("--workers", common.workers, "worker thread count");
  app.add_option("--format", common.format, "report format: text or delimited")
      ->check(CLI::IsMember({"text", "delimited"}));

  // build-chartable
  auto* cmd_chartable = app.add_subcommand(
      "build-chartable", "build a character probability table from a name corpus");
  std::string ct_input, ct_output, ct_platform = "custom", ct_mapping;
  bool ct_from_records = false;
  cmd_chartable->add_option("--input", ct_input, "input file")->required();
  cmd_chartable->add_option("--out", ct_output, "output table path")->required();
  cmd_chartable->add_flag("--from-records", ct_from_records,
                          "input is a record stream; names are extracted");
  cmd_chartable->add_option("--platform", ct_platform, "platform of the record stream");
  cmd_chartable->add_option("--mapping", ct_mapping, "custom field mapping");

  // synth
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
  std::string synth_out;
  int synth_n = 1000;
  double synth_bots = 0.5, synth_overlap = 0.0, synth_dropout = 0.0;
  cmd_synth->add_option("--out", synth_out, "output prefix")->required();
  cmd_synth->add_option("--n", synth_n, "number of users");
  cmd_synth->add_option("--bot-fraction", synth_bots, "fraction of bots");
  cmd_synth->add_option("--overlap", synth_overlap,
                        "0 = separable classes, 1 = indistinguishable");
  cmd_synth->add_option("--dropout", synth_dropout, "per-field dropout rate");

  // train
  auto* cmd_train = app.add_subcommand("train", "train the ensemble from config datasets");
  std::string train_out;
  cmd_train->add_option("--out", train_out, "model output path")->required();

  // compare-learners
  auto* cmd_compare =
      app.add_subcommand("compare-learners", "per-field accuracy of all four families");
  std::string compare_out;
  cmd_compare->add_option("--out", compare_out, "report path (default stdout)");

  // predict
  auto* cmd_predict = app.add_subcommand("predict", "classify users from a record stream");
  std::string pr_model, pr_input, pr_out, pr_platform = "custom", pr_mapping;
  cmd_predict->add_option("--model", pr_model, "model file")->required();
  cmd_predict->add_option("--input", pr_input, "record stream")->required();
  cmd_predict->add_option("--out", pr_out, "prediction rows (default stdout)");
  cmd_predict->add_option("--platform", pr_platform, "platform kind");
  cmd_predict->add_option("--mapping", pr_mapping, "custom field mapping");

  // evaluate
  auto* cmd_eval = app.add_subcommand("evaluate", "score the model on config datasets");
  std::string ev_model, ev_mode = "overall", ev_out;
  bool ev_heldout = false;
  cmd_eval->add_option("--model", ev_model, "model file")->required();
  cmd_eval->add_option("--mode", ev_mode, "processed | overall | full-fields");
  cmd_eval->add_option("--out", ev_out, "report path (default stdout)");
  cmd_eval->add_flag("--heldout-only", ev_heldout,
                     "score only the re-derived held-out split");

  // importance
  auto* cmd_imp = app.add_subcommand("importance", "feature importances of one classifier");
  std::string imp_model, imp_field = "username", imp_out;
  std::size_t imp_top = 20;
  cmd_imp->add_option("--model", imp_model, "model file")->required();
  cmd_imp->add_option("--field", imp_field, "field kind");
  cmd_imp->add_option("--top", imp_top, "top-k rows (description words)");
  cmd_imp->add_option("--out", imp_out, "report path (default stdout)");

  // inspect-model
  auto* cmd_inspect = app.add_subcommand("inspect-model", "print model header and selection");
  std::string ins_model;
  cmd_inspect->add_option("--model", ins_model, "model file")->required();

  std::vector<std::string> argv = args;
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return kExitOk;
    }
    std::cerr << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  }

  RunTimer timer;
  const bool delimited = common.format == "delimited";
  try {
    LoadedConfig cfg = load_config(common);

    if (cmd_chartable->parsed()) {
      std::vector<std::string> names;
      if (ct_from_records) {
        const auto parsed = parse_records_file(ct_input, parse_platform(ct_platform),
                                               mapping_option(ct_mapping));
        for (const auto& rec : parsed.records) {
          if (rec.username) names.push_back(*rec.username);
          if (rec.screenname) names.push_back(*rec.screenname);
        }
      } else {
        std::ifstream in(ct_input);
        if (!in) raise(ErrorCode::IoError, "cannot open '" + ct_input + "'");
        std::string line;
        while (std::getline(in, line)) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (!line.empty()) names.push_back(line);
        }
      }
      const auto table = build_char_table(names);
      save_char_table(table, ct_output);
      std::cerr << "chartable entries=" << table.probs.size()
                << " total_chars=" << table.total_chars << '\n';
      log_run("build-chartable", cfg, timer);
      return kExitOk;
    }

    if (cmd_synth->parsed()) {
      SynthConfig sc;
      sc.n_users = synth_n;
      sc.bot_fraction = synth_bots;
      sc.overlap = synth_overlap;
      sc.dropout = {synth_dropout, synth_dropout, synth_dropout, synth_dropout,
                    synth_dropout};
      sc.seed = cfg.train.seed;
      sc.name = std::filesystem::path(synth_out).filename().string();
      const auto ds = generate(sc);

      // One file per platform in the mix, each with its own manifest; the
      // shipped mapping travels alongside.
      const std::string mapping_path = synth_out + ".mapping.json";
      save_mapping(synth_mapping(), mapping_path);
      json manifest_list = json::array();
      for (PlatformKind platform :
           {PlatformKind::twitter_v1, PlatformKind::twitter_v2,
            PlatformKind::reddit_pushshift, PlatformKind::instagram_crowdtangle,
            PlatformKind::custom}) {
        std::vector<UserRecord> subset;
        for (const auto& rec : ds.records) {
          if (rec.platform == platform) subset.push_back(rec);
        }
        if (subset.empty()) continue;
        const std::string tag = to_string(platform);
        const std::string data_path = synth_out + "." + tag + ".ndjson";
        std::ofstream out(data_path, std::ios::binary);
        if (!out) raise(ErrorCode::IoError, "cannot open '" + data_path + "'");
        write_records_ndjson(out, subset);

        const std::string manifest_path = synth_out + "." + tag + ".manifest.json";
        json manifest = json::object();
        manifest["name"] = sc.name + "-" + tag;
        manifest["path"] = std::filesystem::path(data_path).filename().string();
        manifest["platform"] = tag;
        manifest["mapping"] = std::filesystem::path(mapping_path).filename().string();
        std::ofstream mout(manifest_path, std::ios::binary);
        if (!mout) raise(ErrorCode::IoError, "cannot open '" + manifest_path + "'");
        mout << manifest.dump(2) << '\n';
        manifest_list.push_back(std::filesystem::path(manifest_path).filename().string());
        std::cerr << "synth wrote " << data_path << " users=" << subset.size() << '\n';
      }
      log_run("synth", cfg, timer);
      std::cout << manifest_list.dump() << '\n';
      return kExitOk;
    }

    if (cmd_train->parsed()) {
      const auto datasets = load_datasets(cfg);
      const auto model = train_ensemble(datasets, cfg.train);
      const auto bytes = save_model(model, train_out);
      write_selection_report(std::cerr, model.selection_report);
      std::cerr << "model bytes=" << bytes << " path=" << train_out << '\n';
      log_run("train", cfg, timer);
      return kExitOk;
    }

    if (cmd_compare->parsed()) {
      const auto datasets = load_datasets(cfg);
      const auto table = learner_comparison(datasets, cfg.train);
      std::ofstream file;
      write_comparison_table(open_sink(file, compare_out), table, delimited);
      log_run("compare-learners", cfg, timer);
      return kExitOk;
    }

    if (cmd_predict->parsed()) {
      const auto model = load_model(pr_model);
      const auto parsed = parse_records_file(pr_input, parse_platform(pr_platform),
                                             mapping_option(pr_mapping));
      for (const auto& err : parsed.errors) {
        std::cerr << "line " << err.line << ": " << err.message << '\n';
      }
      const auto preds = predict_batch(model, parsed.records, cfg.train.workers);
      std::ofstream file;
      write_prediction_rows(open_sink(file, pr_out), preds);
      log_run("predict", cfg, timer);
      return kExitOk;
    }

    if (cmd_eval->parsed()) {
      const auto mode = eval_mode_from_string(ev_mode);
      if (!mode) raise(ErrorCode::InvalidConfig, "unknown mode '" + ev_mode + "'");
      const auto model = load_model(ev_model);
      const auto datasets = load_datasets(cfg);
      EvalOptions options;
      options.heldout_only = ev_heldout;
      options.train_ratio = cfg.train.train_ratio;
      options.workers = cfg.train.workers;
      std::vector<EvalReport> reports;
      reports.reserve(datasets.size());
      for (const auto& ds : datasets) {
        reports.push_back(evaluate(model, ds, *mode, options));
      }
      std::ofstream file;
      write_eval_reports(open_sink(file, ev_out), reports, delimited);
      log_run("evaluate", cfg, timer);
      return kExitOk;
    }

    if (cmd_imp->parsed()) {
      const auto field = field_from_string(imp_field);
      if (!field) raise(ErrorCode::InvalidConfig, "unknown field '" + imp_field + "'");
      const auto model = load_model(imp_model);
      const auto& fc = model.classifiers[static_cast<int>(*field)];
      ImportanceReport report;
      if (*field == FieldKind::description) {
        report = top_terms(fc, model.desc_tfidf, imp_top);
      } else {
        const TfidfModel* vocab =
            *field == FieldKind::posts ? &model.posts_tfidf : nullptr;
        report = mdi_importances(fc, feature_names_for(*field, vocab));
      }
      std::ofstream file;
      write_importance_report(open_sink(file, imp_out), report, delimited);
      log_run("importance", cfg, timer);
      return kExitOk;
    }

    if (cmd_inspect->parsed()) {
      const auto model = load_model(ins_model);
      std::cout << "format_version " << model.format_version << '\n';
      std::cout << "created_at " << model.created_at << '\n';
      std::cout << "training_seed " << model.training_seed << '\n';
      std::cout << "chartable_entries " << model.char_table.probs.size() << '\n';
      std::cout << "desc_vocab " << model.desc_tfidf.size() << '\n';
      std::cout << "posts_vocab " << model.posts_tfidf.size() << '\n';
      write_selection_report(std::cout, model.selection_report);
      log_run("inspect-model", cfg, timer);
      return kExitOk;
    }

    std::cerr << "error: usage: no subcommand\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace botdetect
