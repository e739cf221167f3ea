#include "botdetect/modelstore.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "botdetect/errors.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

namespace {

constexpr const char* kMagic = "botdetect-model";

std::string subsample_text(FeatureSubsample s) {
  return s == FeatureSubsample::sqrt_features ? "sqrt" : "all";
}

FeatureSubsample subsample_from(const std::string& s, const std::string& path) {
  if (s == "sqrt") return FeatureSubsample::sqrt_features;
  if (s == "all") return FeatureSubsample::all_features;
  raise(ErrorCode::CorruptModel, path + ": bad feature_subsample '" + s + "'");
}

std::string opt_text(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

void write_params(std::ostream& out, const LearnerParams& p) {
  out << "params " << p.max_depth << ' ' << p.n_estimators << ' '
      << p.min_samples_leaf << ' ' << format_double(p.learning_rate) << ' '
      << subsample_text(p.feature_subsample) << ' ' << (p.bootstrap ? 1 : 0)
      << ' ' << p.seed << '\n';
}

void write_learner(std::ostream& out, const FittedLearner& learner) {
  out << "kind " << to_string(learner.kind) << '\n';
  out << "feature_count " << learner.feature_count << '\n';
  write_params(out, learner.params);
  out << "f0 " << format_double(learner.initial_log_odds) << '\n';
  out << "prior " << format_double(learner.prior_bot) << '\n';
  out << "stage_weights " << learner.stage_weights.size();
  for (double w : learner.stage_weights) out << ' ' << format_double(w);
  out << '\n';
  out << "trees " << learner.trees.size() << '\n';
  for (std::size_t t = 0; t < learner.trees.size(); ++t) {
    const auto& tree = learner.trees[t];
    out << "tree " << t << ' ' << tree.nodes.size() << '\n';
    for (const auto& n : tree.nodes) {
      out << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left
          << ' ' << n.right << ' ' << format_double(n.n_bot) << ' '
          << format_double(n.n_human) << ' ' << format_double(n.value) << ' '
          << format_double(n.weight) << ' ' << format_double(n.impurity)
          << '\n';
    }
  }
}

void write_tfidf(std::ostream& out, const std::string& name, const TfidfModel& m) {
  out << "tfidf " << name << '\n';
  out << "config " << m.config.max_vocab << ' ' << m.config.min_doc_freq << ' '
      << m.config.min_token_len << '\n';
  out << "vocab " << m.vocab.size() << '\n';
  const auto tokens = m.tokens_by_index();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << tokens[i] << ' ' << i << ' ' << format_double(m.idf[i]) << '\n';
  }
}

// -------- reading --------

class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string context;

  std::string line() {
    std::string text;
    if (!std::getline(in_, text)) {
      raise(ErrorCode::CorruptModel, context + ": unexpected end of file");
    }
    ++line_no_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    return text;
  }

  std::vector<std::string> tokens(const std::string& expect_key,
                                  std::size_t expect_count) {
    const std::string text = line();
    std::istringstream ss(text);
    std::vector<std::string> parts;
    std::string tok;
    while (ss >> tok) parts.push_back(tok);
    if (parts.empty() || parts[0] != expect_key) {
      raise(ErrorCode::CorruptModel,
            context + ": expected '" + expect_key + "' at line " +
                std::to_string(line_no_));
    }
    if (expect_count != 0 && parts.size() != expect_count + 1) {
      raise(ErrorCode::CorruptModel,
            context + ": '" + expect_key + "' expects " +
                std::to_string(expect_count) + " values at line " +
                std::to_string(line_no_));
    }
    parts.erase(parts.begin());
    return parts;
  }

  double real(const std::string& text) {
    try {
      return parse_double(text);
    } catch (const Error&) {
      raise(ErrorCode::CorruptModel, context + ": bad real '" + text + "'");
    }
  }

  std::int64_t integer(const std::string& text) {
    try {
      return parse_int(text);
    } catch (const Error&) {
      raise(ErrorCode::CorruptModel, context + ": bad integer '" + text + "'");
    }
  }

  std::uint64_t unsigned_integer(const std::string& text) {
    try {
      return parse_uint(text);
    } catch (const Error&) {
      raise(ErrorCode::CorruptModel, context + ": bad integer '" + text + "'");
    }
  }

  std::optional<double> opt_real(const std::string& text) {
    if (text == "NA") return std::nullopt;
    return real(text);
  }

private:
  std::istream& in_;
  int line_no_ = 0;
};

FittedLearner read_learner(Reader& r) {
  FittedLearner learner;
  {
    const auto v = r.tokens("kind", 1);
    const auto kind = learner_from_string(v[0]);
    if (!kind) raise(ErrorCode::CorruptModel, r.context + ": unknown kind " + v[0]);
    learner.kind = *kind;
  }
  learner.feature_count = static_cast<int>(r.integer(r.tokens("feature_count", 1)[0]));
  if (learner.feature_count < 0) {
    raise(ErrorCode::CorruptModel, r.context + ": negative feature_count");
  }
  {
    const auto v = r.tokens("params", 7);
    learner.params.max_depth = static_cast<int>(r.integer(v[0]));
    learner.params.n_estimators = static_cast<int>(r.integer(v[1]));
    learner.params.min_samples_leaf = static_cast<int>(r.integer(v[2]));
    learner.params.learning_rate = r.real(v[3]);
    learner.params.feature_subsample = subsample_from(v[4], r.context);
    learner.params.bootstrap = r.integer(v[5]) != 0;
    learner.params.seed = r.unsigned_integer(v[6]);
  }
  learner.initial_log_odds = r.real(r.tokens("f0", 1)[0]);
  learner.prior_bot = r.real(r.tokens("prior", 1)[0]);
  if (!(learner.prior_bot >= 0.0 && learner.prior_bot <= 1.0)) {
    raise(ErrorCode::CorruptModel, r.context + ": prior outside [0,1]");
  }
  {
    const auto v = r.tokens("stage_weights", 0);
    if (v.empty()) raise(ErrorCode::CorruptModel, r.context + ": bad stage_weights");
    const auto count = r.integer(v[0]);
    if (static_cast<std::int64_t>(v.size()) != count + 1) {
      raise(ErrorCode::CorruptModel, r.context + ": stage_weights count mismatch");
    }
    for (std::int64_t i = 0; i < count; ++i) {
      learner.stage_weights.push_back(r.real(v[static_cast<std::size_t>(i) + 1]));
    }
  }
  const auto n_trees = r.integer(r.tokens("trees", 1)[0]);
  for (std::int64_t t = 0; t < n_trees; ++t) {
    const auto head = r.tokens("tree", 2);
    if (r.integer(head[0]) != t) {
      raise(ErrorCode::CorruptModel, r.context + ": tree index out of order");
    }
    const auto n_nodes = r.integer(head[1]);
    if (n_nodes <= 0) {
      raise(ErrorCode::CorruptModel, r.context + ": tree with no nodes");
    }
    Tree tree;
    for (std::int64_t i = 0; i < n_nodes; ++i) {
      const std::string node_path =
          r.context + ".trees[" + std::to_string(t) + "].nodes[" + std::to_string(i) + "]";
      const std::string text = r.line();
      std::istringstream ss(text);
      std::vector<std::string> parts;
      std::string tok;
      while (ss >> tok) parts.push_back(tok);
      if (parts.size() != 9) {
        raise(ErrorCode::CorruptModel, node_path + ": expected 9 node fields");
      }
      TreeNode n;
      n.feature = static_cast<int>(r.integer(parts[0]));
      n.threshold = r.real(parts[1]);
      n.left = static_cast<int>(r.integer(parts[2]));
      n.right = static_cast<int>(r.integer(parts[3]));
      n.n_bot = r.real(parts[4]);
      n.n_human = r.real(parts[5]);
      n.value = r.real(parts[6]);
      n.weight = r.real(parts[7]);
      n.impurity = r.real(parts[8]);
      // Structural invariants: preorder children, sane leaf payloads.
      if (!n.is_leaf()) {
        if (n.feature >= learner.feature_count) {
          raise(ErrorCode::CorruptModel, node_path + ": feature index out of range");
        }
        if (n.left <= i || n.right <= i || n.left >= n_nodes || n.right >= n_nodes) {
          raise(ErrorCode::CorruptModel, node_path + ": child index out of range");
        }
        if (!std::isfinite(n.threshold)) {
          raise(ErrorCode::CorruptModel, node_path + ": non-finite threshold");
        }
      } else if (n.left != -1 || n.right != -1) {
        raise(ErrorCode::CorruptModel, node_path + ": leaf with children");
      }
      if (n.n_bot < 0 || n.n_human < 0 || !std::isfinite(n.value) ||
          !std::isfinite(n.weight) || !std::isfinite(n.impurity)) {
        raise(ErrorCode::CorruptModel, node_path + ": bad node payload");
      }
      tree.nodes.push_back(n);
    }
    learner.trees.push_back(std::move(tree));
  }
  if (learner.kind == LearnerKind::ada_boost &&
      learner.stage_weights.size() != learner.trees.size()) {
    raise(ErrorCode::CorruptModel, r.context + ": stage weight per tree required");
  }
  return learner;
}

TfidfModel read_tfidf(Reader& r, const std::string& name) {
  {
    const auto v = r.tokens("tfidf", 1);
    if (v[0] != name) {
      raise(ErrorCode::CorruptModel, "expected tfidf section '" + name + "'");
    }
  }
  r.context = "tfidf." + name;
  TfidfModel m;
  {
    const auto v = r.tokens("config", 3);
    m.config.max_vocab = static_cast<std::size_t>(r.integer(v[0]));
    m.config.min_doc_freq = static_cast<std::size_t>(r.integer(v[1]));
    m.config.min_token_len = static_cast<std::size_t>(r.integer(v[2]));
  }
  const auto vocab_size = r.integer(r.tokens("vocab", 1)[0]);
  m.idf.resize(static_cast<std::size_t>(vocab_size));
  std::vector<bool> seen(static_cast<std::size_t>(vocab_size), false);
  for (std::int64_t i = 0; i < vocab_size; ++i) {
    const std::string text = r.line();
    std::istringstream ss(text);
    std::string token, index_text, idf_text;
    if (!(ss >> token >> index_text >> idf_text)) {
      raise(ErrorCode::CorruptModel, r.context + ": bad vocab entry '" + text + "'");
    }
    const auto index = r.integer(index_text);
    if (index < 0 || index >= vocab_size || seen[static_cast<std::size_t>(index)]) {
      raise(ErrorCode::CorruptModel,
            r.context + ".vocab[" + token + "]: index not contiguous");
    }
    const double idf = r.real(idf_text);
    if (!(idf >= 1.0 - 1e-12) || !std::isfinite(idf)) {
      raise(ErrorCode::CorruptModel, r.context + ".vocab[" + token + "]: idf < 1");
    }
    seen[static_cast<std::size_t>(index)] = true;
    m.vocab.emplace(token, static_cast<std::size_t>(index));
    m.idf[static_cast<std::size_t>(index)] = idf;
  }
  return m;
}

}  // namespace

std::string serialize_model(const EnsembleModel& model) {
  std::ostringstream out;
  out << kMagic << " v" << model.format_version << '\n';
  out << "created_at " << model.created_at << '\n';
  out << "training_seed " << model.training_seed << '\n';

  out << "selection " << model.selection_report.size() << '\n';
  for (const auto& entry : model.selection_report) {
    out << "field " << to_string(entry.field) << " chosen "
        << to_string(entry.chosen) << " flagged " << (entry.flagged ? 1 : 0)
        << '\n';
    for (LearnerKind kind : kAllLearnerKinds) {
      const auto& cell = entry.cells[static_cast<int>(kind)];
      out << "cell " << to_string(kind) << ' '
          << (std::isfinite(cell.overall) ? format_double(cell.overall)
                                          : std::string("NA"))
          << ' ' << opt_text(cell.reddit) << ' ' << opt_text(cell.instagram)
          << '\n';
    }
    out << "note " << entry.note << '\n';
  }

  out << "chartable " << model.char_table.probs.size() << ' '
      << model.char_table.total_chars << ' ' << model.char_table.version << '\n';
  for (const auto& [cp, p] : model.char_table.probs) {
    out << static_cast<std::int64_t>(cp) << ' ' << format_double(p) << '\n';
  }

  write_tfidf(out, "description", model.desc_tfidf);
  write_tfidf(out, "posts", model.posts_tfidf);

  out << "classifiers " << model.classifiers.size() << '\n';
  for (const auto& fc : model.classifiers) {
    out << "classifier " << to_string(fc.field) << '\n';
    out << "schema " << (fc.schema_id.empty() ? "-" : fc.schema_id) << '\n';
    out << "chosen " << to_string(fc.kind) << '\n';
    out << "fallback " << (fc.constant_fallback ? 1 : 0) << ' '
        << format_double(fc.fallback_p_bot) << '\n';
    out << "classifier_feature_count " << fc.feature_count << '\n';
    out << "members " << fc.members.size() << '\n';
    for (std::size_t i = 0; i < fc.members.size(); ++i) {
      out << "member " << i << '\n';
      out << "platt " << format_double(fc.members[i].platt.a) << ' '
          << format_double(fc.members[i].platt.b) << '\n';
      write_learner(out, fc.members[i].learner);
    }
  }
  out << "end\n";
  return out.str();
}

std::int64_t save_model(const EnsembleModel& model, std::ostream& sink) {
  const std::string bytes = serialize_model(model);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!sink) raise(ErrorCode::IoError, "model sink write failed");
  return static_cast<std::int64_t>(bytes.size());
}

std::int64_t save_model(const EnsembleModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  const auto n = save_model(model, out);
  out.flush();
  if (!out) raise(ErrorCode::IoError, "write failure on '" + path + "'");
  return n;
}

EnsembleModel load_model(std::istream& source) {
  Reader r(source);
  r.context = "header";

  {
    const std::string first = r.line();
    std::istringstream ss(first);
    std::string magic, version;
    ss >> magic >> version;
    if (magic != kMagic) {
      raise(ErrorCode::CorruptModel, "not a model file (bad magic)");
    }
    if (version != std::string("v") + kModelFormatVersion) {
      raise(ErrorCode::VersionMismatch,
            "model format " + version + " unsupported (expected v" +
                kModelFormatVersion + ")");
    }
  }

  EnsembleModel model;
  model.created_at = r.tokens("created_at", 1)[0];
  model.training_seed = r.unsigned_integer(r.tokens("training_seed", 1)[0]);

  const auto n_selection = r.integer(r.tokens("selection", 1)[0]);
  for (std::int64_t s = 0; s < n_selection; ++s) {
    r.context = "selection[" + std::to_string(s) + "]";
    SelectionEntry entry;
    const auto head = r.tokens("field", 5);
    const auto field = field_from_string(head[0]);
    if (!field || head[1] != "chosen" || head[3] != "flagged") {
      raise(ErrorCode::CorruptModel, r.context + ": bad field line");
    }
    entry.field = *field;
    const auto chosen = learner_from_string(head[2]);
    if (!chosen) raise(ErrorCode::CorruptModel, r.context + ": bad chosen kind");
    entry.chosen = *chosen;
    entry.flagged = r.integer(head[4]) != 0;
    for (LearnerKind kind : kAllLearnerKinds) {
      const auto v = r.tokens("cell", 4);
      if (v[0] != to_string(kind)) {
        raise(ErrorCode::CorruptModel, r.context + ": cells out of order");
      }
      auto& cell = entry.cells[static_cast<int>(kind)];
      if (v[1] == "NA") {
        cell.overall = std::numeric_limits<double>::quiet_NaN();
      } else {
        cell.overall = r.real(v[1]);
      }
      cell.reddit = r.opt_real(v[2]);
      cell.instagram = r.opt_real(v[3]);
    }
    const std::string note_line = r.line();
    if (note_line.rfind("note ", 0) != 0) {
      raise(ErrorCode::CorruptModel, r.context + ": missing note");
    }
    entry.note = note_line.substr(5);
    model.selection_report.push_back(std::move(entry));
  }

  r.context = "chartable";
  {
    const auto v = r.tokens("chartable", 3);
    const auto entries = r.integer(v[0]);
    model.char_table.total_chars = r.integer(v[1]);
    model.char_table.version = v[2];
    if (model.char_table.total_chars <= 0 || entries <= 0) {
      raise(ErrorCode::CorruptModel, "chartable: empty table");
    }
    double prob_sum = 0;
    for (std::int64_t i = 0; i < entries; ++i) {
      const std::string text = r.line();
      std::istringstream ss(text);
      std::string cp_text, p_text;
      if (!(ss >> cp_text >> p_text)) {
        raise(ErrorCode::CorruptModel, "chartable: bad entry '" + text + "'");
      }
      const auto cp = r.integer(cp_text);
      const double p = r.real(p_text);
      if (cp < 0 || cp > 0x10FFFF || !(p > 0.0) || p > 1.0) {
        raise(ErrorCode::CorruptModel, "chartable: bad entry '" + text + "'");
      }
      model.char_table.probs[static_cast<char32_t>(cp)] = p;
      prob_sum += p;
    }
    if (std::abs(prob_sum - 1.0) > 1e-9) {
      raise(ErrorCode::CorruptModel, "chartable: probabilities do not sum to 1");
    }
  }

  model.desc_tfidf = read_tfidf(r, "description");
  model.posts_tfidf = read_tfidf(r, "posts");

  r.context = "classifiers";
  const auto n_classifiers = r.integer(r.tokens("classifiers", 1)[0]);
  if (n_classifiers != kFieldCount) {
    raise(ErrorCode::CorruptModel, "classifiers: expected one per field kind");
  }
  for (int c = 0; c < kFieldCount; ++c) {
    r.context = "classifiers[" + std::to_string(c) + "]";
    const auto head = r.tokens("classifier", 1);
    const auto field = field_from_string(head[0]);
    if (!field || static_cast<int>(*field) != c) {
      raise(ErrorCode::CorruptModel, r.context + ": fields out of order");
    }
    FieldClassifier fc;
    fc.field = *field;
    r.context = "classifiers." + to_string(fc.field);
    fc.schema_id = r.tokens("schema", 1)[0];
    if (fc.schema_id == "-") fc.schema_id.clear();
    {
      const auto kind = learner_from_string(r.tokens("chosen", 1)[0]);
      if (!kind) raise(ErrorCode::CorruptModel, r.context + ": bad chosen kind");
      fc.kind = *kind;
    }
    {
      const auto v = r.tokens("fallback", 2);
      fc.constant_fallback = r.integer(v[0]) != 0;
      fc.fallback_p_bot = r.real(v[1]);
      if (!(fc.fallback_p_bot >= 0.0 && fc.fallback_p_bot <= 1.0)) {
        raise(ErrorCode::CorruptModel, r.context + ": fallback prior outside [0,1]");
      }
    }
    fc.feature_count =
        static_cast<int>(r.integer(r.tokens("classifier_feature_count", 1)[0]));
    const auto n_members = r.integer(r.tokens("members", 1)[0]);
    if (!fc.constant_fallback && n_members < 1) {
      raise(ErrorCode::CorruptModel, r.context + ": classifier with no members");
    }
    for (std::int64_t mi = 0; mi < n_members; ++mi) {
      r.context = "classifiers." + to_string(fc.field) + ".members[" +
                  std::to_string(mi) + "]";
      const auto v = r.tokens("member", 1);
      if (r.integer(v[0]) != mi) {
        raise(ErrorCode::CorruptModel, r.context + ": member index out of order");
      }
      CalibratedMember member;
      const auto platt = r.tokens("platt", 2);
      member.platt.a = r.real(platt[0]);
      member.platt.b = r.real(platt[1]);
      if (!std::isfinite(member.platt.a) || !std::isfinite(member.platt.b)) {
        raise(ErrorCode::CorruptModel, r.context + ": non-finite calibration");
      }
      member.learner = read_learner(r);
      if (member.learner.feature_count != fc.feature_count) {
        raise(ErrorCode::CorruptModel,
              r.context + ": member feature_count differs from classifier");
      }
      fc.members.push_back(std::move(member));
    }
    model.classifiers[c] = std::move(fc);
  }

  r.context = "trailer";
  if (r.line() != "end") {
    raise(ErrorCode::CorruptModel, "missing end marker");
  }
  return model;
}

EnsembleModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace botdetect
