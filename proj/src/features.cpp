#include "botdetect/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "botdetect/errors.hpp"
#include "botdetect/unicode.hpp"

namespace botdetect {

std::vector<std::string> TfidfModel::tokens_by_index() const {
  std::vector<std::string> tokens(vocab.size());
  for (const auto& [token, index] : vocab) tokens[index] = token;
  return tokens;
}

std::vector<std::string> tokenize(const std::string& text,
                                  std::size_t min_token_len) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;  // in code points
  auto flush = [&] {
    if (current_len >= min_token_len) tokens.push_back(current);
    current.clear();
    current_len = 0;
  };
  for (char32_t cp : utf8_decode(text)) {
    if (is_letter(cp) || is_digit(cp)) {
      current += utf8_encode(to_lower(cp));
      ++current_len;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TfidfModel fit_tfidf(const std::vector<std::string>& corpus,
                     const TfidfConfig& config) {
  if (corpus.empty()) raise(ErrorCode::EmptyCorpus, "tfidf corpus is empty");

  std::unordered_map<std::string, std::size_t> doc_freq;
  std::unordered_map<std::string, std::size_t> term_freq;
  for (const auto& doc : corpus) {
    std::unordered_set<std::string> seen;
    for (auto& token : tokenize(doc, config.min_token_len)) {
      ++term_freq[token];
      seen.insert(std::move(token));
    }
    for (const auto& token : seen) ++doc_freq[token];
  }

  std::vector<std::pair<std::string, std::size_t>> candidates;
  candidates.reserve(doc_freq.size());
  for (const auto& [token, df] : doc_freq) {
    if (df >= config.min_doc_freq) candidates.emplace_back(token, term_freq[token]);
  }
  if (candidates.empty()) {
    raise(ErrorCode::EmptyVocabulary, "no token survived tokenization and min_doc_freq");
  }
  // Cap by descending corpus frequency, ties by lexicographic token order.
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (candidates.size() > config.max_vocab) candidates.resize(config.max_vocab);

  // Contiguous indices in lexicographic token order.
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  TfidfModel model;
  model.config = config;
  const double n_docs = static_cast<double>(corpus.size());
  model.idf.resize(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& token = candidates[i].first;
    model.vocab.emplace(token, i);
    model.idf[i] =
        std::log((1.0 + n_docs) / (1.0 + static_cast<double>(doc_freq[token]))) + 1.0;
  }
  return model;
}

Eigen::SparseVector<double> tfidf_transform(const std::string& text,
                                            const TfidfModel& model) {
  std::unordered_map<std::size_t, double> counts;
  for (const auto& token : tokenize(text, model.config.min_token_len)) {
    auto it = model.vocab.find(token);
    if (it != model.vocab.end()) counts[it->second] += 1.0;
  }
  Eigen::SparseVector<double> vec(static_cast<Eigen::Index>(model.size()));
  if (counts.empty()) return vec;
  vec.reserve(static_cast<Eigen::Index>(counts.size()));
  std::vector<std::pair<std::size_t, double>> ordered(counts.begin(), counts.end());
  std::sort(ordered.begin(), ordered.end());
  double sq = 0.0;
  for (const auto& [col, count] : ordered) {
    const double w = count * model.idf[col];
    sq += w * w;
  }
  const double norm = std::sqrt(sq);
  for (const auto& [col, count] : ordered) {
    vec.insertBack(static_cast<Eigen::Index>(col)) = count * model.idf[col] / norm;
  }
  return vec;
}

Eigen::VectorXd tfidf_transform_dense(const std::string& text,
                                      const TfidfModel& model) {
  return Eigen::VectorXd(tfidf_transform(text, model));
}

namespace {

struct CharCounts {
  double entropy = 0;
  int upper = 0, lower = 0, digit = 0, punct = 0, emoji = 0, hashtag = 0, words = 0;
};

CharCounts scan_name(const std::string& name, const NameCharTable& table) {
  CharCounts c;
  bool in_word = false;
  for (char32_t cp : utf8_decode(name)) {
    const double p = table.prob(cp);
    c.entropy -= p * std::log2(p);
    if (cp == U'#') ++c.hashtag;
    switch (classify_char(cp)) {
      case CharClass::Uppercase: ++c.upper; break;
      case CharClass::Lowercase: ++c.lower; break;
      case CharClass::Digit: ++c.digit; break;
      case CharClass::Emoji: ++c.emoji; break;
      case CharClass::Punctuation: ++c.punct; break;
      case CharClass::Whitespace:
      case CharClass::OtherLetter: break;
    }
    if (is_whitespace(cp)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++c.words;
    }
  }
  return c;
}

}  // namespace

FeatureVector username_features(const std::string& name, const NameCharTable& table) {
  const CharCounts c = scan_name(name, table);
  FeatureVector fv;
  fv.schema_id = schema_id_for(FieldKind::username, 0);
  fv.values.resize(7);
  fv.values << c.entropy, c.upper, c.lower, c.digit, c.punct, c.emoji, c.hashtag;
  return fv;
}

FeatureVector screenname_features(const std::string& name, const NameCharTable& table) {
  const CharCounts c = scan_name(name, table);
  FeatureVector fv;
  fv.schema_id = schema_id_for(FieldKind::screenname, 0);
  fv.values.resize(8);
  fv.values << c.entropy, c.upper, c.lower, c.digit, c.punct, c.emoji, c.hashtag,
      c.words;
  return fv;
}

FeatureVector metadata_features(const MetadataFields& m) {
  auto count = [](const std::optional<long long>& v) {
    return v ? static_cast<double>(*v) : -1.0;
  };
  auto flag = [](const std::optional<bool>& v) { return v && *v ? 1.0 : 0.0; };
  FeatureVector fv;
  fv.schema_id = schema_id_for(FieldKind::user_metadata, 0);
  fv.values.resize(7);
  fv.values << count(m.followers), count(m.following), count(m.listed),
      count(m.posts_count), count(m.likes_count), flag(m.protected_account),
      flag(m.verified);
  return fv;
}

std::string recent_posts_text(const std::vector<PostRecord>& posts) {
  // Most recent = tail of the list (posts accumulate in stream order).
  const std::size_t n = posts.size();
  const std::size_t start = n > kRecentPostsCap ? n - kRecentPostsCap : 0;
  std::string joined;
  for (std::size_t i = start; i < n; ++i) {
    if (i > start) joined += ' ';
    joined += posts[i].text;
  }
  return joined;
}

FeatureVector posts_features(const std::vector<PostRecord>& posts,
                             const TfidfModel& model) {
  const std::size_t n = posts.size();
  const std::size_t start = n > kRecentPostsCap ? n - kRecentPostsCap : 0;
  const std::string joined = recent_posts_text(posts);

  double sums[4] = {0, 0, 0, 0};
  std::int64_t counts[4] = {0, 0, 0, 0};
  auto tally = [&](int slot, const std::optional<long long>& v) {
    if (v) {
      sums[slot] += static_cast<double>(*v);
      ++counts[slot];
    }
  };
  for (std::size_t i = start; i < n; ++i) {
    tally(0, posts[i].likes);
    tally(1, posts[i].retweets);
    tally(2, posts[i].replies);
    tally(3, posts[i].quotes);
  }

  const Eigen::Index vocab_size = static_cast<Eigen::Index>(model.size());
  FeatureVector fv;
  fv.schema_id = schema_id_for(FieldKind::posts, model.size());
  fv.values = Eigen::VectorXd::Zero(vocab_size + 4);
  if (!joined.empty()) {
    fv.values.head(vocab_size) = tfidf_transform_dense(joined, model);
  }
  for (int slot = 0; slot < 4; ++slot) {
    fv.values[vocab_size + slot] =
        counts[slot] > 0 ? sums[slot] / static_cast<double>(counts[slot]) : -1.0;
  }
  return fv;
}

std::string schema_id_for(FieldKind field, std::size_t vocab_size) {
  switch (field) {
    case FieldKind::username: return "username.v1";
    case FieldKind::screenname: return "screenname.v1";
    case FieldKind::description:
      return "description.tfidf.v1/" + std::to_string(vocab_size);
    case FieldKind::user_metadata: return "user_metadata.v1";
    case FieldKind::posts: return "posts.tfidf.v1/" + std::to_string(vocab_size);
  }
  return "unknown";
}

std::vector<std::string> feature_names_for(FieldKind field, const TfidfModel* model) {
  static const std::vector<std::string> name_feats = {
      "entropy", "n_upper", "n_lower", "n_digit", "n_punct", "n_emoji", "n_hashtag"};
  switch (field) {
    case FieldKind::username: return name_feats;
    case FieldKind::screenname: {
      auto names = name_feats;
      names.push_back("n_words");
      return names;
    }
    case FieldKind::user_metadata:
      return {"followers", "following", "listed", "posts_count", "likes_count",
              "protected", "verified"};
    case FieldKind::description:
      return model ? model->tokens_by_index() : std::vector<std::string>{};
    case FieldKind::posts: {
      auto names = model ? model->tokens_by_index() : std::vector<std::string>{};
      names.insert(names.end(), {"mean_likes", "mean_retweets", "mean_replies",
                                 "mean_quotes"});
      return names;
    }
  }
  return {};
}

}  // namespace botdetect
