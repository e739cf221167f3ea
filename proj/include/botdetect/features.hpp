#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "botdetect/chartable.hpp"
#include "botdetect/types.hpp"

namespace botdetect {

/// Fixed-order numeric representation of one field group.
struct FeatureVector {
  Eigen::VectorXd values;
  std::string schema_id;
};

struct TfidfConfig {
  std::size_t max_vocab = 5000;
  std::size_t min_doc_freq = 2;
  std::size_t min_token_len = 2;

  bool operator==(const TfidfConfig&) const = default;
};

/// Fitted TF-IDF vocabulary: contiguous column indices, smoothed idf
/// weights (always >= 1), and the tokenizer configuration.
struct TfidfModel {
  std::map<std::string, std::size_t> vocab;
  std::vector<double> idf;
  TfidfConfig config;

  std::size_t size() const { return idf.size(); }
  /// Column index -> token, for importance reports.
  std::vector<std::string> tokens_by_index() const;
};

/// Lowercased maximal runs of letters/digits of length >= min_token_len.
std::vector<std::string> tokenize(const std::string& text, std::size_t min_token_len);

/// idf(t) = ln((1+N)/(1+df(t))) + 1; vocabulary capped by descending corpus
/// frequency (ties lexicographic). Raises EmptyCorpus / EmptyVocabulary.
TfidfModel fit_tfidf(const std::vector<std::string>& corpus, const TfidfConfig& config);

/// count(t) * idf(t), then L2-normalized; texts with no vocabulary token
/// transform to the zero vector.
Eigen::SparseVector<double> tfidf_transform(const std::string& text, const TfidfModel& model);
Eigen::VectorXd tfidf_transform_dense(const std::string& text, const TfidfModel& model);

// Per-field featurizers. Callers guarantee the field group is present;
// absent groups never reach these functions.

/// [entropy, n_upper, n_lower, n_digit, n_punct, n_emoji, n_hashtag]
FeatureVector username_features(const std::string& name, const NameCharTable& table);

/// username features plus n_words (whitespace-delimited non-empty tokens).
FeatureVector screenname_features(const std::string& name, const NameCharTable& table);

/// [followers, following, listed, posts_count, likes_count, protected, verified];
/// missing numeric sub-field -> -1 sentinel, missing boolean -> 0.
FeatureVector metadata_features(const MetadataFields& m);

/// TF-IDF of the (up to) 200 most recent posts' texts joined by single
/// spaces, then mean likes/retweets/replies/quotes over the same posts
/// (absent counts excluded; no present counts -> -1 sentinel).
FeatureVector posts_features(const std::vector<PostRecord>& posts, const TfidfModel& model);

inline constexpr std::size_t kRecentPostsCap = 200;

/// The capped, space-joined post text a user contributes to the posts
/// TF-IDF corpus; identical to what posts_features transforms.
std::string recent_posts_text(const std::vector<PostRecord>& posts);

std::string schema_id_for(FieldKind field, std::size_t vocab_size);
std::vector<std::string> feature_names_for(FieldKind field, const TfidfModel* model);

}  // namespace botdetect
