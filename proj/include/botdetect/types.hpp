#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace botdetect {

enum class PlatformKind {
  twitter_v1,
  twitter_v2,
  reddit_pushshift,
  instagram_crowdtangle,
  custom,
};

enum class BotLabel { bot, human };

/// The five per-user data sections, each owning a dedicated classifier.
enum class FieldKind {
  username,
  screenname,
  description,
  user_metadata,
  posts,
};

inline constexpr int kFieldCount = 5;
inline constexpr FieldKind kAllFields[kFieldCount] = {
    FieldKind::username, FieldKind::screenname, FieldKind::description,
    FieldKind::user_metadata, FieldKind::posts};

std::string to_string(PlatformKind p);
std::string to_string(BotLabel l);
std::string to_string(FieldKind f);
std::optional<PlatformKind> platform_from_string(const std::string& s);
std::optional<FieldKind> field_from_string(const std::string& s);

struct MetadataFields {
  std::optional<long long> followers;
  std::optional<long long> following;
  std::optional<long long> listed;
  std::optional<long long> posts_count;
  std::optional<long long> likes_count;
  std::optional<bool> protected_account;
  std::optional<bool> verified;

  bool operator==(const MetadataFields&) const = default;
};

struct PostRecord {
  std::string text;
  std::optional<long long> likes;
  std::optional<long long> retweets;
  std::optional<long long> replies;
  std::optional<long long> quotes;

  bool operator==(const PostRecord&) const = default;
};

/// Canonical harmonized user. A field group is either present (possibly
/// an empty string / empty list) or absent; the two are distinguished and
/// absent groups yield null classifier outputs downstream.
struct UserRecord {
  std::string user_id;
  PlatformKind platform = PlatformKind::custom;
  std::optional<std::string> username;
  std::optional<std::string> screenname;
  std::optional<std::string> description;
  std::optional<MetadataFields> metadata;
  std::optional<std::vector<PostRecord>> posts;
  std::optional<BotLabel> label;

  bool has_field(FieldKind f) const;
  bool operator==(const UserRecord&) const = default;
};

/// Canonical field path -> source key path (dot-delimited). The user_id
/// entry is mandatory; unmapped canonical fields are treated as absent.
struct FieldMapping {
  std::map<std::string, std::string> entries;

  bool operator==(const FieldMapping&) const = default;
};

/// The canonical field paths a mapping may bind, in documentation order.
const std::vector<std::string>& canonical_field_paths();

struct DatasetManifest {
  std::string name;
  std::string source_path;
  PlatformKind platform = PlatformKind::custom;
  std::int64_t record_count = 0;
  std::optional<double> bot_fraction;
};

/// A parsed, labeled dataset as consumed by training and evaluation.
struct LabeledDataset {
  std::string name;
  PlatformKind platform = PlatformKind::custom;
  std::vector<UserRecord> records;
};

}  // namespace botdetect
