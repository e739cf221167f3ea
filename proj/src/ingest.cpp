#include "botdetect/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "botdetect/errors.hpp"

namespace botdetect {

using nlohmann::json;

FieldMapping builtin_mapping(PlatformKind platform) {
  FieldMapping m;
  switch (platform) {
    case PlatformKind::twitter_v1:
      // Tweet-per-line export with the embedded user object.
      m.entries = {
          {"user_id", "user.id_str"},
          {"username", "user.name"},
          {"screenname", "user.screen_name"},
          {"description", "user.description"},
          {"followers", "user.followers_count"},
          {"following", "user.friends_count"},
          {"listed", "user.listed_count"},
          {"posts_count", "user.statuses_count"},
          {"likes_count", "user.favourites_count"},
          {"protected", "user.protected"},
          {"verified", "user.verified"},
          {"post.text", "text"},
          {"post.likes", "favorite_count"},
          {"post.retweets", "retweet_count"},
          {"post.replies", "reply_count"},
          {"post.quotes", "quote_count"},
          {"label", "label"},
      };
      return m;
    case PlatformKind::twitter_v2:
      // User-object-per-line export, optionally carrying a pinned/latest tweet.
      m.entries = {
          {"user_id", "id"},
          {"username", "name"},
          {"screenname", "username"},
          {"description", "description"},
          {"followers", "public_metrics.followers_count"},
          {"following", "public_metrics.following_count"},
          {"listed", "public_metrics.listed_count"},
          {"posts_count", "public_metrics.tweet_count"},
          {"likes_count", "public_metrics.like_count"},
          {"protected", "protected"},
          {"verified", "verified"},
          {"post.text", "tweet.text"},
          {"post.likes", "tweet.public_metrics.like_count"},
          {"post.retweets", "tweet.public_metrics.retweet_count"},
          {"post.replies", "tweet.public_metrics.reply_count"},
          {"post.quotes", "tweet.public_metrics.quote_count"},
          {"label", "label"},
      };
      return m;
    case PlatformKind::reddit_pushshift:
      // Comment/submission-per-line; Reddit exposes no screen name.
      m.entries = {
          {"user_id", "author"},
          {"username", "author"},
          {"description", "subreddit.public_description"},
          {"followers", "subreddit.subscribers"},
          {"verified", "verified"},
          {"post.text", "body"},
          {"post.likes", "score"},
          {"post.replies", "num_comments"},
          {"label", "label"},
      };
      return m;
    case PlatformKind::instagram_crowdtangle:
      // Post-per-line CrowdTangle export with the embedded account.
      m.entries = {
          {"user_id", "account.id"},
          {"username", "account.name"},
          {"screenname", "account.handle"},
          {"description", "account.pageDescription"},
          {"followers", "account.subscriberCount"},
          {"verified", "account.verified"},
          {"post.text", "message"},
          {"post.likes", "statistics.actual.likeCount"},
          {"label", "label"},
      };
      return m;
    case PlatformKind::custom:
      raise(ErrorCode::InvalidConfig,
            "platform 'custom' requires a user-supplied field mapping");
  }
  raise(ErrorCode::InvalidConfig, "unknown platform");
}

void validate_mapping(const FieldMapping& mapping) {
  if (!mapping.entries.count("user_id")) {
    raise(ErrorCode::InvalidConfig, "mapping is missing the mandatory user_id entry");
  }
  const auto& canonical = canonical_field_paths();
  for (const auto& [key, source] : mapping.entries) {
    if (std::find(canonical.begin(), canonical.end(), key) == canonical.end()) {
      raise(ErrorCode::InvalidConfig, "'" + key + "' is not a canonical field path");
    }
    if (source.empty()) {
      raise(ErrorCode::InvalidConfig, "empty source path for '" + key + "'");
    }
  }
}

FieldMapping load_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open mapping '" + path + "'");
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, "mapping '" + path + "': " + e.what());
  }
  if (!parsed.is_object()) {
    raise(ErrorCode::ParseError, "mapping '" + path + "' must be a JSON object");
  }
  FieldMapping m;
  for (const auto& [key, value] : parsed.items()) {
    if (!value.is_string()) {
      raise(ErrorCode::ParseError, "mapping value for '" + key + "' must be a string");
    }
    m.entries[key] = value.get<std::string>();
  }
  validate_mapping(m);
  return m;
}

void save_mapping(const FieldMapping& mapping, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  json j = json::object();
  for (const auto& [key, source] : mapping.entries) j[key] = source;
  out << j.dump(2) << '\n';
}

namespace {

// Exact top-level key first, then a dot-delimited object walk.
const json* resolve_path(const json& raw, const std::string& path) {
  if (raw.contains(path)) return &raw.at(path);
  const json* node = &raw;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &node->at(key);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

std::optional<std::string> coerce_string(const json& v) {
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return json(v).dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return std::nullopt;
}

std::optional<long long> coerce_count(const json& v, const std::string& field) {
  if (v.is_null()) return std::nullopt;
  long long value = 0;
  if (v.is_number_integer()) {
    value = v.get<long long>();
  } else if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<long long>::max())) {
      raise(ErrorCode::TypeCoercionFailure, field + ": count overflows");
    }
    value = static_cast<long long>(u);
  } else if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d != std::floor(d)) {
      raise(ErrorCode::TypeCoercionFailure, field + ": non-integral count");
    }
    value = static_cast<long long>(d);
  } else if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.empty()) return std::nullopt;  // empty cell = absent
    try {
      std::size_t pos = 0;
      value = std::stoll(s, &pos);
      if (pos != s.size()) {
        raise(ErrorCode::TypeCoercionFailure, field + ": '" + s + "' is not an integer");
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(ErrorCode::TypeCoercionFailure, field + ": '" + s + "' is not an integer");
    }
  } else {
    raise(ErrorCode::TypeCoercionFailure, field + ": not a count value");
  }
  if (value < 0) {
    raise(ErrorCode::TypeCoercionFailure, field + ": counts cannot be negative");
  }
  return value;
}

std::optional<bool> coerce_bool(const json& v, const std::string& field) {
  if (v.is_null()) return std::nullopt;
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto n = v.get<std::int64_t>();
    if (n == 0 || n == 1) return n == 1;
    raise(ErrorCode::TypeCoercionFailure, field + ": integer flag must be 0 or 1");
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s.empty()) return std::nullopt;
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    raise(ErrorCode::TypeCoercionFailure, field + ": '" + s + "' is not a boolean");
  }
  raise(ErrorCode::TypeCoercionFailure, field + ": not a boolean value");
}

std::optional<BotLabel> coerce_label(const json& v) {
  if (v.is_null()) return std::nullopt;
  if (v.is_boolean()) return v.get<bool>() ? BotLabel::bot : BotLabel::human;
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto n = v.get<std::int64_t>();
    if (n == 1) return BotLabel::bot;
    if (n == 0) return BotLabel::human;
    raise(ErrorCode::TypeCoercionFailure, "label: integer label must be 0 or 1");
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (s.empty()) return std::nullopt;
    if (s == "bot" || s == "1" || s == "true") return BotLabel::bot;
    if (s == "human" || s == "0" || s == "false") return BotLabel::human;
    raise(ErrorCode::TypeCoercionFailure, "label: '" + s + "' is not bot/human");
  }
  raise(ErrorCode::TypeCoercionFailure, "label: unsupported value type");
}

const json* lookup(const json& raw, const FieldMapping& mapping, const char* field) {
  auto it = mapping.entries.find(field);
  if (it == mapping.entries.end()) return nullptr;
  const json* v = resolve_path(raw, it->second);
  if (v != nullptr && v->is_null()) return nullptr;
  return v;
}

}  // namespace

UserRecord harmonize(const json& raw, const FieldMapping& mapping,
                     PlatformKind platform) {
  UserRecord rec;
  rec.platform = platform;

  {
    const json* v = lookup(raw, mapping, "user_id");
    std::optional<std::string> id = v ? coerce_string(*v) : std::nullopt;
    if (!id || id->empty()) {
      raise(ErrorCode::MissingUserId, "no user_id resolvable from record");
    }
    rec.user_id = std::move(*id);
  }

  if (const json* v = lookup(raw, mapping, "username")) rec.username = coerce_string(*v);
  if (const json* v = lookup(raw, mapping, "screenname")) rec.screenname = coerce_string(*v);
  if (const json* v = lookup(raw, mapping, "description")) rec.description = coerce_string(*v);

  MetadataFields meta;
  bool any_meta = false;
  auto take_count = [&](const char* field, std::optional<long long>& slot) {
    if (const json* v = lookup(raw, mapping, field)) {
      slot = coerce_count(*v, field);
      any_meta = any_meta || slot.has_value();
    }
  };
  take_count("followers", meta.followers);
  take_count("following", meta.following);
  take_count("listed", meta.listed);
  take_count("posts_count", meta.posts_count);
  take_count("likes_count", meta.likes_count);
  if (const json* v = lookup(raw, mapping, "protected")) {
    meta.protected_account = coerce_bool(*v, "protected");
    any_meta = any_meta || meta.protected_account.has_value();
  }
  if (const json* v = lookup(raw, mapping, "verified")) {
    meta.verified = coerce_bool(*v, "verified");
    any_meta = any_meta || meta.verified.has_value();
  }
  if (any_meta) rec.metadata = meta;

  if (const json* v = lookup(raw, mapping, "post.text")) {
    if (auto text = coerce_string(*v)) {
      PostRecord post;
      post.text = std::move(*text);
      if (const json* pv = lookup(raw, mapping, "post.likes")) {
        post.likes = coerce_count(*pv, "post.likes");
      }
      if (const json* pv = lookup(raw, mapping, "post.retweets")) {
        post.retweets = coerce_count(*pv, "post.retweets");
      }
      if (const json* pv = lookup(raw, mapping, "post.replies")) {
        post.replies = coerce_count(*pv, "post.replies");
      }
      if (const json* pv = lookup(raw, mapping, "post.quotes")) {
        post.quotes = coerce_count(*pv, "post.quotes");
      }
      rec.posts = std::vector<PostRecord>{std::move(post)};
    }
  }

  if (const json* v = lookup(raw, mapping, "label")) rec.label = coerce_label(*v);
  return rec;
}

namespace {

// RFC 4180 fields on a single line (no embedded newlines).
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && current.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

void merge_metadata(MetadataFields& into, const MetadataFields& from) {
  if (!into.followers) into.followers = from.followers;
  if (!into.following) into.following = from.following;
  if (!into.listed) into.listed = from.listed;
  if (!into.posts_count) into.posts_count = from.posts_count;
  if (!into.likes_count) into.likes_count = from.likes_count;
  if (!into.protected_account) into.protected_account = from.protected_account;
  if (!into.verified) into.verified = from.verified;
}

// First-seen scalar fields win; posts append.
void merge_record(UserRecord& into, UserRecord&& from) {
  if (!into.username) into.username = std::move(from.username);
  if (!into.screenname) into.screenname = std::move(from.screenname);
  if (!into.description) into.description = std::move(from.description);
  if (!into.label) into.label = from.label;
  if (from.metadata) {
    if (into.metadata) {
      merge_metadata(*into.metadata, *from.metadata);
    } else {
      into.metadata = std::move(from.metadata);
    }
  }
  if (from.posts) {
    if (into.posts) {
      into.posts->insert(into.posts->end(),
                         std::make_move_iterator(from.posts->begin()),
                         std::make_move_iterator(from.posts->end()));
    } else {
      into.posts = std::move(from.posts);
    }
  }
}

}  // namespace

ParseResult parse_records(std::istream& in, PlatformKind platform,
                          const std::optional<FieldMapping>& mapping) {
  if (!in) raise(ErrorCode::UnreadableStream, "input stream not readable");
  FieldMapping effective;
  if (mapping) {
    validate_mapping(*mapping);
    effective = *mapping;
  } else {
    effective = builtin_mapping(platform);
  }

  ParseResult result;
  std::unordered_map<std::string, std::size_t> index_of;

  std::string line;
  std::size_t line_no = 0;
  bool format_decided = false;
  bool csv_mode = false;
  std::vector<std::string> csv_header;

  auto add_record = [&](UserRecord&& rec) {
    auto [it, inserted] = index_of.try_emplace(rec.user_id, result.records.size());
    if (inserted) {
      result.records.push_back(std::move(rec));
    } else {
      merge_record(result.records[it->second], std::move(rec));
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (!format_decided) {
      format_decided = true;
      // CSV is accepted only on the custom-mapping path.
      csv_mode = platform == PlatformKind::custom && line[0] != '{';
      if (csv_mode) {
        csv_header = split_csv_line(line);
        continue;
      }
    }

    try {
      json raw;
      if (csv_mode) {
        const auto cells = split_csv_line(line);
        if (cells.size() != csv_header.size()) {
          raise(ErrorCode::ParseError,
                "expected " + std::to_string(csv_header.size()) + " columns, got " +
                    std::to_string(cells.size()));
        }
        raw = json::object();
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (!cells[c].empty()) raw[csv_header[c]] = cells[c];
        }
      } else {
        try {
          raw = json::parse(line);
        } catch (const json::exception& e) {
          raise(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
        }
        if (!raw.is_object()) {
          raise(ErrorCode::ParseError, "record is not a JSON object");
        }
      }
      add_record(harmonize(raw, effective, platform));
    } catch (const Error& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) raise(ErrorCode::UnreadableStream, "I/O failure while reading");
  return result;
}

ParseResult parse_records_file(const std::string& path, PlatformKind platform,
                               const std::optional<FieldMapping>& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  return parse_records(in, platform, mapping);
}

namespace {

struct ManifestSpec {
  std::string name;
  std::string source_path;
  PlatformKind platform = PlatformKind::custom;
  std::optional<FieldMapping> mapping;
};

ManifestSpec read_manifest_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open manifest '" + path + "'");
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, "manifest '" + path + "': " + e.what());
  }
  if (!parsed.is_object() || !parsed.contains("name") || !parsed.contains("path") ||
      !parsed.contains("platform")) {
    raise(ErrorCode::ParseError,
          "manifest '" + path + "' needs name, path and platform");
  }

  ManifestSpec spec;
  spec.name = parsed.at("name").get<std::string>();
  const auto platform = platform_from_string(parsed.at("platform").get<std::string>());
  if (!platform) {
    raise(ErrorCode::ParseError, "manifest '" + path + "': unknown platform");
  }
  spec.platform = *platform;

  const auto base = std::filesystem::path(path).parent_path();
  spec.source_path = (base / parsed.at("path").get<std::string>()).string();
  if (parsed.contains("mapping")) {
    spec.mapping = load_mapping((base / parsed.at("mapping").get<std::string>()).string());
  } else if (spec.platform == PlatformKind::custom) {
    raise(ErrorCode::InvalidConfig,
          "manifest '" + path + "': custom platform requires a mapping");
  }
  if (parsed.contains("label_key")) {
    if (!spec.mapping) spec.mapping = builtin_mapping(spec.platform);
    spec.mapping->entries["label"] = parsed.at("label_key").get<std::string>();
  }
  return spec;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  const auto spec = read_manifest_spec(path);
  const auto parsed = parse_records_file(spec.source_path, spec.platform, spec.mapping);

  DatasetManifest manifest;
  manifest.name = spec.name;
  manifest.source_path = spec.source_path;
  manifest.platform = spec.platform;
  manifest.record_count = static_cast<std::int64_t>(parsed.records.size());
  std::int64_t labeled = 0, bots = 0;
  for (const auto& rec : parsed.records) {
    if (rec.label) {
      ++labeled;
      bots += (*rec.label == BotLabel::bot);
    }
  }
  if (labeled > 0) {
    manifest.bot_fraction = static_cast<double>(bots) / static_cast<double>(labeled);
  }
  return manifest;
}

LabeledDataset load_dataset(const std::string& manifest_path) {
  const auto spec = read_manifest_spec(manifest_path);
  auto parsed = parse_records_file(spec.source_path, spec.platform, spec.mapping);
  LabeledDataset ds;
  ds.name = spec.name;
  ds.platform = spec.platform;
  ds.records = std::move(parsed.records);
  return ds;
}

}  // namespace botdetect
