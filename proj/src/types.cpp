#include "botdetect/types.hpp"

namespace botdetect {

std::string to_string(PlatformKind p) {
  switch (p) {
    case PlatformKind::twitter_v1: return "twitter_v1";
    case PlatformKind::twitter_v2: return "twitter_v2";
    case PlatformKind::reddit_pushshift: return "reddit_pushshift";
    case PlatformKind::instagram_crowdtangle: return "instagram_crowdtangle";
    case PlatformKind::custom: return "custom";
  }
  return "custom";
}

std::string to_string(BotLabel l) {
  return l == BotLabel::bot ? "bot" : "human";
}

std::string to_string(FieldKind f) {
  switch (f) {
    case FieldKind::username: return "username";
    case FieldKind::screenname: return "screenname";
    case FieldKind::description: return "description";
    case FieldKind::user_metadata: return "user_metadata";
    case FieldKind::posts: return "posts";
  }
  return "username";
}

std::optional<PlatformKind> platform_from_string(const std::string& s) {
  if (s == "twitter_v1") return PlatformKind::twitter_v1;
  if (s == "twitter_v2") return PlatformKind::twitter_v2;
  if (s == "reddit_pushshift") return PlatformKind::reddit_pushshift;
  if (s == "instagram_crowdtangle") return PlatformKind::instagram_crowdtangle;
  if (s == "custom") return PlatformKind::custom;
  return std::nullopt;
}

std::optional<FieldKind> field_from_string(const std::string& s) {
  if (s == "username") return FieldKind::username;
  if (s == "screenname") return FieldKind::screenname;
  if (s == "description") return FieldKind::description;
  if (s == "user_metadata" || s == "metadata") return FieldKind::user_metadata;
  if (s == "posts") return FieldKind::posts;
  return std::nullopt;
}

bool UserRecord::has_field(FieldKind f) const {
  switch (f) {
    case FieldKind::username: return username.has_value();
    case FieldKind::screenname: return screenname.has_value();
    case FieldKind::description: return description.has_value();
    case FieldKind::user_metadata: return metadata.has_value();
    case FieldKind::posts: return posts.has_value();
  }
  return false;
}

const std::vector<std::string>& canonical_field_paths() {
  static const std::vector<std::string> paths = {
      "user_id",     "username",    "screenname",   "description",
      "followers",   "following",   "listed",       "posts_count",
      "likes_count", "protected",   "verified",     "post.text",
      "post.likes",  "post.retweets", "post.replies", "post.quotes",
      "label",
  };
  return paths;
}

}  // namespace botdetect
