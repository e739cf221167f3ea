#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <filesystem>
#include <random>
#include <string>

#include "botdetect/types.hpp"

namespace botdetect::testing {

inline UserRecord make_record(const std::string& id) {
  UserRecord rec;
  rec.user_id = id;
  return rec;
}

inline UserRecord full_record(const std::string& id, BotLabel label) {
  UserRecord rec;
  rec.user_id = id;
  rec.platform = PlatformKind::twitter_v2;
  rec.username = "name" + id;
  rec.screenname = "Screen " + id;
  rec.description = "short description text " + id;
  MetadataFields m;
  m.followers = 10;
  m.following = 20;
  m.listed = 1;
  m.posts_count = 30;
  m.likes_count = 40;
  m.protected_account = false;
  m.verified = true;
  rec.metadata = m;
  rec.posts = std::vector<PostRecord>{{"hello world post", 2, 3, 1, 0}};
  rec.label = label;
  return rec;
}

/// Self-cleaning scratch directory for file-based tests.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("botdetect_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

}  // namespace botdetect::testing
