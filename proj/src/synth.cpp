#include "botdetect/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "json.hpp"

#include "botdetect/errors.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

namespace {

const std::vector<std::string>& human_words() {
  static const std::vector<std::string> words = {
      "coffee", "writer", "mom",    "dad",    "music",  "travel", "dog",
      "cat",    "runner", "teacher", "artist", "gamer",  "foodie", "reader",
      "hiker",  "sunny",  "river",   "maple",  "winter", "garden", "baker",
      "nurse",  "pilot",  "violin",  "painter"};
  return words;
}

const std::vector<std::string>& bot_words() {
  static const std::vector<std::string> words = {
      "crypto",  "follow", "free",   "click",  "link",   "giveaway", "promo",
      "win",     "deal",   "bonus",  "signal", "pump",   "airdrop",  "token",
      "cash",    "earn",   "invest", "forex",  "casino", "discount", "viral",
      "retweet", "gain",   "offer",  "trading"};
  return words;
}

const std::vector<std::string>& shared_words() {
  static const std::vector<std::string> words = {
      "love", "life", "world", "daily", "official", "news",
      "fan",  "best", "top",   "real",  "update",   "today"};
  return words;
}

class UserGen {
public:
  UserGen(std::mt19937_64& rng, bool is_bot, double overlap)
      : rng_(rng), is_bot_(is_bot), overlap_(overlap) {}

  // With probability `overlap`, draw from the other class's generator.
  bool effective_bot() {
    if (overlap_ > 0 && uniform() < overlap_) return !is_bot_;
    return is_bot_;
  }

  double uniform() { return std::uniform_real_distribution<double>(0, 1)(rng_); }

  long long poisson(double mean) {
    return std::poisson_distribution<long long>(mean)(rng_);
  }

  int range(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  const std::string& pick(const std::vector<std::string>& pool) {
    return pool[static_cast<std::size_t>(range(0, static_cast<int>(pool.size()) - 1))];
  }

  std::string random_alnum(int len) {
    static const char chars[] =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string s;
    s.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
      s += chars[range(0, 61)];
    }
    return s;
  }

  std::string capitalize(std::string word) {
    if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') {
      word[0] = static_cast<char>(word[0] - 32);
    }
    return word;
  }

  std::string username() {
    if (effective_bot()) return random_alnum(range(8, 15));
    std::string name = pick(human_words());
    if (uniform() < 0.5) name += pick(human_words());
    if (uniform() < 0.3) name += std::to_string(range(1, 99));
    return name;
  }

  std::string screenname() {
    if (effective_bot()) {
      std::string s = random_alnum(range(4, 8)) + " " + random_alnum(range(4, 10));
      if (uniform() < 0.4) s += " " + std::to_string(range(100, 99999));
      return s;
    }
    return capitalize(pick(human_words())) + " " + capitalize(pick(human_words()));
  }

  std::string text(int n_tokens) {
    const bool bot = effective_bot();
    std::string out;
    for (int i = 0; i < n_tokens; ++i) {
      if (!out.empty()) out += ' ';
      if (uniform() < 0.25) {
        out += pick(shared_words());
      } else {
        out += pick(bot ? bot_words() : human_words());
      }
    }
    return out;
  }

  MetadataFields metadata() {
    const bool bot = effective_bot();
    MetadataFields m;
    m.followers = poisson(bot ? 20 : 250);
    m.following = poisson(bot ? 900 : 180);
    m.listed = poisson(bot ? 0.2 : 3);
    m.posts_count = poisson(bot ? 4000 : 600);
    m.likes_count = poisson(bot ? 40 : 1200);
    m.protected_account = uniform() < (bot ? 0.01 : 0.06);
    m.verified = uniform() < (bot ? 0.001 : 0.03);
    return m;
  }

  PostRecord post() {
    const bool bot = effective_bot();
    PostRecord p;
    p.text = text(range(4, 10));
    if (uniform() >= 0.1) p.likes = poisson(bot ? 3 : 8);
    // Retweet volume is the strong bot signal.
    if (uniform() >= 0.1) p.retweets = poisson(bot ? 45 : 2);
    if (uniform() >= 0.1) p.replies = poisson(bot ? 1 : 4);
    if (uniform() >= 0.1) p.quotes = poisson(bot ? 0.5 : 1);
    return p;
  }

private:
  std::mt19937_64& rng_;
  bool is_bot_;
  double overlap_;
};

void check_config(const SynthConfig& c) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (c.n_users < 0) raise(ErrorCode::InvalidConfig, "n_users must be >= 0");
  if (!unit(c.bot_fraction)) raise(ErrorCode::InvalidConfig, "bot_fraction outside [0,1]");
  if (!unit(c.overlap)) raise(ErrorCode::InvalidConfig, "overlap outside [0,1]");
  for (double d : c.dropout) {
    if (!unit(d)) raise(ErrorCode::InvalidConfig, "dropout rate outside [0,1]");
  }
  double mix_total = 0;
  for (const auto& [platform, weight] : c.platform_mix) {
    if (weight < 0) raise(ErrorCode::InvalidConfig, "negative platform weight");
    mix_total += weight;
  }
  if (c.n_users > 0 && mix_total <= 0) {
    raise(ErrorCode::InvalidConfig, "platform mix has no positive weight");
  }
}

}  // namespace

LabeledDataset generate(const SynthConfig& config) {
  check_config(config);
  LabeledDataset ds;
  ds.name = config.name;
  ds.platform = PlatformKind::custom;
  ds.records.reserve(static_cast<std::size_t>(config.n_users));

  const int n_bots = static_cast<int>(
      std::lround(config.bot_fraction * static_cast<double>(config.n_users)));

  std::vector<std::pair<PlatformKind, double>> mix(config.platform_mix.begin(),
                                                   config.platform_mix.end());
  double mix_total = 0;
  for (const auto& [platform, weight] : mix) mix_total += weight;

  for (int i = 0; i < config.n_users; ++i) {
    auto rng = make_rng(config.seed, static_cast<std::uint64_t>(i));
    const bool is_bot = i < n_bots;
    UserGen gen(rng, is_bot, config.overlap);

    UserRecord rec;
    rec.user_id = "u" + std::to_string(i);
    rec.label = is_bot ? BotLabel::bot : BotLabel::human;

    double roll = gen.uniform() * mix_total;
    rec.platform = mix.back().first;
    for (const auto& [platform, weight] : mix) {
      if (roll < weight) {
        rec.platform = platform;
        break;
      }
      roll -= weight;
    }

    const bool reddit = rec.platform == PlatformKind::reddit_pushshift;
    const bool instagram = rec.platform == PlatformKind::instagram_crowdtangle;

    if (gen.uniform() >= config.dropout[0]) rec.username = gen.username();
    if (!reddit && gen.uniform() >= config.dropout[1]) {
      rec.screenname = gen.screenname();
    }
    if (!reddit && gen.uniform() >= config.dropout[2]) {
      rec.description = gen.text(gen.range(5, 12));
    }
    if (gen.uniform() >= config.dropout[3]) rec.metadata = gen.metadata();
    if (!instagram && gen.uniform() >= config.dropout[4]) {
      std::vector<PostRecord> posts;
      const int n_posts = gen.range(1, 4);
      for (int p = 0; p < n_posts; ++p) posts.push_back(gen.post());
      rec.posts = std::move(posts);
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

FieldMapping synth_mapping() {
  FieldMapping m;
  for (const auto& path : canonical_field_paths()) {
    std::string source = path;
    std::replace(source.begin(), source.end(), '.', '_');
    m.entries[path] = source;
  }
  return m;
}

void write_records_ndjson(std::ostream& out, const std::vector<UserRecord>& records) {
  using nlohmann::json;
  for (const auto& rec : records) {
    json base = json::object();
    base["user_id"] = rec.user_id;
    if (rec.username) base["username"] = *rec.username;
    if (rec.screenname) base["screenname"] = *rec.screenname;
    if (rec.description) base["description"] = *rec.description;
    if (rec.metadata) {
      const auto& m = *rec.metadata;
      if (m.followers) base["followers"] = *m.followers;
      if (m.following) base["following"] = *m.following;
      if (m.listed) base["listed"] = *m.listed;
      if (m.posts_count) base["posts_count"] = *m.posts_count;
      if (m.likes_count) base["likes_count"] = *m.likes_count;
      if (m.protected_account) base["protected"] = *m.protected_account;
      if (m.verified) base["verified"] = *m.verified;
    }
    if (rec.label) base["label"] = to_string(*rec.label);

    if (!rec.posts || rec.posts->empty()) {
      out << base.dump() << '\n';
      continue;
    }
    for (const auto& post : *rec.posts) {
      json line = base;
      line["post_text"] = post.text;
      if (post.likes) line["post_likes"] = *post.likes;
      if (post.retweets) line["post_retweets"] = *post.retweets;
      if (post.replies) line["post_replies"] = *post.replies;
      if (post.quotes) line["post_quotes"] = *post.quotes;
      out << line.dump() << '\n';
    }
  }
}

}  // namespace botdetect
