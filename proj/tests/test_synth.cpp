#include "doctest.h"

#include <cmath>
#include <sstream>

#include "botdetect/errors.hpp"
#include "botdetect/ingest.hpp"
#include "botdetect/synth.hpp"

using namespace botdetect;

TEST_CASE("label balance is exact") {
  SynthConfig config;
  config.n_users = 100;
  config.bot_fraction = 0.5;
  const auto ds = generate(config);
  int bots = 0;
  for (const auto& rec : ds.records) bots += (*rec.label == BotLabel::bot);
  CHECK(bots == 50);

  config.n_users = 101;
  config.bot_fraction = 0.25;
  const auto odd = generate(config);
  bots = 0;
  for (const auto& rec : odd.records) bots += (*rec.label == BotLabel::bot);
  CHECK(bots == 25);  // round(101 * 0.25)
}

TEST_CASE("dropout 1.0 removes the field everywhere") {
  SynthConfig config;
  config.n_users = 60;
  config.dropout = {0, 0, 0, 0, 1.0};
  for (const auto& rec : generate(config).records) CHECK(!rec.posts);
}

TEST_CASE("same seed gives identical records and bytes") {
  SynthConfig config;
  config.n_users = 40;
  config.seed = 123;
  const auto a = generate(config);
  const auto b = generate(config);
  CHECK(a.records == b.records);

  std::ostringstream wa, wb;
  write_records_ndjson(wa, a.records);
  write_records_ndjson(wb, b.records);
  CHECK(wa.str() == wb.str());
  CHECK(!wa.str().empty());
}

TEST_CASE("per-field presence tracks the dropout rate within 3 sigma") {
  SynthConfig config;
  config.n_users = 1500;
  config.seed = 9;
  config.platform_mix = {{PlatformKind::twitter_v2, 1.0}};  // no platform masks
  config.dropout = {0.3, 0.3, 0.3, 0.3, 0.3};
  const auto ds = generate(config);
  const double n = static_cast<double>(ds.records.size());
  const double sigma = std::sqrt(0.7 * 0.3 / n);
  for (FieldKind f : kAllFields) {
    double present = 0;
    for (const auto& rec : ds.records) present += rec.has_field(f);
    CHECK(std::abs(present / n - 0.7) <= 3 * sigma);
  }
}

TEST_CASE("platform realism masks") {
  SynthConfig config;
  config.n_users = 300;
  config.seed = 17;
  for (const auto& rec : generate(config).records) {
    if (rec.platform == PlatformKind::reddit_pushshift) {
      CHECK(!rec.screenname);
      CHECK(!rec.description);
    }
    if (rec.platform == PlatformKind::instagram_crowdtangle) {
      CHECK(!rec.posts);
    }
  }
}

TEST_CASE("invalid configs are rejected") {
  SynthConfig bad;
  bad.bot_fraction = 1.5;
  CHECK_THROWS_AS(generate(bad), Error);
  SynthConfig negative;
  negative.n_users = -1;
  CHECK_THROWS_AS(generate(negative), Error);
  SynthConfig mix;
  mix.platform_mix = {{PlatformKind::twitter_v2, 0.0}};
  CHECK_THROWS_AS(generate(mix), Error);
}

TEST_CASE("ndjson output round-trips through ingest with the shipped mapping") {
  SynthConfig config;
  config.n_users = 50;
  config.seed = 21;
  config.platform_mix = {{PlatformKind::twitter_v2, 1.0}};
  const auto ds = generate(config);

  std::ostringstream out;
  write_records_ndjson(out, ds.records);
  std::istringstream in(out.str());
  const auto parsed = parse_records(in, PlatformKind::custom, synth_mapping());
  CHECK(parsed.errors.empty());
  REQUIRE(parsed.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& original = ds.records[i];
    auto roundtrip = parsed.records[i];
    roundtrip.platform = original.platform;  // the tag is per-file, not per-line
    CHECK(roundtrip == original);
  }
}
