#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>

#include "botdetect/types.hpp"

namespace botdetect {

/// Generator knobs. `overlap` slides the per-class generators from fully
/// separated (0, the "trivial" regime) to indistinguishable (1): it is the
/// probability that any class-conditional draw uses the other class's
/// distribution instead.
struct SynthConfig {
  int n_users = 1000;
  double bot_fraction = 0.5;
  double overlap = 0.0;
  std::map<PlatformKind, double> platform_mix = {
      {PlatformKind::twitter_v2, 0.6},
      {PlatformKind::reddit_pushshift, 0.25},
      {PlatformKind::instagram_crowdtangle, 0.15}};
  // Per-field dropout rates, FieldKind order:
  // username, screenname, description, user_metadata, posts.
  std::array<double, kFieldCount> dropout = {0, 0, 0, 0, 0};
  std::uint64_t seed = 1;
  std::string name = "synth";
};

/// Deterministic per seed (each user draws from its own derived stream).
/// Bot counts are exact: round(n_users * bot_fraction). Reddit records
/// never carry screenname/description and Instagram records never carry
/// posts, mirroring what those platforms expose; config dropout applies on
/// top. Raises InvalidConfig.
LabeledDataset generate(const SynthConfig& config);

/// The canonical->source mapping for files written by write_records_ndjson.
FieldMapping synth_mapping();

/// One line per post (users without posts emit a single line); scalars
/// repeat on every line and merge back on parse.
void write_records_ndjson(std::ostream& out, const std::vector<UserRecord>& records);

}  // namespace botdetect
