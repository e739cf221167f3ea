#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "botdetect/ensemble.hpp"

namespace botdetect {

/// Canonical single-file encoding: text header (version, seed, selection
/// report) followed by the char table, vocabularies and per-field
/// classifiers, with reals as shortest round-trippable binary64 text and
/// trees in preorder with explicit child indices. Saving the same model
/// twice produces byte-identical output.
std::string serialize_model(const EnsembleModel& model);

std::int64_t save_model(const EnsembleModel& model, std::ostream& sink);
std::int64_t save_model(const EnsembleModel& model, const std::string& path);

/// Validates every structural invariant before returning; raises
/// VersionMismatch on an unknown format version and CorruptModel (with the
/// offending element's path) on anything malformed.
EnsembleModel load_model(std::istream& source);
EnsembleModel load_model(const std::string& path);

}  // namespace botdetect
