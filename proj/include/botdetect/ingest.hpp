#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "botdetect/types.hpp"

namespace botdetect {

/// Key paths each built-in platform mapping binds (documented in the
/// README). Raises InvalidConfig for `custom`, which requires a
/// user-supplied mapping.
FieldMapping builtin_mapping(PlatformKind platform);

/// Raises InvalidConfig when the mandatory user_id entry is missing or a
/// key is not a canonical field path.
void validate_mapping(const FieldMapping& mapping);

/// JSON object of canonical -> source key-path pairs.
FieldMapping load_mapping(const std::string& path);
void save_mapping(const FieldMapping& mapping, const std::string& path);

/// Maps one parsed source record into a canonical UserRecord. Missing
/// source keys produce absent fields (never empty values); count fields are
/// coerced to integers with failure reported.
/// Raises MissingUserId / TypeCoercionFailure.
UserRecord harmonize(const nlohmann::json& raw, const FieldMapping& mapping,
                     PlatformKind platform);

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<UserRecord> records;
  std::vector<LineError> errors;
};

/// Newline-delimited records; one UserRecord per parseable line, merged by
/// user_id (posts append, first-seen scalar fields kept). Malformed lines
/// are collected as errors, never abort the stream. CSV (with a header row)
/// is accepted only on the custom-mapping path. A supplied mapping
/// overrides the platform's built-in.
ParseResult parse_records(std::istream& in, PlatformKind platform,
                          const std::optional<FieldMapping>& mapping = std::nullopt);
ParseResult parse_records_file(const std::string& path, PlatformKind platform,
                               const std::optional<FieldMapping>& mapping = std::nullopt);

/// Manifest file: {"name", "path", "platform", optional "mapping" (path),
/// optional "label_key"}. Counts are computed from an actual parse of the
/// referenced dataset, never trusted from the file.
DatasetManifest load_manifest(const std::string& path);

/// Same source, returning the parsed records for training/evaluation.
LabeledDataset load_dataset(const std::string& manifest_path);

}  // namespace botdetect
