#pragma once

#include "classmap/diagnostics.hpp"
#include "classmap/dissimilarity.hpp"
#include "classmap/farness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace classmap {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

/// Schema file: an object mapping column name to {"kind", "levels"?, "weight"?}.
/// Column order follows the file; weight defaults to 1.
FeatureSchema schema_from_json(const Json& doc);
Json to_json(const FeatureSchema& schema);
FeatureSchema read_schema(const std::filesystem::path& path);

Json to_json(const FarnessModel& model);
/// Throws ValidationError for malformed documents or a format_version other than 1.
FarnessModel farness_model_from_json(const Json& doc);
FarnessModel read_farness_model(const std::filesystem::path& path);

Json to_json(const SilhouettePlotData& data);
Json to_json(const QuasiResidualData& data);
Json to_json(const ClassMapData& data);

/// Two-space indented text with a trailing newline.
std::string dump(const Json& doc);

} // namespace classmap
