#pragma once

#include "law/drift.hpp"

#include <filesystem>

namespace law::corpus {

/// Writes the profile as one JSON object to <dir>/<author_id>.json
/// (author_id sanitized for the filesystem) and returns the path. The write
/// is atomic: temp file in the same directory, then rename.
std::filesystem::path store_profile(const drift::AuthorProfile& profile,
                                    const std::filesystem::path& dir);

/// Reloads a profile written by store_profile. Numeric fields round-trip
/// exactly. Throws SchemaVersionMismatch on unknown schema_version.
drift::AuthorProfile load_profile(const std::filesystem::path& path);

/// Filesystem-safe name used by store_profile: characters outside
/// [A-Za-z0-9._-] become '_'.
std::string profile_file_name(std::string_view author_id);

} // namespace law::corpus
