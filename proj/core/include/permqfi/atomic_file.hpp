#pragma once

#include <filesystem>
#include <string_view>

namespace permqfi {

/// Unique temporary name next to `path` (per process and thread), for
/// write-then-rename.
std::filesystem::path temp_sibling(const std::filesystem::path& path);

/// Writes `content` to a temporary sibling and renames it over `path`, so a
/// reader sees either the old file or the complete new one. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace permqfi
