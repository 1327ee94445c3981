#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace railcause::io {

/// Throws DataError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace railcause::io
