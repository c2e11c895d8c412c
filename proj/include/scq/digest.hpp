#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace scq::io {

/// Lower-case hex SHA-256 of `bytes`.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

/// Reads a whole file in binary mode; throws std::runtime_error when it cannot be opened.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace scq::io
