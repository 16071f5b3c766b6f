#pragma once

#include <filesystem>
#include <string>

namespace vlsm::app {

/// Lowercase hex SHA-256 of a file's bytes. Throws InputError if unreadable.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_text(const std::string& text);

}  // namespace vlsm::app
