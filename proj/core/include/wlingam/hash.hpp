#pragma once

#include <string>
#include <string_view>

namespace wlingam {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's bytes; throws Error(Io) when unreadable.
std::string sha256_file(const std::string& path);

}  // namespace wlingam
