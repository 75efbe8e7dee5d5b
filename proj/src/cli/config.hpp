#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace gbias::cli {

/// Flat `key = value` file. `#` starts a comment; blank lines are ignored.
/// Throws DataError with the line number on malformed or repeated keys.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

}  // namespace gbias::cli
