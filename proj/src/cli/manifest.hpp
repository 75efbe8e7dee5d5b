#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gbias::cli {

std::string sha256_file(const std::filesystem::path& path);

struct InputDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::optional<std::uint64_t> seed;
  std::chrono::system_clock::time_point started;
  std::chrono::system_clock::time_point finished;
  std::vector<InputDigest> inputs;
  std::string tool_version;

  void add_input(const std::filesystem::path& path);
  void write(const std::filesystem::path& dir) const;
};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace gbias::cli
