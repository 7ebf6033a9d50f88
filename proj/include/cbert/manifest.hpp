#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cbert {

// Written beside every artifact-producing command's outputs so a run can be
// reproduced from its recorded configuration.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;  // effective settings, stringified
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace cbert
