#include "cbert/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "cbert/types.hpp"
#include "cbert/version.hpp"

namespace cbert {

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version.empty() ? kToolVersion : manifest.tool_version;
  j["wall_clock_seconds"] = manifest.wall_clock_seconds;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot open " + path.string() + " for writing");
  out << j.dump(1) << "\n";
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw CorpusError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config").get<std::map<std::string, std::string>>();
  m.inputs = j.at("inputs").get<std::vector<std::string>>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  return m;
}

}  // namespace cbert
