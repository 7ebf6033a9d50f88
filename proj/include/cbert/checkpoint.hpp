#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cbert/model.hpp"

namespace cbert {

struct Provenance {
  std::vector<std::string> dataset_ids;
  std::uint64_t seed = 0;
  int epochs = 0;
  std::string source_checkpoint;  // empty when trained from scratch
  std::string tool_version;
};

struct Checkpoint {
  Model model;
  Provenance provenance;
};

// JSON file holding the encoder config, head kind, vocabulary, provenance and
// every parameter tensor (row-major). Doubles survive the round trip
// bit-exactly, so a reloaded model reproduces Eval outputs bit-for-bit.
void save_checkpoint(const Model& model, const Provenance& provenance,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Copies only the encoder tensors (and vocabulary) of a saved checkpoint into
// `model`; configs must match. Lets an externally produced encoder seed a run.
void import_encoder_params(Model& model, const std::filesystem::path& path);

}  // namespace cbert
