#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnazen/tensor.hpp"

namespace dnazen::nn {

// Versioned binary container: "DZCK" magic, a JSON manifest, then named
// row-major little-endian float32 tensors. Byte layout documented in
// docs/checkpoint_format.md.
struct CheckpointEntry {
  std::vector<int> shape;
  std::vector<float> values;
};

struct Checkpoint {
  std::string manifest_json;
  std::vector<std::pair<std::string, CheckpointEntry>> entries;  // file order

  const CheckpointEntry* find(const std::string& name) const;
};

void save_checkpoint(const std::filesystem::path& path, const std::string& manifest_json,
                     std::span<const std::pair<std::string, Tensor>> tensors);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dnazen::nn
