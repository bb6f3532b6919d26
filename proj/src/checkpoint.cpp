#include "dnazen/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace dnazen::nn {

namespace {

constexpr char kMagic[4] = {'D', 'Z', 'C', 'K'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("truncated checkpoint while reading " + what);
  return value;
}

}  // namespace

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, e] : entries)
    if (n == name) return &e;
  return nullptr;
}

void save_checkpoint(const std::filesystem::path& path, const std::string& manifest_json,
                     std::span<const std::pair<std::string, Tensor>> tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, 4);
  put<uint32_t>(out, kVersion);
  put<uint64_t>(out, manifest_json.size());
  out.write(manifest_json.data(), static_cast<std::streamsize>(manifest_json.size()));
  put<uint64_t>(out, tensors.size());
  for (const auto& [name, tensor] : tensors) {
    put<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const auto& shape = tensor.shape();
    put<uint32_t>(out, static_cast<uint32_t>(shape.size()));
    for (int d : shape) put<int32_t>(out, d);
    const auto values = tensor.values();
    put<uint64_t>(out, values.size());
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
  }
  if (!out) throw ValidationError("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("not a checkpoint file (bad magic): " + path.string());
  const auto version = get<uint32_t>(in, "version");
  if (version != kVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  const auto manifest_len = get<uint64_t>(in, "manifest length");
  ck.manifest_json.resize(manifest_len);
  in.read(ck.manifest_json.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw ParseError("truncated checkpoint manifest");

  const auto count = get<uint64_t>(in, "entry count");
  ck.entries.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const auto name_len = get<uint32_t>(in, "entry name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw ParseError("truncated checkpoint entry name");
    const auto rank = get<uint32_t>(in, "entry rank");
    CheckpointEntry entry;
    int64_t numel = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      const auto dim = get<int32_t>(in, "entry dimension");
      if (dim < 0) throw ParseError("negative dimension in checkpoint entry " + name);
      entry.shape.push_back(dim);
      numel *= dim;
    }
    const auto payload = get<uint64_t>(in, "payload length");
    if (static_cast<int64_t>(payload) != numel)
      throw ParseError("payload length disagrees with shape for entry " + name);
    entry.values.resize(payload);
    in.read(reinterpret_cast<char*>(entry.values.data()),
            static_cast<std::streamsize>(payload * sizeof(float)));
    if (!in) throw ParseError("truncated checkpoint payload for entry " + name);
    ck.entries.emplace_back(std::move(name), std::move(entry));
  }
  return ck;
}

}  // namespace dnazen::nn
