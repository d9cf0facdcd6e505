#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codesum/abstracter.hpp"
#include "codesum/extractor.hpp"
#include "codesum/tensor.hpp"

namespace codesum {

inline constexpr int kCheckpointVersion = 1;

enum class ModelKind { kExtractor, kAbstracter };

std::string_view model_kind_name(ModelKind kind);

struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

// A UTF-8 JSON header line followed by the parameters in declaration order:
// u32 name length, name bytes, u32 rank, u32 dims, then little-endian float32
// values. All integers are little-endian.
struct Checkpoint {
  int version = kCheckpointVersion;
  ModelKind kind = ModelKind::kExtractor;
  std::map<std::string, std::string> hyperparameters;
  std::optional<FusionOrder> fusion;
  Language language = Language::kGeneric;
  std::vector<std::string> vocabulary;
  std::size_t best_epoch = 0;
  std::vector<NamedArray> params;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);

// Throws VersionError or CorruptCheckpoint.
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint to_checkpoint(const TrainedExtractor& model);
Checkpoint to_checkpoint(const TrainedAbstracter& model);

// Both throw CorruptCheckpoint when the kind, names or shapes do not match
// what the recorded hyperparameters declare.
TrainedExtractor extractor_from_checkpoint(const Checkpoint& ckpt);
TrainedAbstracter abstracter_from_checkpoint(const Checkpoint& ckpt);

}  // namespace codesum
