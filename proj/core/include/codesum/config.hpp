#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "codesum/abstracter.hpp"
#include "codesum/extractor.hpp"
#include "codesum/segmenter.hpp"

namespace codesum {

enum class Preset {
  kDesk,   // E = H = 64, small enough for a laptop core
  kFull,  // E = H = 512, batch 32, lr 3e-4, dropout 0.1
};

Preset parse_preset(std::string_view name);  // "desk" | "full"

// Everything a pipeline run needs. Keys in a config file map onto these
// fields; shared hyperparameters (embed_dim, lr, ...) apply to both models
// unless given with an "extractor." or "abstracter." prefix.
struct RunConfig {
  ExtractorConfig extractor;
  AbstracterConfig abstracter;
  std::string corpus;
  std::string valid_corpus;
  Language language = Language::kJava;
  std::uint64_t seed = 1;

  // Copies `seed` into both model configs, then validates them.
  void finalize();
};

RunConfig preset_config(Preset preset);

// Flat "key = value" lines; '#' starts a comment. Throws ConfigError on
// unknown keys or malformed values.
RunConfig parse_config(std::string_view text, RunConfig base);
RunConfig load_config(const std::filesystem::path& path, RunConfig base);

// Applies an EACS_SEED-style override if `value` is set.
void apply_seed_override(RunConfig& config, const char* value);

}  // namespace codesum
