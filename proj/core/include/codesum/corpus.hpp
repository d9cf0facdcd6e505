#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace codesum {

using TokenSequence = std::vector<std::string>;

struct RawPair {
  std::string code;
  std::string comment;
  std::size_t id = 0;
};

struct CorpusLoad {
  std::vector<RawPair> pairs;
  std::size_t skipped = 0;  // lines whose code or comment was empty after preprocessing
};

// Reads a JSON-lines corpus. Each non-blank line must be an object with string
// fields `code` and `comment`; other fields are ignored.
// Throws IoError when the file cannot be read and FormatError on a malformed line.
CorpusLoad load_corpus(const std::filesystem::path& path);

// Splits on whitespace and punctuation, keeps punctuation as single-character
// tokens, splits identifiers at underscores and camelCase boundaries, and
// lowercases. Digits stay attached to the preceding subtoken.
TokenSequence tokenize_code(std::string_view text);

// First sentence only (through the first '.', '!' or '?'), lowercased, split
// on whitespace and punctuation. Throws EmptyComment if nothing remains.
TokenSequence tokenize_comment(std::string_view text);

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::int32_t kBos = 2;
  static constexpr std::int32_t kEos = 3;
  static constexpr std::size_t kReserved = 4;

  // Reserved tokens only.
  Vocabulary();

  // Builds from a full ordered token list whose first four entries are the
  // reserved tokens. Throws FormatError on duplicates or a bad prefix.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::int32_t index(std::string_view token) const;  // kUnk when absent
  const std::string& token(std::int32_t index) const;
  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // One token per line, index = line number.
  std::string serialize() const;
  static Vocabulary deserialize(std::string_view text);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> lookup_;
};

// Counts code and comment tokens over the corpus. Tokens with frequency >=
// min_freq are kept, most frequent first, ties broken lexicographically, and
// the table is truncated to max_size entries including the reserved ones.
Vocabulary build_vocabulary(std::span<const RawPair> pairs, std::size_t min_freq, std::size_t max_size);

// Same rule over already tokenized sequences.
Vocabulary build_vocabulary(std::span<const TokenSequence> sequences, std::size_t min_freq,
                            std::size_t max_size);

enum class SequenceSide { kCode, kComment };

struct Batch {
  std::size_t rows = 0;
  std::size_t max_len = 0;
  std::vector<std::int32_t> indices;  // rows x max_len, row-major
  std::vector<std::uint8_t> mask;     // 1 for non-PAD positions
  std::vector<std::size_t> lengths;

  std::span<const std::int32_t> row(std::size_t r) const {
    return std::span<const std::int32_t>(indices).subspan(r * max_len, lengths[r]);
  }
};

// Code side: first max_len-1 tokens then EOS. Comment side: BOS, first
// max_len-2 tokens, EOS. Remaining cells are PAD with mask 0.
Batch encode_and_pad(std::span<const TokenSequence> seqs, const Vocabulary& vocab, std::size_t max_len,
                     SequenceSide side = SequenceSide::kCode);

// Maps indices back to tokens, stopping at EOS and skipping BOS/PAD.
TokenSequence decode(std::span<const std::int32_t> indices, const Vocabulary& vocab);

std::string join_tokens(const TokenSequence& tokens, std::string_view sep = " ");
TokenSequence split_whitespace(std::string_view text);

}  // namespace codesum
