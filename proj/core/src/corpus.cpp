#include "codesum/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "codesum/error.hpp"
#include "json.hpp"

namespace codesum {
namespace {

const char* const kReservedTokens[Vocabulary::kReserved] = {"<pad>", "<unk>", "<s>", "</s>"};

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Bytes >= 0x80 belong to identifiers so UTF-8 sequences are never split.
bool is_word(unsigned char c) { return is_upper(c) || is_lower(c) || is_digit(c) || c >= 0x80; }

char to_lower(unsigned char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c); }

std::string lowered(std::string_view s) {
  std::string out(s.size(), '\0');
  std::transform(s.begin(), s.end(), out.begin(), [](unsigned char c) { return to_lower(c); });
  return out;
}

// Splits one identifier run at camelCase boundaries.
void split_identifier(std::string_view word, TokenSequence& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < word.size(); ++i) {
    const auto prev = static_cast<unsigned char>(word[i - 1]);
    const auto cur = static_cast<unsigned char>(word[i]);
    bool boundary = false;
    if (is_upper(cur)) {
      if (is_lower(prev) || is_digit(prev)) {
        boundary = true;
      } else if (is_upper(prev) && i + 1 < word.size() && is_lower(static_cast<unsigned char>(word[i + 1]))) {
        boundary = true;  // "HTTPServer" -> "HTTP" | "Server"
      }
    }
    if (boundary) {
      out.push_back(lowered(word.substr(start, i - start)));
      start = i;
    }
  }
  if (start < word.size()) out.push_back(lowered(word.substr(start)));
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void count_tokens(const TokenSequence& seq, std::map<std::string, std::size_t>& freq) {
  for (const auto& t : seq) ++freq[t];
}

Vocabulary vocabulary_from_counts(const std::map<std::string, std::size_t>& freq, std::size_t min_freq,
                                  std::size_t max_size) {
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (const auto& [tok, n] : freq) {
    if (n >= min_freq && n > 0) entries.emplace_back(tok, n);
  }
  // std::map iteration is already lexicographic, so a stable sort on frequency
  // leaves ties in lexicographic order.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens(std::begin(kReservedTokens), std::end(kReservedTokens));
  for (const auto& [tok, n] : entries) {
    if (tokens.size() >= max_size) break;
    if (std::find(std::begin(kReservedTokens), std::end(kReservedTokens), tok) != std::end(kReservedTokens)) {
      continue;
    }
    tokens.push_back(tok);
  }
  return Vocabulary::from_tokens(std::move(tokens));
}

}  // namespace

TokenSequence tokenize_code(std::string_view text) {
  TokenSequence out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) ++j;
      split_identifier(text.substr(i, j - i), out);
      i = j;
    } else {
      if (!is_space(c) && c != '_') out.emplace_back(1, static_cast<char>(c));
      ++i;
    }
  }
  return out;
}

TokenSequence tokenize_comment(std::string_view text) {
  // A terminator ends the sentence only when followed by whitespace or the end
  // of the text, so "java.util.Map" and "1.5" survive.
  std::size_t end = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || is_space(static_cast<unsigned char>(text[i + 1])))) {
      end = i + 1;
      break;
    }
  }
  TokenSequence out;
  std::size_t i = 0;
  while (i < end) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word(c) || c == '_') {
      std::size_t j = i;
      while (j < end && (is_word(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back(lowered(text.substr(i, j - i)));
      i = j;
    } else {
      if (!is_space(c)) out.emplace_back(1, static_cast<char>(c));
      ++i;
    }
  }
  if (out.empty()) throw EmptyComment();
  return out;
}

CorpusLoad load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path.string() + "'");
  CorpusLoad result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw FormatError(line_no, "record is not an object");
    for (const char* field : {"code", "comment"}) {
      auto it = record.find(field);
      if (it == record.end()) throw FormatError(line_no, std::string("missing field '") + field + "'");
      if (!it->is_string()) throw FormatError(line_no, std::string("field '") + field + "' is not a string");
    }
    RawPair pair;
    pair.code = record["code"].get<std::string>();
    pair.comment = record["comment"].get<std::string>();
    if (trim(pair.code).empty()) {
      ++result.skipped;
      continue;
    }
    try {
      (void)tokenize_comment(pair.comment);
    } catch (const EmptyComment&) {
      ++result.skipped;
      continue;
    }
    pair.id = result.pairs.size();
    result.pairs.push_back(std::move(pair));
  }
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return result;
}

Vocabulary::Vocabulary() {
  for (const char* t : kReservedTokens) add(t);
}

void Vocabulary::add(std::string token) {
  const auto idx = static_cast<std::int32_t>(tokens_.size());
  lookup_.emplace(token, idx);
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < kReserved) throw FormatError(0, "vocabulary shorter than the reserved prefix");
  for (std::size_t i = 0; i < kReserved; ++i) {
    if (tokens[i] != kReservedTokens[i]) throw FormatError(i + 1, "reserved token mismatch: '" + tokens[i] + "'");
  }
  Vocabulary v;
  for (std::size_t i = kReserved; i < tokens.size(); ++i) {
    if (tokens[i].empty()) throw FormatError(i + 1, "empty vocabulary token");
    if (v.contains(tokens[i])) throw FormatError(i + 1, "duplicate vocabulary token '" + tokens[i] + "'");
    v.add(std::move(tokens[i]));
  }
  return v;
}

std::int32_t Vocabulary::index(std::string_view token) const {
  auto it = lookup_.find(std::string(token));
  return it == lookup_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::int32_t index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= tokens_.size()) {
    return tokens_[kUnk];
  }
  return tokens_[static_cast<std::size_t>(index)];
}

bool Vocabulary::contains(std::string_view token) const { return lookup_.count(std::string(token)) > 0; }

std::string Vocabulary::serialize() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    tokens.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return from_tokens(std::move(tokens));
}

Vocabulary build_vocabulary(std::span<const RawPair> pairs, std::size_t min_freq, std::size_t max_size) {
  std::map<std::string, std::size_t> freq;
  for (const auto& p : pairs) {
    count_tokens(tokenize_code(p.code), freq);
    try {
      count_tokens(tokenize_comment(p.comment), freq);
    } catch (const EmptyComment&) {
    }
  }
  return vocabulary_from_counts(freq, min_freq, max_size);
}

Vocabulary build_vocabulary(std::span<const TokenSequence> sequences, std::size_t min_freq,
                            std::size_t max_size) {
  std::map<std::string, std::size_t> freq;
  for (const auto& s : sequences) count_tokens(s, freq);
  return vocabulary_from_counts(freq, min_freq, max_size);
}

Batch encode_and_pad(std::span<const TokenSequence> seqs, const Vocabulary& vocab, std::size_t max_len,
                     SequenceSide side) {
  const bool comment = side == SequenceSide::kComment;
  if (max_len < (comment ? 2u : 1u)) throw ShapeError("encode_and_pad: max_len too small");
  Batch b;
  b.rows = seqs.size();
  b.max_len = max_len;
  b.indices.assign(b.rows * max_len, Vocabulary::kPad);
  b.mask.assign(b.rows * max_len, 0);
  b.lengths.resize(b.rows);
  for (std::size_t r = 0; r < b.rows; ++r) {
    auto* row = b.indices.data() + r * max_len;
    std::size_t n = 0;
    if (comment) row[n++] = Vocabulary::kBos;
    const std::size_t budget = max_len - n - 1;
    for (std::size_t i = 0; i < seqs[r].size() && i < budget; ++i) row[n++] = vocab.index(seqs[r][i]);
    row[n++] = Vocabulary::kEos;
    b.lengths[r] = n;
    std::fill_n(b.mask.begin() + static_cast<std::ptrdiff_t>(r * max_len), n, std::uint8_t{1});
  }
  return b;
}

TokenSequence decode(std::span<const std::int32_t> indices, const Vocabulary& vocab) {
  TokenSequence out;
  for (auto idx : indices) {
    if (idx == Vocabulary::kEos) break;
    if (idx == Vocabulary::kBos || idx == Vocabulary::kPad) continue;
    out.push_back(vocab.token(idx));
  }
  return out;
}

std::string join_tokens(const TokenSequence& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

TokenSequence split_whitespace(std::string_view text) {
  TokenSequence out;
  std::istringstream ss{std::string(text)};
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace codesum
