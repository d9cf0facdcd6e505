#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "codesum/corpus.hpp"

namespace codesum {

enum class Language { kJava, kPython, kGeneric };

Language parse_language(std::string_view tag);  // throws UsageError on unknown tags
std::string_view language_name(Language lang);

struct Statement {
  std::string text;  // trimmed source text
  TokenSequence tokens;
  std::size_t position = 0;
};

struct SegmentedSnippet {
  Language language = Language::kGeneric;
  std::vector<Statement> statements;
  TokenSequence full_tokens;

  std::size_t size() const noexcept { return statements.size(); }
};

// Lexical statement segmentation.
//   java:    split after top-level ';' and after every '{' / '}', ignoring
//            delimiters inside string/char literals, comments and parentheses.
//   python:  logical lines; physical lines are joined while brackets are open,
//            a triple-quoted string is open, or a line ends with a backslash.
//   generic: physical lines.
// Empty fragments are dropped. Throws EmptySnippet when nothing remains.
SegmentedSnippet segment(std::string_view code, Language language);

}  // namespace codesum
