#include "codesum/segmenter.hpp"

#include "codesum/error.hpp"

namespace codesum {
namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string trimmed(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_blank(s[b])) ++b;
  while (e > b && is_blank(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

class Collector {
 public:
  void push(std::string_view fragment) {
    auto text = trimmed(fragment);
    if (text.empty()) return;
    Statement st;
    st.tokens = tokenize_code(text);
    st.text = std::move(text);
    st.position = statements_.size();
    statements_.push_back(std::move(st));
  }

  std::vector<Statement> take() { return std::move(statements_); }

 private:
  std::vector<Statement> statements_;
};

std::vector<Statement> segment_java(std::string_view code) {
  Collector out;
  std::size_t start = 0;
  int paren_depth = 0;
  std::size_t i = 0;
  const std::size_t n = code.size();
  while (i < n) {
    const char c = code[i];
    if (c == '/' && i + 1 < n && code[i + 1] == '/') {
      while (i < n && code[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && code[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(code[i] == '*' && code[i + 1] == '/')) ++i;
      i = std::min(n, i + 2);
      continue;
    }
    if (c == '"' && i + 2 < n && code[i + 1] == '"' && code[i + 2] == '"') {  // text block
      i += 3;
      while (i + 2 < n && !(code[i] == '"' && code[i + 1] == '"' && code[i + 2] == '"')) ++i;
      i = std::min(n, i + 3);
      continue;
    }
    if (c == '"' || c == '\'') {
      ++i;
      while (i < n && code[i] != c && code[i] != '\n') {
        if (code[i] == '\\') ++i;
        ++i;
      }
      if (i < n) ++i;
      continue;
    }
    if (c == '(') {
      ++paren_depth;
    } else if (c == ')') {
      if (paren_depth > 0) --paren_depth;
    } else if ((c == ';' && paren_depth == 0) || c == '{' || c == '}') {
      // Braces always close a statement; an unbalanced '(' must not swallow
      // the rest of the snippet.
      if (c != ';') paren_depth = 0;
      out.push(code.substr(start, i + 1 - start));
      start = i + 1;
    }
    ++i;
  }
  out.push(code.substr(start));
  return out.take();
}

std::vector<Statement> segment_python(std::string_view code) {
  Collector out;
  std::size_t start = 0;
  int depth = 0;
  char triple = 0;  // quote char of an open triple-quoted string
  std::size_t i = 0;
  const std::size_t n = code.size();
  while (i < n) {
    const char c = code[i];
    if (triple) {
      if (c == '\\') {
        i += 2;
        continue;
      }
      if (c == triple && i + 2 < n && code[i + 1] == triple && code[i + 2] == triple) {
        triple = 0;
        i += 3;
        continue;
      }
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < n && code[i] != '\n') ++i;
      continue;
    }
    if (c == '"' || c == '\'') {
      if (i + 2 < n && code[i + 1] == c && code[i + 2] == c) {
        triple = c;
        i += 3;
        continue;
      }
      ++i;
      while (i < n && code[i] != c && code[i] != '\n') {
        if (code[i] == '\\') ++i;
        ++i;
      }
      if (i < n && code[i] == c) ++i;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      if (depth > 0) --depth;
    } else if (c == '\n') {
      std::size_t k = i;
      while (k > start && (code[k - 1] == ' ' || code[k - 1] == '\t' || code[k - 1] == '\r')) --k;
      const bool continued = k > start && code[k - 1] == '\\';
      if (depth == 0 && !continued) {
        out.push(code.substr(start, i - start));
        start = i + 1;
      }
    }
    ++i;
  }
  out.push(code.substr(start));
  return out.take();
}

std::vector<Statement> segment_generic(std::string_view code) {
  Collector out;
  std::size_t start = 0;
  while (start <= code.size()) {
    auto nl = code.find('\n', start);
    if (nl == std::string_view::npos) nl = code.size();
    out.push(code.substr(start, nl - start));
    start = nl + 1;
  }
  return out.take();
}

}  // namespace

Language parse_language(std::string_view tag) {
  if (tag == "java") return Language::kJava;
  if (tag == "python") return Language::kPython;
  if (tag == "generic") return Language::kGeneric;
  throw UsageError("unknown language '" + std::string(tag) + "' (expected java, python or generic)");
}

std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::kJava:
      return "java";
    case Language::kPython:
      return "python";
    case Language::kGeneric:
      return "generic";
  }
  return "generic";
}

SegmentedSnippet segment(std::string_view code, Language language) {
  SegmentedSnippet snippet;
  snippet.language = language;
  switch (language) {
    case Language::kJava:
      snippet.statements = segment_java(code);
      break;
    case Language::kPython:
      snippet.statements = segment_python(code);
      break;
    case Language::kGeneric:
      snippet.statements = segment_generic(code);
      break;
  }
  if (snippet.statements.empty()) throw EmptySnippet();
  snippet.full_tokens = tokenize_code(code);
  return snippet;
}

}  // namespace codesum
