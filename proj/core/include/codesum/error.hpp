#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace codesum {

// Base of every error the library raises. `stage()` names the pipeline stage
// so the CLI can emit a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& message)
      : std::runtime_error(message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : Error("corpus", "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyComment : public Error {
 public:
  EmptyComment() : Error("corpus", "comment is empty after preprocessing") {}
};

class EmptySnippet : public Error {
 public:
  EmptySnippet() : Error("segmenter", "snippet has no statements") {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error("metrics", what + ": empty input") {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("numcore", message) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& message) : Error("numcore", message) {}
};

class EmptyCorpus : public Error {
 public:
  explicit EmptyCorpus(const std::string& stage) : Error(stage, "corpus is empty") {}
};

class VocabMismatch : public Error {
 public:
  explicit VocabMismatch(const std::string& message) : Error("abstracter", message) {}
};

class VersionError : public Error {
 public:
  explicit VersionError(const std::string& message) : Error("checkpoint", message) {}
};

class CorruptCheckpoint : public Error {
 public:
  explicit CorruptCheckpoint(const std::string& message) : Error("checkpoint", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error("usage", message) {}
};

}  // namespace codesum
