#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "codesum/corpus.hpp"
#include "codesum/segmenter.hpp"

namespace codesum {

struct TraceStep {
  std::size_t statement = 0;
  double informativity = 0.0;  // joint informativity after accepting `statement`
};

struct LabeledSnippet {
  SegmentedSnippet snippet;
  std::vector<std::uint8_t> labels;
  std::vector<TraceStep> trace;
  bool fallback = false;  // no statement had positive informativity
};

// ROUGE-L recall of the comment against the selected statements' tokens,
// concatenated in source order. Indices may be given in any order.
double informativity(std::span<const std::size_t> selected, const SegmentedSnippet& snippet,
                     const TokenSequence& comment);

// Greedy ground-truth labeling: rank statements by their own informativity
// (descending, earlier position first on ties), then scan in rank order and
// accept a statement only if it strictly raises the joint informativity.
// When nothing is accepted the top-ranked statement is labeled 1.
LabeledSnippet label_statements(const SegmentedSnippet& snippet, const TokenSequence& comment);

}  // namespace codesum
