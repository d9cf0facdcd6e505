#include "codesum/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "codesum/error.hpp"
#include "codesum/metrics.hpp"

namespace codesum {
namespace {

TokenSequence concatenated(std::vector<std::size_t> selected, const SegmentedSnippet& snippet) {
  std::sort(selected.begin(), selected.end());
  TokenSequence out;
  for (auto idx : selected) {
    const auto& toks = snippet.statements.at(idx).tokens;
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

// Joint informativity differs only by the common 1/|comment| factor, so the
// greedy comparisons run on integer LCS lengths.
std::size_t joint_lcs(const std::vector<std::size_t>& selected, const SegmentedSnippet& snippet,
                      const TokenSequence& comment) {
  return lcs_length(comment, concatenated(selected, snippet));
}

}  // namespace

double informativity(std::span<const std::size_t> selected, const SegmentedSnippet& snippet,
                     const TokenSequence& comment) {
  if (comment.empty()) throw EmptyInput("informativity");
  const auto tokens = concatenated({selected.begin(), selected.end()}, snippet);
  return rouge_l_recall(comment, tokens);
}

LabeledSnippet label_statements(const SegmentedSnippet& snippet, const TokenSequence& comment) {
  if (snippet.statements.empty()) throw EmptySnippet();
  if (comment.empty()) throw EmptyInput("label_statements");
  const std::size_t n = snippet.statements.size();
  const double denom = static_cast<double>(comment.size());

  std::vector<std::size_t> own(n);
  for (std::size_t i = 0; i < n; ++i) own[i] = lcs_length(comment, snippet.statements[i].tokens);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return own[a] > own[b]; });

  LabeledSnippet out;
  out.snippet = snippet;
  out.labels.assign(n, 0);
  std::vector<std::size_t> accepted;
  std::size_t current = 0;
  for (auto idx : order) {
    accepted.push_back(idx);
    const std::size_t joint = joint_lcs(accepted, snippet, comment);
    if (joint > current) {
      current = joint;
      out.labels[idx] = 1;
      out.trace.push_back({idx, static_cast<double>(joint) / denom});
    } else {
      accepted.pop_back();
    }
  }
  if (accepted.empty()) {
    out.fallback = true;
    out.labels[order.front()] = 1;
    out.trace.push_back({order.front(), 0.0});
  }
  return out;
}

}  // namespace codesum
