#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codesum/corpus.hpp"

namespace codesum {

using Tokens = std::span<const std::string>;

// Sentence-level metrics. Throughout, `r` is the reference and `g` the
// generated (hypothesis) sentence.

std::size_t lcs_length(Tokens r, Tokens g);

// LCS F-measure with recall weighted by beta. 0 when the LCS is empty.
double rouge_l(Tokens r, Tokens g, double beta = 1.2);

// LCS(r, g) / |r|. An empty g scores 0.
double rouge_l_recall(Tokens r, Tokens g);

struct NgramMatch {
  std::size_t matched = 0;  // clipped count of g's n-grams found in r
  std::size_t total = 0;    // number of n-grams in g
};

NgramMatch ngram_matches(Tokens r, Tokens g, std::size_t n);

// 1 when |g| > |r|, otherwise exp(1 - |r|/|g|).
double brevity_penalty(std::size_t ref_len, std::size_t hyp_len);

// BLEU-4 with uniform weights. Precisions for n >= 2 use add-one smoothing on
// both numerator and denominator; a zero unigram precision gives 0.
double bleu4(Tokens r, Tokens g);

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  bool exact = true;  // false when the search budget forced the greedy fallback
};

// Exact-token alignment with the maximum number of matches and, among those,
// the fewest chunks (runs contiguous in both sentences).
MeteorAlignment meteor_alignment(Tokens r, Tokens g);

double meteor(Tokens r, Tokens g, double alpha = 0.9, double beta = 3.0, double gamma = 0.5);

struct MetricScores {
  double bleu = 0.0;
  double meteor = 0.0;
  double rouge_l = 0.0;
};

enum class BucketKind { kCode, kComment };

struct BucketSpec {
  BucketKind kind = BucketKind::kComment;
  // Inclusive lower bounds of each bucket, ascending; the last bucket is open.
  std::vector<std::size_t> lower_bounds;
  // Code line count per sample; required for kCode.
  std::vector<std::size_t> code_lines;

  static BucketSpec comment_length();
  static BucketSpec code_length(std::vector<std::size_t> lines);
};

struct MetricReport;

struct LengthBucket {
  std::string label;
  std::size_t lower = 0;
  std::optional<std::size_t> upper;  // inclusive; empty for the open bucket
  std::vector<std::size_t> members;  // sample indices
};

inline constexpr std::array<int, 5> kReportPercentiles = {5, 25, 50, 75, 95};

struct MetricReport {
  std::vector<MetricScores> samples;
  MetricScores mean;
  std::array<MetricScores, kReportPercentiles.size()> percentiles{};
  std::optional<BucketKind> bucket_kind;
  std::vector<LengthBucket> buckets;
  std::vector<MetricReport> bucket_reports;  // aligned with `buckets`
};

MetricScores score_pair(Tokens r, Tokens g);

// Scores every pair and aggregates. An empty reference or hypothesis scores 0
// on all metrics. Throws ShapeError on a size mismatch or an empty corpus.
MetricReport evaluate_corpus(std::span<const TokenSequence> refs, std::span<const TokenSequence> hyps,
                             const std::optional<BucketSpec>& buckets = std::nullopt);

// Linear interpolation between closest ranks.
double percentile(std::vector<double> values, double pct);

}  // namespace codesum
