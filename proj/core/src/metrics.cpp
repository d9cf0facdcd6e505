#include "codesum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

#include "codesum/error.hpp"

namespace codesum {
namespace {

constexpr std::size_t kMeteorStateBudget = 1u << 18;

struct AlignState {
  std::uint64_t used = 0;
  std::int32_t prev = -1;  // g position matched by the previous r token, -1 if none

  friend bool operator==(const AlignState&, const AlignState&) = default;
};

struct AlignStateHash {
  std::size_t operator()(const AlignState& s) const noexcept {
    return std::hash<std::uint64_t>{}(s.used * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(s.prev + 1));
  }
};

struct AlignValue {
  std::size_t matches = 0;
  std::size_t links = 0;

  bool better_than(const AlignValue& o) const {
    return matches != o.matches ? matches > o.matches : links > o.links;
  }
};

MeteorAlignment greedy_alignment(Tokens r, Tokens g) {
  std::vector<bool> used(g.size(), false);
  std::size_t matches = 0;
  std::size_t links = 0;
  std::int64_t prev = -1;
  for (const auto& tok : r) {
    std::int64_t pick = -1;
    if (prev >= 0 && static_cast<std::size_t>(prev + 1) < g.size() && !used[prev + 1] && g[prev + 1] == tok) {
      pick = prev + 1;
      ++links;
    } else {
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (!used[j] && g[j] == tok) {
          pick = static_cast<std::int64_t>(j);
          break;
        }
      }
    }
    if (pick >= 0) {
      used[pick] = true;
      ++matches;
    }
    prev = pick;
  }
  return {matches, matches - links, false};
}

}  // namespace

std::size_t lcs_length(Tokens r, Tokens g) {
  if (r.empty() || g.empty()) return 0;
  std::vector<std::size_t> prev(g.size() + 1, 0);
  std::vector<std::size_t> cur(g.size() + 1, 0);
  for (std::size_t i = 1; i <= r.size(); ++i) {
    for (std::size_t j = 1; j <= g.size(); ++j) {
      cur[j] = r[i - 1] == g[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[g.size()];
}

double rouge_l(Tokens r, Tokens g, double beta) {
  if (r.empty() || g.empty()) throw EmptyInput("rouge_l");
  const auto lcs = static_cast<double>(lcs_length(r, g));
  if (lcs == 0.0) return 0.0;
  const double recall = lcs / static_cast<double>(r.size());
  const double precision = lcs / static_cast<double>(g.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * recall * precision / (recall + b2 * precision);
}

double rouge_l_recall(Tokens r, Tokens g) {
  if (r.empty()) throw EmptyInput("rouge_l_recall");
  return static_cast<double>(lcs_length(r, g)) / static_cast<double>(r.size());
}

NgramMatch ngram_matches(Tokens r, Tokens g, std::size_t n) {
  NgramMatch out;
  if (n == 0 || g.size() < n) return out;
  std::map<std::vector<std::string>, std::size_t> ref_counts;
  if (r.size() >= n) {
    for (std::size_t i = 0; i + n <= r.size(); ++i) ++ref_counts[{r.begin() + i, r.begin() + i + n}];
  }
  std::map<std::vector<std::string>, std::size_t> hyp_counts;
  for (std::size_t i = 0; i + n <= g.size(); ++i) ++hyp_counts[{g.begin() + i, g.begin() + i + n}];
  out.total = g.size() - n + 1;
  for (const auto& [gram, count] : hyp_counts) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) out.matched += std::min(count, it->second);
  }
  return out;
}

double brevity_penalty(std::size_t ref_len, std::size_t hyp_len) {
  if (hyp_len > ref_len) return 1.0;
  if (hyp_len == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

double bleu4(Tokens r, Tokens g) {
  if (r.empty() || g.empty()) throw EmptyInput("bleu4");
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto m = ngram_matches(r, g, n);
    double p = 0.0;
    if (n == 1) {
      if (m.matched == 0) return 0.0;
      p = static_cast<double>(m.matched) / static_cast<double>(m.total);
    } else {
      p = static_cast<double>(m.matched + 1) / static_cast<double>(m.total + 1);
    }
    log_sum += 0.25 * std::log(p);
  }
  return brevity_penalty(r.size(), g.size()) * std::exp(log_sum);
}

MeteorAlignment meteor_alignment(Tokens r, Tokens g) {
  // Only g positions whose token occurs in r can ever be used.
  std::vector<std::int32_t> slot(g.size(), -1);
  std::size_t slots = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::find(r.begin(), r.end(), g[j]) != r.end()) slot[j] = static_cast<std::int32_t>(slots++);
  }
  if (slots == 0) return {0, 0, true};
  if (slots > 64) return greedy_alignment(r, g);

  // Left-to-right over r; the value of a state is (matches, links) where a
  // link joins two consecutive r tokens aligned to consecutive g tokens.
  std::unordered_map<AlignState, AlignValue, AlignStateHash> layer{{AlignState{}, AlignValue{}}};
  std::unordered_map<AlignState, AlignValue, AlignStateHash> next;
  auto relax = [&next](const AlignState& s, const AlignValue& v) {
    auto [it, inserted] = next.try_emplace(s, v);
    if (!inserted && v.better_than(it->second)) it->second = v;
  };
  for (const auto& tok : r) {
    next.clear();
    for (const auto& [state, value] : layer) {
      relax(AlignState{state.used, -1}, value);
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (slot[j] < 0 || g[j] != tok) continue;
        const std::uint64_t bit = std::uint64_t{1} << slot[j];
        if (state.used & bit) continue;
        AlignValue v = value;
        ++v.matches;
        if (state.prev >= 0 && static_cast<std::size_t>(state.prev) + 1 == j) ++v.links;
        relax(AlignState{state.used | bit, static_cast<std::int32_t>(j)}, v);
      }
      if (next.size() > kMeteorStateBudget) return greedy_alignment(r, g);
    }
    std::swap(layer, next);
  }
  AlignValue best;
  bool first = true;
  for (const auto& [state, value] : layer) {
    if (first || value.better_than(best)) best = value;
    first = false;
  }
  return {best.matches, best.matches - best.links, true};
}

double meteor(Tokens r, Tokens g, double alpha, double beta, double gamma) {
  if (r.empty() || g.empty()) throw EmptyInput("meteor");
  const auto a = meteor_alignment(r, g);
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double precision = m / static_cast<double>(g.size());
  const double recall = m / static_cast<double>(r.size());
  const double fmean = precision * recall / (alpha * precision + (1.0 - alpha) * recall);
  const double frag = static_cast<double>(a.chunks) / m;
  return (1.0 - gamma * std::pow(frag, beta)) * fmean;
}

MetricScores score_pair(Tokens r, Tokens g) {
  if (r.empty() || g.empty()) return {};
  return {bleu4(r, g), meteor(r, g), rouge_l(r, g)};
}

BucketSpec BucketSpec::comment_length() { return {BucketKind::kComment, {1, 6, 11, 16, 21}, {}}; }

BucketSpec BucketSpec::code_length(std::vector<std::size_t> lines) {
  return {BucketKind::kCode, {1, 11, 21, 31, 41}, std::move(lines)};
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

namespace {

MetricReport aggregate(std::vector<MetricScores> samples) {
  MetricReport rep;
  rep.samples = std::move(samples);
  if (rep.samples.empty()) return rep;
  std::vector<double> b, m, l;
  for (const auto& s : rep.samples) {
    b.push_back(s.bleu);
    m.push_back(s.meteor);
    l.push_back(s.rouge_l);
  }
  auto mean = [](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
  };
  rep.mean = {mean(b), mean(m), mean(l)};
  for (std::size_t k = 0; k < kReportPercentiles.size(); ++k) {
    const double p = kReportPercentiles[k];
    rep.percentiles[k] = {percentile(b, p), percentile(m, p), percentile(l, p)};
  }
  return rep;
}

}  // namespace

MetricReport evaluate_corpus(std::span<const TokenSequence> refs, std::span<const TokenSequence> hyps,
                             const std::optional<BucketSpec>& buckets) {
  if (refs.size() != hyps.size()) {
    throw ShapeError("evaluate_corpus: " + std::to_string(refs.size()) + " references vs " +
                     std::to_string(hyps.size()) + " hypotheses");
  }
  if (refs.empty()) throw ShapeError("evaluate_corpus: empty corpus");
  std::vector<MetricScores> samples;
  samples.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) samples.push_back(score_pair(refs[i], hyps[i]));
  MetricReport rep = aggregate(samples);
  if (!buckets) return rep;

  const auto& spec = *buckets;
  if (spec.kind == BucketKind::kCode && spec.code_lines.size() != refs.size()) {
    throw ShapeError("evaluate_corpus: code line counts do not match the corpus size");
  }
  rep.bucket_kind = spec.kind;
  const auto& bounds = spec.lower_bounds;
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    LengthBucket bucket;
    bucket.lower = bounds[k];
    if (k + 1 < bounds.size()) bucket.upper = bounds[k + 1] - 1;
    bucket.label = std::to_string(bucket.lower) + (bucket.upper ? "-" + std::to_string(*bucket.upper) : "+");
    rep.buckets.push_back(std::move(bucket));
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::size_t len = spec.kind == BucketKind::kCode ? spec.code_lines[i] : refs[i].size();
    for (auto& bucket : rep.buckets) {
      if (len >= bucket.lower && (!bucket.upper || len <= *bucket.upper)) {
        bucket.members.push_back(i);
        break;
      }
    }
  }
  for (const auto& bucket : rep.buckets) {
    std::vector<MetricScores> sub;
    for (auto i : bucket.members) sub.push_back(samples[i]);
    rep.bucket_reports.push_back(aggregate(std::move(sub)));
  }
  return rep;
}

}  // namespace codesum
