// Slow reference implementations used only by the tests. They share no code
// with the library.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Seq = std::vector<std::string>;

inline bool is_subsequence(const Seq& needle, const Seq& hay) {
  std::size_t j = 0;
  for (const auto& t : hay) {
    if (j < needle.size() && needle[j] == t) ++j;
  }
  return j == needle.size();
}

// Longest common subsequence by trying every subsequence of the shorter side.
inline std::size_t lcs(const Seq& a, const Seq& b) {
  const Seq& shorter = a.size() <= b.size() ? a : b;
  const Seq& longer = a.size() <= b.size() ? b : a;
  const std::size_t n = shorter.size();
  std::size_t best = 0;
  Seq pick;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto bits = static_cast<std::size_t>(std::popcount(mask));
    if (bits <= best) continue;
    pick.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) pick.push_back(shorter[i]);
    }
    if (is_subsequence(pick, longer)) best = bits;
  }
  return best;
}

inline bool same_gram(const Seq& a, std::size_t i, const Seq& b, std::size_t j, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (a[i + k] != b[j + k]) return false;
  }
  return true;
}

// Clipped n-gram matches: for every hypothesis n-gram (first occurrence),
// min(count in g, count in r).
inline std::pair<std::size_t, std::size_t> ngram_counts(const Seq& r, const Seq& g, std::size_t n) {
  if (g.size() < n) return {0, 0};
  const std::size_t total = g.size() - n + 1;
  std::size_t matched = 0;
  for (std::size_t i = 0; i + n <= g.size(); ++i) {
    bool seen = false;
    for (std::size_t k = 0; k < i && !seen; ++k) seen = same_gram(g, k, g, i, n);
    if (seen) continue;
    std::size_t in_g = 0, in_r = 0;
    for (std::size_t k = 0; k + n <= g.size(); ++k) in_g += same_gram(g, k, g, i, n) ? 1 : 0;
    for (std::size_t k = 0; k + n <= r.size(); ++k) in_r += same_gram(r, k, g, i, n) ? 1 : 0;
    matched += std::min(in_g, in_r);
  }
  return {matched, total};
}

inline double bleu4(const Seq& r, const Seq& g) {
  double logp = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto [m, t] = ngram_counts(r, g, n);
    if (n == 1 && m == 0) return 0.0;
    const double p = n == 1 ? double(m) / double(t) : double(m + 1) / double(t + 1);
    logp += std::log(p) / 4.0;
  }
  const double bp = g.size() > r.size() ? 1.0 : std::exp(1.0 - double(r.size()) / double(g.size()));
  return bp * std::exp(logp);
}

inline double rouge_l(const Seq& r, const Seq& g, double beta = 1.2) {
  const double l = double(lcs(r, g));
  if (l == 0.0) return 0.0;
  const double rec = l / double(r.size());
  const double prec = l / double(g.size());
  return (1 + beta * beta) * rec * prec / (rec + beta * beta * prec);
}

struct Alignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

// Every maximum-size exact alignment, built type by type as injections of
// the rarer side's positions into the other's; returns the one with the
// fewest chunks.
inline Alignment meteor_alignment(const Seq& r, const Seq& g) {
  Seq types = r;
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  struct Group {
    std::vector<std::size_t> rp, gp;
  };
  std::vector<Group> groups;
  for (const auto& t : types) {
    Group grp;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] == t) grp.rp.push_back(i);
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j] == t) grp.gp.push_back(j);
    }
    if (!grp.gp.empty()) groups.push_back(grp);
  }
  std::vector<long> match_of(r.size(), -1);
  Alignment best{0, 0};
  bool have = false;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == groups.size()) {
      std::size_t m = 0, links = 0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (match_of[i] < 0) continue;
        ++m;
        if (i + 1 < r.size() && match_of[i + 1] == match_of[i] + 1) ++links;
      }
      if (!have || m > best.matches || (m == best.matches && m - links < best.chunks)) {
        best = {m, m - links};
        have = true;
      }
      return;
    }
    const auto& grp = groups[k];
    const bool r_smaller = grp.rp.size() <= grp.gp.size();
    const auto& small = r_smaller ? grp.rp : grp.gp;
    std::vector<std::size_t> large = r_smaller ? grp.gp : grp.rp;
    // Ordered choices of |small| distinct positions from `large`.
    std::vector<std::size_t> idx(large.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<bool> used(large.size(), false);
    std::vector<std::size_t> chosen;
    std::function<void()> pick = [&]() {
      if (chosen.size() == small.size()) {
        for (std::size_t s = 0; s < small.size(); ++s) {
          if (r_smaller) {
            match_of[small[s]] = static_cast<long>(large[chosen[s]]);
          } else {
            match_of[large[chosen[s]]] = static_cast<long>(small[s]);
          }
        }
        rec(k + 1);
        for (std::size_t s = 0; s < small.size(); ++s) {
          if (r_smaller) {
            match_of[small[s]] = -1;
          } else {
            match_of[large[chosen[s]]] = -1;
          }
        }
        return;
      }
      for (std::size_t c = 0; c < large.size(); ++c) {
        if (used[c]) continue;
        used[c] = true;
        chosen.push_back(c);
        pick();
        chosen.pop_back();
        used[c] = false;
      }
    };
    pick();
  };
  rec(0);
  return best;
}

inline double meteor(const Seq& r, const Seq& g) {
  const auto a = meteor_alignment(r, g);
  if (a.matches == 0) return 0.0;
  const double p = double(a.matches) / double(g.size());
  const double rc = double(a.matches) / double(r.size());
  const double f = p * rc / (0.9 * p + 0.1 * rc);
  return (1.0 - 0.5 * std::pow(double(a.chunks) / double(a.matches), 3.0)) * f;
}

// Number of alignments the enumeration above would visit.
inline double meteor_search_size(const Seq& r, const Seq& g) {
  Seq types = r;
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  double size = 1.0;
  for (const auto& t : types) {
    const auto a = static_cast<std::size_t>(std::count(r.begin(), r.end(), t));
    const auto b = static_cast<std::size_t>(std::count(g.begin(), g.end(), t));
    const auto lo = std::min(a, b), hi = std::max(a, b);
    for (std::size_t k = 0; k < lo; ++k) size *= double(hi - k);
  }
  return size;
}

// Two-sided exact Mann-Whitney p by listing every way to give the first
// sample |xs| of the pooled ranks. Assumes no ties.
inline double mann_whitney_exact(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> pooled = xs;
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  std::sort(pooled.begin(), pooled.end());
  auto rank_of = [&](double v) { return double(std::lower_bound(pooled.begin(), pooled.end(), v) - pooled.begin() + 1); };
  double observed = 0.0;
  for (double x : xs) observed += rank_of(x);
  const std::size_t total = pooled.size();
  std::size_t le = 0, ge = 0, all = 0;
  for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != xs.size()) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      if (mask & (1u << i)) s += double(i + 1);
    }
    ++all;
    le += s <= observed ? 1 : 0;
    ge += s >= observed ? 1 : 0;
  }
  return std::min(1.0, 2.0 * double(std::min(le, ge)) / double(all));
}

// Greedy statement labeling written from its description: rank by
// standalone ROUGE-L recall, keep a statement when the recall of the
// source-ordered concatenation goes up, fall back to the top statement.
struct Labeling {
  std::vector<int> labels;
  std::vector<std::pair<std::size_t, double>> trace;
  bool fallback = false;
};

inline double recall(const Seq& comment, const Seq& tokens) {
  return double(lcs(comment, tokens)) / double(comment.size());
}

inline Seq join_selected(const std::vector<Seq>& statements, const std::vector<int>& chosen) {
  Seq out;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    if (chosen[i]) out.insert(out.end(), statements[i].begin(), statements[i].end());
  }
  return out;
}

inline Labeling greedy_labels(const std::vector<Seq>& statements, const Seq& comment) {
  const std::size_t n = statements.size();
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < n; ++i) ranked.push_back({-recall(comment, statements[i]), i});
  std::sort(ranked.begin(), ranked.end());
  Labeling out;
  out.labels.assign(n, 0);
  double current = 0.0;
  for (const auto& [neg, i] : ranked) {
    out.labels[i] = 1;
    const double joint = recall(comment, join_selected(statements, out.labels));
    if (joint > current) {
      current = joint;
      out.trace.push_back({i, joint});
    } else {
      out.labels[i] = 0;
    }
  }
  if (out.trace.empty()) {
    out.fallback = true;
    out.labels[ranked.front().second] = 1;
    out.trace.push_back({ranked.front().second, 0.0});
  }
  return out;
}

}  // namespace oracle
