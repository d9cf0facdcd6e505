#include "codesum/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "codesum/error.hpp"

namespace codesum {
namespace {

constexpr std::size_t kExactLimit = 20;

struct Ranking {
  double rank_sum_x = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  bool has_ties = false;
};

Ranking rank(std::span<const double> xs, std::span<const double> ys) {
  struct Item {
    double value;
    bool from_x;
  };
  std::vector<Item> all;
  all.reserve(xs.size() + ys.size());
  for (double x : xs) all.push_back({x, true});
  for (double y : ys) all.push_back({y, false});
  std::stable_sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.value < b.value; });
  Ranking out;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_x) out.rank_sum_x += avg_rank;
    }
    if (t > 1) {
      out.has_ties = true;
      out.tie_term += t * t * t - t;
    }
    i = j;
  }
  return out;
}

void check_sizes(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw EmptyInput("mann_whitney_u_test");
}

double u_of(const Ranking& r, std::size_t n) {
  const double nn = static_cast<double>(n);
  return r.rank_sum_x - nn * (nn + 1.0) / 2.0;
}

SignificanceResult normal_approx(const Ranking& r, std::size_t n, std::size_t m) {
  SignificanceResult res;
  res.method = TestMethod::kNormalApprox;
  res.u_statistic = u_of(r, n);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double total = nd + md;
  const double mu = nd * md / 2.0;
  double var = nd * md / 12.0 * (total + 1.0);
  if (total > 1.0) var -= nd * md / 12.0 * r.tie_term / (total * (total - 1.0));
  if (var <= 0.0) {
    res.p_value = 1.0;
  } else {
    const double z = std::max(0.0, std::abs(res.u_statistic - mu) - 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }
  res.band = significance_band(res.p_value);
  return res;
}

}  // namespace

SignificanceBand significance_band(double p) {
  if (p >= 0.05) return SignificanceBand::kNs;
  if (p > 0.01) return SignificanceBand::kOne;
  if (p > 0.001) return SignificanceBand::kTwo;
  if (p >= 0.0001) return SignificanceBand::kThree;
  return SignificanceBand::kFour;
}

std::string_view band_label(SignificanceBand band) {
  switch (band) {
    case SignificanceBand::kNs:
      return "ns";
    case SignificanceBand::kOne:
      return "*";
    case SignificanceBand::kTwo:
      return "**";
    case SignificanceBand::kThree:
      return "***";
    case SignificanceBand::kFour:
      return "****";
  }
  return "ns";
}

std::string_view method_name(TestMethod method) {
  return method == TestMethod::kExact ? "exact" : "normal-approx";
}

SignificanceResult mann_whitney_u_normal(std::span<const double> xs, std::span<const double> ys) {
  check_sizes(xs, ys);
  return normal_approx(rank(xs, ys), xs.size(), ys.size());
}

SignificanceResult mann_whitney_u_test(std::span<const double> xs, std::span<const double> ys) {
  check_sizes(xs, ys);
  const auto ranking = rank(xs, ys);
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();
  const std::size_t total = n + m;
  if (total > kExactLimit || ranking.has_ties) return normal_approx(ranking, n, m);

  // ways[k][s]: number of k-subsets of ranks {1..total} with rank sum s.
  const std::size_t max_sum = total * (total + 1) / 2;
  std::vector<std::vector<double>> ways(n + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t rank_value = 1; rank_value <= total; ++rank_value) {
    for (std::size_t k = std::min(n, rank_value); k >= 1; --k) {
      for (std::size_t s = max_sum; s >= rank_value; --s) ways[k][s] += ways[k - 1][s - rank_value];
    }
  }
  const double subsets = std::accumulate(ways[n].begin(), ways[n].end(), 0.0);
  const auto observed = static_cast<std::size_t>(std::llround(ranking.rank_sum_x));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    if (s <= observed) lower += ways[n][s];
    if (s >= observed) upper += ways[n][s];
  }
  SignificanceResult res;
  res.method = TestMethod::kExact;
  res.u_statistic = u_of(ranking, n);
  res.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / subsets);
  res.band = significance_band(res.p_value);
  return res;
}

}  // namespace codesum
