#pragma once

#include <span>
#include <string_view>

namespace codesum {

enum class TestMethod { kExact, kNormalApprox };

// ns: p >= 0.05, *: 0.01 < p < 0.05, **: 0.001 < p <= 0.01,
// ***: 0.0001 <= p <= 0.001, ****: p < 0.0001.
enum class SignificanceBand { kNs, kOne, kTwo, kThree, kFour };

struct SignificanceResult {
  double u_statistic = 0.0;  // U of the first sample
  double p_value = 1.0;      // two-tailed
  TestMethod method = TestMethod::kExact;
  SignificanceBand band = SignificanceBand::kNs;
};

SignificanceBand significance_band(double p_value);
std::string_view band_label(SignificanceBand band);
std::string_view method_name(TestMethod method);

// Unpaired two-tailed Wilcoxon-Mann-Whitney rank-sum test. The exact null
// distribution is used when |xs| + |ys| <= 20 and there are no ties;
// otherwise the normal approximation with tie and continuity corrections.
SignificanceResult mann_whitney_u_test(std::span<const double> xs, std::span<const double> ys);

// Forces the normal approximation regardless of sample size.
SignificanceResult mann_whitney_u_normal(std::span<const double> xs, std::span<const double> ys);

}  // namespace codesum
